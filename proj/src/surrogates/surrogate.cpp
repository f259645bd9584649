#include "surrscope/surrogates/surrogate.hpp"

#include <cmath>

#include "surrscope/core/error.hpp"

namespace surrscope {

std::string to_string(Family f)
{
    switch (f) {
    case Family::logistic:
        return "logistic";
    case Family::logistic_l1:
        return "logistic_l1";
    case Family::tree:
        return "tree";
    }
    return "unknown";
}

Family family_from_string(const std::string& name)
{
    if (name == "logistic") {
        return Family::logistic;
    }
    if (name == "logistic_l1") {
        return Family::logistic_l1;
    }
    if (name == "tree") {
        return Family::tree;
    }
    throw InvalidArgument("unknown surrogate family '" + name + "' (expected logistic, logistic_l1 or tree)");
}

void FitConfig::validate() const
{
    if (family == Family::logistic_l1) {
        if (!C) {
            throw InvalidArgument("FitConfig: logistic_l1 requires C");
        }
        if (!(*C > 0.0) || !std::isfinite(*C)) {
            throw InvalidArgument("FitConfig: C must be positive and finite");
        }
    } else if (C) {
        throw InvalidArgument("FitConfig: C is only meaningful for logistic_l1");
    }
    if (!(tol > 0.0) || !std::isfinite(tol)) {
        throw InvalidArgument("FitConfig: tol must be positive");
    }
    if (max_iter == 0) {
        throw InvalidArgument("FitConfig: max_iter must be positive");
    }
    if (max_leaves && *max_leaves < 1) {
        throw InvalidArgument("FitConfig: max_leaves must be >= 1");
    }
}

TrainingView TrainingView::of(const Neighbourhood& n)
{
    std::span<const double> w;
    if (n.weights()) {
        w = *n.weights();
    }
    return TrainingView{n.points(), n.labels(), w};
}

ComplexityMeasure complexity(const LinearSurrogate& s)
{
    std::size_t l0 = 0;
    for (double w : s.coefficients) {
        l0 += std::abs(w) > kZeroCoefficient ? 1 : 0;
    }
    return LinearComplexity{l0};
}

ComplexityMeasure complexity(const TreeSurrogate& s)
{
    return TreeComplexity{s.depth, s.n_leaves};
}

ComplexityMeasure complexity(const Surrogate& s)
{
    return std::visit([](const auto& m) { return complexity(m); }, s);
}

double scalar_complexity(const ComplexityMeasure& c) noexcept
{
    if (const auto* lin = std::get_if<LinearComplexity>(&c)) {
        return static_cast<double>(lin->l0);
    }
    return static_cast<double>(std::get<TreeComplexity>(c).n_leaves);
}

bool is_degenerate(const Surrogate& s) noexcept
{
    return std::visit([](const auto& m) { return m.degenerate; }, s);
}

BinaryLabels surrogate_predict(const LinearSurrogate& s, const FeatureMatrix& X)
{
    if (X.cols() != s.coefficients.size()) {
        throw DimensionMismatch("surrogate_predict: surrogate has " + std::to_string(s.coefficients.size())
                                + " coefficients, X has " + std::to_string(X.cols()) + " columns");
    }
    std::vector<std::uint8_t> out(X.rows());
    for (std::size_t i = 0; i < X.rows(); ++i) {
        const auto x = X.row(i);
        double t = s.intercept;
        for (std::size_t j = 0; j < x.size(); ++j) {
            t += s.coefficients[j] * x[j];
        }
        out[i] = t > 0.0 ? 1 : 0;
    }
    return BinaryLabels(std::move(out));
}

BinaryLabels surrogate_predict(const TreeSurrogate& s, const FeatureMatrix& X)
{
    if (X.cols() != s.n_features) {
        throw DimensionMismatch("surrogate_predict: tree expects " + std::to_string(s.n_features)
                                + " features, X has " + std::to_string(X.cols()) + " columns");
    }
    std::vector<std::uint8_t> out(X.rows());
    for (std::size_t i = 0; i < X.rows(); ++i) {
        const auto x = X.row(i);
        std::size_t id = 0;
        while (!s.nodes[id].is_leaf()) {
            const auto& node = s.nodes[id];
            const auto f = static_cast<std::size_t>(node.feature);
            id = static_cast<std::size_t>(x[f] <= node.threshold ? node.left : node.right);
        }
        out[i] = s.nodes[id].label;
    }
    return BinaryLabels(std::move(out));
}

BinaryLabels surrogate_predict(const Surrogate& s, const FeatureMatrix& X)
{
    return std::visit([&](const auto& m) { return surrogate_predict(m, X); }, s);
}

Surrogate fit_surrogate(const Neighbourhood& N, const FitConfig& cfg)
{
    switch (cfg.family) {
    case Family::logistic:
        return fit_logistic(N, cfg);
    case Family::logistic_l1:
        return fit_logistic_l1(N, cfg);
    case Family::tree:
        return fit_tree(N, cfg);
    }
    throw InvalidArgument("fit_surrogate: unknown family");
}

} // namespace surrscope
