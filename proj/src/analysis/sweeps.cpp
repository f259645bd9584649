#include <cmath>

#include "surrscope/analysis/analysis.hpp"
#include "surrscope/core/error.hpp"
#include "surrscope/sampling/sampling.hpp"

namespace surrscope {

namespace {

void check_increasing(const std::vector<double>& radii, bool allow_zero, const char* op)
{
    if (radii.empty()) {
        throw InvalidArgument(std::string(op) + ": radii must be non-empty");
    }
    for (std::size_t i = 0; i < radii.size(); ++i) {
        const double r = radii[i];
        if (!std::isfinite(r) || r < 0.0 || (!allow_zero && r == 0.0)) {
            throw InvalidArgument(std::string(op) + (allow_zero ? ": radii must be non-negative"
                                                                : ": radii must be positive"));
        }
        if (i > 0 && !(radii[i - 1] < r)) {
            throw InvalidArgument(std::string(op) + ": radii must be strictly increasing");
        }
    }
}

void start(const RunOptions& opts, std::size_t total)
{
    if (opts.progress) {
        opts.progress->start(total);
    }
}

void advance(const RunOptions& opts)
{
    if (opts.progress) {
        opts.progress->advance();
    }
}

// Running mean and sum of squared deviations.
struct Welford {
    std::size_t n = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void push(double v) noexcept
    {
        ++n;
        const double delta = v - mean;
        mean += delta / static_cast<double>(n);
        m2 += delta * (v - mean);
    }

    double population_std() const noexcept { return n > 0 ? std::sqrt(std::max(m2, 0.0) / static_cast<double>(n)) : 0.0; }
};

} // namespace

SweepResult coverage_sweep(const BlackBox& bb, const Instance& x, const std::vector<double>& radii,
                           const FitConfig& fit, const SpecDefaults& defaults, RngSeed seed, const RunOptions& opts)
{
    check_increasing(radii, false, "coverage_sweep");
    fit.validate();
    defaults.validate();
    SweepResult result;
    result.radii = radii;
    result.entries.resize(radii.size());
    start(opts, radii.size());
    parallel_for(opts.exec, radii.size(), [&](std::size_t i) {
        result.entries[i] = fit_local(bb, x, radii[i], fit, defaults, seed, opts.exec);
        advance(opts);
    });
    return result;
}

std::vector<BootstrapSummary> bootstrap_sweep(const BlackBox& bb, const Instance& x, const std::vector<double>& radii,
                                              std::size_t B, std::size_t n, const FitConfig& fit,
                                              const SpecDefaults& defaults, RngSeed seed, const RunOptions& opts)
{
    check_increasing(radii, true, "bootstrap_sweep");
    if (B < 2) {
        throw InvalidArgument("bootstrap_sweep: B must be at least 2");
    }
    if (n == 0) {
        throw InvalidArgument("bootstrap_sweep: n must be positive");
    }
    if (fit.family == Family::tree) {
        throw InvalidArgument("bootstrap_sweep: coefficient statistics need a linear family");
    }
    fit.validate();
    defaults.validate();

    std::vector<BootstrapSummary> out(radii.size());
    for (std::size_t ri = 0; ri < radii.size(); ++ri) {
        out[ri].radius = radii[ri];
        out[ri].B = B;
        out[ri].n = n;
        out[ri].replicates.resize(B);
    }

    SpecDefaults per_replicate = defaults;
    per_replicate.n_samples = n;
    const std::size_t total = radii.size() * B;
    start(opts, total);
    parallel_for(opts.exec, total, [&](std::size_t k) {
        const std::size_t ri = k / B;
        const std::size_t b = k % B;
        const RngSeed rep_seed = bootstrap_replicate_seed(seed, radii[ri], b);
        const auto local = fit_local(bb, x, radii[ri], fit, per_replicate, rep_seed, ExecPolicy::serial());
        const auto& lin = std::get<LinearSurrogate>(local.surrogate);
        out[ri].replicates[b] = BootstrapReplicate{rep_seed, local.fidelity.accuracy, lin.coefficients, lin.intercept};
        advance(opts);
    });

    for (auto& s : out) {
        const std::size_t d = x.dim();
        Welford acc;
        std::vector<Welford> coef(d);
        s.replicate_seeds.reserve(B);
        for (const auto& rep : s.replicates) {
            s.replicate_seeds.push_back(rep.seed);
            acc.push(rep.accuracy);
            for (std::size_t j = 0; j < d; ++j) {
                coef[j].push(rep.coefficients[j]);
            }
        }
        s.accuracy_mean = acc.mean;
        s.accuracy_std = acc.population_std();
        s.coef_mean.resize(d);
        s.coef_std.resize(d);
        for (std::size_t j = 0; j < d; ++j) {
            s.coef_mean[j] = coef[j].mean;
            s.coef_std[j] = coef[j].population_std();
        }
    }
    return out;
}

std::vector<double> log_grid(double lo, double hi, std::size_t count)
{
    if (!(lo > 0.0) || !(hi >= lo) || !std::isfinite(hi) || count == 0 || (count == 1 && lo != hi)) {
        throw InvalidArgument("log_grid: need 0 < lo <= hi and a positive count (count 1 only when lo == hi)");
    }
    if (count == 1) {
        return {lo};
    }
    std::vector<double> grid(count);
    const double a = std::log10(lo);
    const double step = (std::log10(hi) - a) / static_cast<double>(count - 1);
    for (std::size_t i = 0; i < count; ++i) {
        grid[i] = std::pow(10.0, a + step * static_cast<double>(i));
    }
    grid.front() = lo;
    grid.back() = hi;
    return grid;
}

std::vector<double> default_C_grid()
{
    return log_grid(1e-2, 1e4, 40);
}

double LassoPathResult::mean_accuracy() const
{
    if (entries.empty()) {
        return 0.0;
    }
    double sum = 0.0;
    for (const auto& e : entries) {
        sum += e.fidelity.accuracy;
    }
    return sum / static_cast<double>(entries.size());
}

LassoPathResult lasso_path(const BlackBox& bb, const Instance& x, double radius, const std::vector<double>& C_grid,
                           const FitConfig& fit, const SpecDefaults& defaults, RngSeed seed, const ExecPolicy& exec)
{
    if (C_grid.empty()) {
        throw InvalidArgument("lasso_path: C_grid must be non-empty");
    }
    for (std::size_t k = 0; k < C_grid.size(); ++k) {
        if (!(C_grid[k] > 0.0) || !std::isfinite(C_grid[k]) || (k > 0 && !(C_grid[k - 1] < C_grid[k]))) {
            throw InvalidArgument("lasso_path: C_grid must be positive and strictly increasing");
        }
    }
    if (!std::isfinite(radius) || radius < 0.0) {
        throw InvalidArgument("lasso_path: radius must be non-negative");
    }
    defaults.validate();

    FitConfig cfg = fit;
    cfg.family = Family::logistic_l1;
    cfg.C = C_grid.front();
    cfg.validate();

    const NeighbourhoodSpec spec(x, radius, defaults.n_samples, local_train_seed(seed, radius), defaults.kernel_width);
    const auto N = build_neighbourhood(spec, bb, exec);
    const bool fresh = defaults.eval_kind == EvalKind::fresh_neighbourhood;
    std::optional<FeatureMatrix> X_eval;
    std::optional<BinaryLabels> truth;
    if (fresh) {
        X_eval = fresh_eval_set(spec, local_eval_seed(seed, radius), defaults.eval_samples, exec);
        truth = bb.predict(*X_eval);
    }
    const FeatureMatrix& eval_points = fresh ? *X_eval : N.points();
    const BinaryLabels& eval_truth = fresh ? *truth : N.labels();

    LassoPathResult result;
    result.radius = radius;
    result.C_grid = C_grid;
    result.entries.reserve(C_grid.size());
    std::optional<LinearSurrogate> previous;
    for (double C : C_grid) {
        cfg.C = C;
        auto s = fit_logistic_l1(N, cfg, previous ? &*previous : nullptr);
        LassoPathEntry e;
        e.C = C;
        e.coefficients = s.coefficients;
        e.intercept = s.intercept;
        e.fidelity = fidelity_from_labels(eval_truth, surrogate_predict(s, eval_points), defaults.eval_kind);
        e.l0 = std::get<LinearComplexity>(complexity(s)).l0;
        result.entries.push_back(std::move(e));
        previous = std::move(s);
    }
    return result;
}

std::vector<LassoPathResult> lasso_paths(const BlackBox& bb, const Instance& x, const std::vector<double>& radii,
                                         const std::vector<double>& C_grid, const FitConfig& fit,
                                         const SpecDefaults& defaults, RngSeed seed, const RunOptions& opts)
{
    if (radii.empty()) {
        throw InvalidArgument("lasso_paths: radii must be non-empty");
    }
    std::vector<LassoPathResult> out(radii.size());
    start(opts, radii.size());
    parallel_for(opts.exec, radii.size(), [&](std::size_t i) {
        out[i] = lasso_path(bb, x, radii[i], C_grid, fit, defaults, seed, opts.exec);
        advance(opts);
    });
    return out;
}

} // namespace surrscope
