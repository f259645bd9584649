#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "surrscope/core/types.hpp"

namespace surrscope {

enum class Family { logistic, logistic_l1, tree };

std::string to_string(Family f);
Family family_from_string(const std::string& name);

/// How a surrogate is fitted and how complex it may be.
struct FitConfig {
    Family family = Family::logistic;
    /// Inverse L1 strength; required iff family == logistic_l1.
    std::optional<double> C;
    std::optional<std::size_t> max_depth;
    std::optional<std::size_t> max_leaves;
    double tol = 1e-8;
    std::size_t max_iter = 10000;
    /// Unset means the family default: on for logistic_l1, off otherwise.
    std::optional<bool> standardize;

    bool effective_standardize() const noexcept { return standardize.value_or(family == Family::logistic_l1); }
    void validate() const;

    friend bool operator==(const FitConfig&, const FitConfig&) = default;
};

/// Coefficients are in the original feature units.
struct LinearSurrogate {
    std::vector<double> coefficients;
    double intercept = 0.0;
    std::optional<double> C;
    /// All training labels were one class; the model is a constant.
    bool degenerate = false;
    std::size_t iterations = 0;
    double objective = 0.0;
    bool converged = false;

    friend bool operator==(const LinearSurrogate&, const LinearSurrogate&) = default;
};

/// Internal nodes have feature >= 0 and route x[feature] <= threshold to
/// `left`; leaves have feature == -1 and carry `label`.
struct TreeNode {
    int feature = -1;
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    std::uint8_t label = 0;

    bool is_leaf() const noexcept { return feature < 0; }

    friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

/// Binary classification tree; nodes[0] is the root.
struct TreeSurrogate {
    std::size_t n_features = 0;
    std::vector<TreeNode> nodes;
    std::size_t depth = 0;
    std::size_t n_leaves = 1;
    bool degenerate = false;

    /// Checks structure (reachability, no cycles, leaf count) and that depth
    /// and n_leaves match the node array.
    void validate() const;

    friend bool operator==(const TreeSurrogate&, const TreeSurrogate&) = default;
};

using Surrogate = std::variant<LinearSurrogate, TreeSurrogate>;

struct LinearComplexity {
    /// Coefficients with |w| > 1e-10.
    std::size_t l0 = 0;
    friend bool operator==(const LinearComplexity&, const LinearComplexity&) = default;
};

struct TreeComplexity {
    std::size_t depth = 0;
    std::size_t n_leaves = 1;
    friend bool operator==(const TreeComplexity&, const TreeComplexity&) = default;
};

using ComplexityMeasure = std::variant<LinearComplexity, TreeComplexity>;

/// Magnitude below which a coefficient counts as zero.
inline constexpr double kZeroCoefficient = 1e-10;

ComplexityMeasure complexity(const Surrogate& s);
ComplexityMeasure complexity(const LinearSurrogate& s);
ComplexityMeasure complexity(const TreeSurrogate& s);

/// One number per surrogate for frontier plots: l0 for linear models, leaf
/// count for trees.
double scalar_complexity(const ComplexityMeasure& c) noexcept;

bool is_degenerate(const Surrogate& s) noexcept;

/// Linear: 1 iff w.x + b > 0. Tree: root-to-leaf routing.
BinaryLabels surrogate_predict(const Surrogate& s, const FeatureMatrix& X);
BinaryLabels surrogate_predict(const LinearSurrogate& s, const FeatureMatrix& X);
BinaryLabels surrogate_predict(const TreeSurrogate& s, const FeatureMatrix& X);

/// Borrowed training data. Empty weights means every sample weighs 1.
struct TrainingView {
    const FeatureMatrix& X;
    const BinaryLabels& y;
    std::span<const double> weights;

    static TrainingView of(const Neighbourhood& n);
};

/// Per-iteration record of the objective, first entry at the starting point.
struct SolverTrace {
    std::vector<double> objective;
};

/// Unpenalized maximum likelihood by damped Newton. On separable data the
/// coefficients grow until the gradient falls below cfg.tol.
LinearSurrogate fit_logistic(const TrainingView& data, const FitConfig& cfg, SolverTrace* trace = nullptr);
LinearSurrogate fit_logistic(const Neighbourhood& N, const FitConfig& cfg, SolverTrace* trace = nullptr);

/// Minimizes mean logistic loss + (1/C) * ||w||_1 (intercept unpenalized) by
/// proximal gradient with backtracking. `warm_start` seeds the solver with a
/// previous solution on the same features.
LinearSurrogate fit_logistic_l1(const TrainingView& data, const FitConfig& cfg,
                                const LinearSurrogate* warm_start = nullptr, SolverTrace* trace = nullptr);
LinearSurrogate fit_logistic_l1(const Neighbourhood& N, const FitConfig& cfg,
                                const LinearSurrogate* warm_start = nullptr, SolverTrace* trace = nullptr);

/// Greedy CART on weighted Gini impurity. Depth-first growth, or best-first
/// when cfg.max_leaves is set.
TreeSurrogate fit_tree(const TrainingView& data, const FitConfig& cfg);
TreeSurrogate fit_tree(const Neighbourhood& N, const FitConfig& cfg);

/// Dispatches on cfg.family.
Surrogate fit_surrogate(const Neighbourhood& N, const FitConfig& cfg);

/// sign(w) * max(|w| - threshold, 0).
double soft_threshold(double w, double threshold) noexcept;

/// Weighted mean logistic loss and its gradient in original units, with no
/// penalty. Used by the solvers' tests as the function under check.
struct LogisticLoss {
    double value = 0.0;
    std::vector<double> grad_coefficients;
    double grad_intercept = 0.0;
};

LogisticLoss logistic_loss(const TrainingView& data, std::span<const double> coefficients, double intercept);

} // namespace surrscope
