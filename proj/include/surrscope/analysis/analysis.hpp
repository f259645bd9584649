#pragma once

#include <optional>
#include <string>
#include <vector>

#include "surrscope/blackbox/blackbox.hpp"
#include "surrscope/core/types.hpp"
#include "surrscope/data/dataset.hpp"
#include "surrscope/kernels/exec.hpp"
#include "surrscope/metrics/fidelity.hpp"
#include "surrscope/surrogates/surrogate.hpp"

namespace surrscope {

/// Neighbourhood and evaluation settings shared by every analysis.
struct SpecDefaults {
    std::size_t n_samples = kDefaultNeighbourhoodSize;
    std::size_t eval_samples = kDefaultEvalSize;
    std::optional<double> kernel_width;
    /// fresh_neighbourhood or train_neighbourhood.
    EvalKind eval_kind = EvalKind::fresh_neighbourhood;

    void validate() const;

    friend bool operator==(const SpecDefaults&, const SpecDefaults&) = default;
};

struct RunOptions {
    ExecPolicy exec = ExecPolicy::openmp();
    /// Advanced once per finished work item when set.
    ProgressSink* progress = nullptr;
};

/// One surrogate fitted at one radius and its fidelity.
struct LocalFit {
    double radius = 0.0;
    Surrogate surrogate;
    FidelityReport fidelity;
    ComplexityMeasure complexity;
    bool degenerate = false;
    /// Black-box positives among the training neighbourhood.
    std::size_t train_positive = 0;
    std::size_t train_size = 0;

    friend bool operator==(const LocalFit&, const LocalFit&) = default;
};

/// Training and evaluation seeds for radius r under a base seed. They depend
/// on the radius value, so a one-shot fit at r reproduces the sweep entry at r.
RngSeed local_train_seed(RngSeed base, double radius) noexcept;
RngSeed local_eval_seed(RngSeed base, double radius) noexcept;

/// Build the neighbourhood, fit, evaluate.
LocalFit fit_local(const BlackBox& bb, const Instance& x, double radius, const FitConfig& fit,
                   const SpecDefaults& defaults, RngSeed seed, const ExecPolicy& exec = ExecPolicy::openmp());

struct SweepResult {
    std::vector<double> radii;
    std::vector<LocalFit> entries;

    friend bool operator==(const SweepResult&, const SweepResult&) = default;
};

/// radii must be non-empty, positive and strictly increasing.
SweepResult coverage_sweep(const BlackBox& bb, const Instance& x, const std::vector<double>& radii,
                           const FitConfig& fit, const SpecDefaults& defaults, RngSeed seed,
                           const RunOptions& opts = {});

struct BootstrapReplicate {
    RngSeed seed;
    double accuracy = 0.0;
    std::vector<double> coefficients;
    double intercept = 0.0;

    friend bool operator==(const BootstrapReplicate&, const BootstrapReplicate&) = default;
};

/// Mean and population standard deviation over B re-drawn neighbourhoods.
struct BootstrapSummary {
    double radius = 0.0;
    std::size_t B = 0;
    std::size_t n = 0;
    double accuracy_mean = 0.0;
    double accuracy_std = 0.0;
    std::vector<double> coef_mean;
    std::vector<double> coef_std;
    std::vector<RngSeed> replicate_seeds;
    std::vector<BootstrapReplicate> replicates;

    friend bool operator==(const BootstrapSummary&, const BootstrapSummary&) = default;
};

/// Seed of replicate b at radius r. Independent of B, so growing B keeps the
/// earlier replicates.
RngSeed bootstrap_replicate_seed(RngSeed base, double radius, std::size_t b) noexcept;

/// Linear families only. radii must be non-negative and strictly increasing;
/// B >= 2, n >= 1. Each replicate is evaluated on its own fresh sample of
/// defaults.eval_samples points.
std::vector<BootstrapSummary> bootstrap_sweep(const BlackBox& bb, const Instance& x, const std::vector<double>& radii,
                                              std::size_t B, std::size_t n, const FitConfig& fit,
                                              const SpecDefaults& defaults, RngSeed seed,
                                              const RunOptions& opts = {});

struct LassoPathEntry {
    double C = 0.0;
    std::vector<double> coefficients;
    double intercept = 0.0;
    FidelityReport fidelity;
    std::size_t l0 = 0;

    friend bool operator==(const LassoPathEntry&, const LassoPathEntry&) = default;
};

struct LassoPathResult {
    double radius = 0.0;
    std::vector<double> C_grid;
    std::vector<LassoPathEntry> entries;

    double mean_accuracy() const;

    friend bool operator==(const LassoPathResult&, const LassoPathResult&) = default;
};

/// count values log-spaced from lo to hi inclusive.
std::vector<double> log_grid(double lo, double hi, std::size_t count);

/// 40 values from 1e-2 to 1e4.
std::vector<double> default_C_grid();

/// One neighbourhood and one evaluation set per radius; C ascends with each
/// fit warm-started from the previous one. `fit` supplies tol, max_iter and
/// standardize; its family and C are ignored.
LassoPathResult lasso_path(const BlackBox& bb, const Instance& x, double radius, const std::vector<double>& C_grid,
                           const FitConfig& fit, const SpecDefaults& defaults, RngSeed seed,
                           const ExecPolicy& exec = ExecPolicy::openmp());

std::vector<LassoPathResult> lasso_paths(const BlackBox& bb, const Instance& x, const std::vector<double>& radii,
                                         const std::vector<double>& C_grid, const FitConfig& fit,
                                         const SpecDefaults& defaults, RngSeed seed, const RunOptions& opts = {});

struct ParetoPoint {
    double complexity = 0.0;
    double fidelity = 0.0;
    std::string tag;

    friend bool operator==(const ParetoPoint&, const ParetoPoint&) = default;
};

struct ParetoFrontier {
    std::vector<ParetoPoint> points;
    /// Ascending indices into points.
    std::vector<std::size_t> frontier_indices;

    friend bool operator==(const ParetoFrontier&, const ParetoFrontier&) = default;
};

/// Non-dominated points when minimizing complexity and maximizing fidelity.
/// Exact duplicates of a frontier point are kept.
ParetoFrontier pareto_frontier(std::vector<ParetoPoint> points);

/// One point per sweep entry: scalar complexity against accuracy, tagged
/// with the radius.
ParetoFrontier pareto_frontier(const SweepResult& sweep);

struct SignTransition {
    std::size_t feature = 0;
    double radius_from = 0.0;
    double radius_to = 0.0;

    friend bool operator==(const SignTransition&, const SignTransition&) = default;
};

/// Strict sign flips per feature between consecutive non-zero entries
/// (|w| <= 1e-10 counts as zero and is skipped over).
std::vector<SignTransition> sign_transitions(const std::vector<double>& radii,
                                             const std::vector<std::vector<double>>& series);

/// Linear entries of a sweep; tree entries are ignored.
std::vector<SignTransition> sign_transitions(const SweepResult& sweep);

struct LadderRung {
    /// Unset means unconstrained.
    std::optional<std::size_t> max_depth;
    std::size_t depth = 0;
    std::size_t n_leaves = 1;
    FidelityReport fidelity;

    friend bool operator==(const LadderRung&, const LadderRung&) = default;
};

/// Global trees fitted and scored on the same black-box meshgrid. depth_grid
/// is increasing with an unset entry, if any, last.
std::vector<LadderRung> complexity_ladder(const BlackBox& bb, const std::vector<Bounds>& bounds,
                                          const std::vector<std::optional<std::size_t>>& depth_grid,
                                          std::size_t resolution, const RunOptions& opts = {});

} // namespace surrscope
