#pragma once

#include <optional>
#include <string>

#include "surrscope/blackbox/blackbox.hpp"
#include "surrscope/core/types.hpp"
#include "surrscope/kernels/exec.hpp"
#include "surrscope/surrogates/surrogate.hpp"

namespace surrscope {

enum class EvalKind { train_neighbourhood, fresh_neighbourhood, meshgrid };

std::string to_string(EvalKind k);
EvalKind eval_kind_from_string(const std::string& name);

struct ConfusionCounts {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t tn = 0;
    std::size_t fn = 0;

    friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

/// Agreement of a surrogate with the black-box. Class 1 is positive. A rate
/// whose denominator is zero is absent, not zero.
struct FidelityReport {
    double accuracy = 0.0;
    std::optional<double> tpr;
    std::optional<double> tnr;
    ConfusionCounts counts;
    std::size_t n_eval = 0;
    EvalKind eval_kind = EvalKind::fresh_neighbourhood;

    friend bool operator==(const FidelityReport&, const FidelityReport&) = default;
};

/// Report from raw label vectors: `truth` from the black-box, `predicted`
/// from the surrogate.
FidelityReport fidelity_from_labels(const BinaryLabels& truth, const BinaryLabels& predicted, EvalKind kind);

FidelityReport evaluate(const Surrogate& s, const BlackBox& bb, const FeatureMatrix& X_eval, EvalKind kind);

/// Default size of a fresh evaluation sample.
inline constexpr std::size_t kDefaultEvalSize = 2000;

/// Independent uniform-ball sample over the same ball as `spec`, drawn from
/// the stream derived from (eval_seed, "fresh_eval"), which never coincides
/// with a training stream.
FeatureMatrix fresh_eval_set(const NeighbourhoodSpec& spec, RngSeed eval_seed, std::size_t size = kDefaultEvalSize,
                             const ExecPolicy& exec = ExecPolicy::openmp());

} // namespace surrscope
