#pragma once

// Data-parallel kernels. Each has a plain serial reference in
// `kernels::reference` that the tests hold the parallel version to, bit for
// bit, and that bench/ times against it.

#include <vector>

#include "surrscope/blackbox/mlp.hpp"
#include "surrscope/core/types.hpp"
#include "surrscope/kernels/exec.hpp"

namespace surrscope::kernels {

/// Pre-sigmoid network output for every row of X. Rows are processed in
/// blocks so each layer's weights stay hot across a block.
std::vector<double> mlp_logits(const MlpWeights& net, const FeatureMatrix& X, const ExecPolicy& exec);

/// n points uniform in the closed ball. Row i draws only from substream i of
/// the (seed, "sample_ball") stream, so rows can be produced in any order.
FeatureMatrix sample_ball(std::span<const double> center, double radius, std::size_t n, RngSeed seed,
                          const ExecPolicy& exec);

/// exp(-dist^2 / width^2) per row, floored at the smallest normal double.
std::vector<double> kernel_weights(const FeatureMatrix& points, std::span<const double> center, double width,
                                   const ExecPolicy& exec);

namespace reference {

std::vector<double> mlp_logits(const MlpWeights& net, const FeatureMatrix& X);

FeatureMatrix sample_ball(std::span<const double> center, double radius, std::size_t n, RngSeed seed);

std::vector<double> kernel_weights(const FeatureMatrix& points, std::span<const double> center, double width);

} // namespace reference

} // namespace surrscope::kernels
