#pragma once

#include <vector>

#include "surrscope/blackbox/blackbox.hpp"
#include "surrscope/core/types.hpp"
#include "surrscope/kernels/exec.hpp"

namespace surrscope {

/// spec.n_samples() points uniform in the closed L2 ball of spec.radius()
/// around spec.center(). Direction is a normalized standard Gaussian,
/// distance is radius * U^(1/d).
FeatureMatrix sample_ball(const NeighbourhoodSpec& spec, const ExecPolicy& exec = ExecPolicy::openmp());

/// w_i = exp(-dist(point_i, center)^2 / width^2).
std::vector<double> kernel_weights(const FeatureMatrix& points, const Instance& center, double width,
                                   const ExecPolicy& exec = ExecPolicy::openmp());

/// Sample, label with the black-box, and weight when the spec asks for it.
Neighbourhood build_neighbourhood(const NeighbourhoodSpec& spec, const BlackBox& bb,
                                  const ExecPolicy& exec = ExecPolicy::openmp());

} // namespace surrscope
