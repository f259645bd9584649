#include "surrscope/sampling/sampling.hpp"

#include <cmath>

#include "surrscope/core/error.hpp"
#include "surrscope/kernels/kernels.hpp"

namespace surrscope {

FeatureMatrix sample_ball(const NeighbourhoodSpec& spec, const ExecPolicy& exec)
{
    return kernels::sample_ball(spec.center().values(), spec.radius(), spec.n_samples(), spec.seed(), exec);
}

std::vector<double> kernel_weights(const FeatureMatrix& points, const Instance& center, double width,
                                   const ExecPolicy& exec)
{
    if (!(width > 0.0) || !std::isfinite(width)) {
        throw InvalidArgument("kernel_weights: width must be positive");
    }
    if (points.cols() != center.dim()) {
        throw DimensionMismatch("kernel_weights: point and center dimensions differ");
    }
    return kernels::kernel_weights(points, center.values(), width, exec);
}

Neighbourhood build_neighbourhood(const NeighbourhoodSpec& spec, const BlackBox& bb, const ExecPolicy& exec)
{
    if (spec.center().dim() != bb.input_dim()) {
        throw DimensionMismatch("build_neighbourhood: instance has " + std::to_string(spec.center().dim())
                                + " features, black-box expects " + std::to_string(bb.input_dim()));
    }
    auto points = sample_ball(spec, exec);
    auto labels = bb.predict(points);
    std::optional<std::vector<double>> weights;
    if (spec.kernel_width()) {
        weights = kernel_weights(points, spec.center(), *spec.kernel_width(), exec);
    }
    return Neighbourhood(spec, std::move(points), std::move(labels), std::move(weights));
}

} // namespace surrscope
