#include "surrscope/blackbox/meshgrid.hpp"

#include <cmath>

#include "surrscope/core/error.hpp"

namespace surrscope {

namespace {

double lattice(const Bounds& b, std::size_t i, std::size_t resolution)
{
    if (i + 1 == resolution) {
        return b.max;
    }
    return b.min + (b.max - b.min) * static_cast<double>(i) / static_cast<double>(resolution - 1);
}

} // namespace

FeatureMatrix meshgrid_points(const std::vector<Bounds>& bounds, std::size_t resolution)
{
    if (bounds.size() != 2) {
        throw DimensionMismatch("meshgrid: only 2-D bounds are supported");
    }
    if (resolution < 2) {
        throw InvalidArgument("meshgrid: resolution must be >= 2");
    }
    for (const auto& b : bounds) {
        if (!std::isfinite(b.min) || !std::isfinite(b.max) || b.min > b.max) {
            throw InvalidArgument("meshgrid: bounds must be finite with min <= max");
        }
    }
    std::vector<double> data;
    data.reserve(2 * resolution * resolution);
    for (std::size_t iy = 0; iy < resolution; ++iy) {
        for (std::size_t ix = 0; ix < resolution; ++ix) {
            data.push_back(lattice(bounds[0], ix, resolution));
            data.push_back(lattice(bounds[1], iy, resolution));
        }
    }
    return FeatureMatrix(resolution * resolution, 2, std::move(data));
}

EvalGrid meshgrid_predict(const BlackBox& bb, const std::vector<Bounds>& bounds, std::size_t resolution)
{
    if (bb.input_dim() != 2) {
        throw DimensionMismatch("meshgrid_predict: black-box must take 2 features");
    }
    auto points = meshgrid_points(bounds, resolution);
    auto labels = bb.predict(points);
    return EvalGrid{bounds, resolution, std::move(points), std::move(labels)};
}

} // namespace surrscope
