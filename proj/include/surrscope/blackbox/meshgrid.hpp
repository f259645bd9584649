#pragma once

#include <vector>

#include "surrscope/blackbox/blackbox.hpp"
#include "surrscope/data/dataset.hpp"

namespace surrscope {

/// A 2-D axis-aligned lattice and the black-box labels on it. Point
/// (ix, iy) is row iy * resolution + ix; both bound endpoints are included.
struct EvalGrid {
    std::vector<Bounds> bounds;
    std::size_t resolution = 0;
    FeatureMatrix points;
    BinaryLabels labels;

    friend bool operator==(const EvalGrid&, const EvalGrid&) = default;
};

/// The lattice alone, for evaluating other models on the same points.
FeatureMatrix meshgrid_points(const std::vector<Bounds>& bounds, std::size_t resolution);

EvalGrid meshgrid_predict(const BlackBox& bb, const std::vector<Bounds>& bounds, std::size_t resolution);

} // namespace surrscope
