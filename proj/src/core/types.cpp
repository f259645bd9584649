#include "surrscope/core/types.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "surrscope/core/error.hpp"

namespace surrscope {

namespace {

bool all_finite(std::span<const double> xs)
{
    return std::all_of(xs.begin(), xs.end(), [](double v) { return std::isfinite(v); });
}

} // namespace

Instance::Instance(std::vector<double> values) : values_(std::move(values))
{
    if (values_.empty()) {
        throw InvalidArgument("Instance: dimension must be positive");
    }
    if (!all_finite(values_)) {
        throw InvalidArgument("Instance: values must be finite");
    }
}

FeatureMatrix::FeatureMatrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data))
{
    if (cols_ == 0) {
        throw InvalidArgument("FeatureMatrix: column count must be positive");
    }
    if (rows_ * cols_ != data_.size()) {
        throw InvalidArgument("FeatureMatrix: rows*cols (" + std::to_string(rows_ * cols_)
                              + ") does not match data length (" + std::to_string(data_.size()) + ")");
    }
    if (!all_finite(data_)) {
        throw InvalidArgument("FeatureMatrix: values must be finite");
    }
}

FeatureMatrix FeatureMatrix::repeat(std::span<const double> row, std::size_t times)
{
    std::vector<double> data;
    data.reserve(row.size() * times);
    for (std::size_t i = 0; i < times; ++i) {
        data.insert(data.end(), row.begin(), row.end());
    }
    return FeatureMatrix(times, row.size(), std::move(data));
}

FeatureMatrix FeatureMatrix::select_rows(std::span<const std::size_t> order) const
{
    std::vector<double> out;
    out.reserve(order.size() * cols_);
    for (auto i : order) {
        if (i >= rows_) {
            throw InvalidArgument("FeatureMatrix::select_rows: row index out of range");
        }
        auto r = row(i);
        out.insert(out.end(), r.begin(), r.end());
    }
    return FeatureMatrix(order.size(), cols_, std::move(out));
}

BinaryLabels::BinaryLabels(std::vector<std::uint8_t> values) : values_(std::move(values))
{
    if (std::any_of(values_.begin(), values_.end(), [](std::uint8_t v) { return v > 1; })) {
        throw InvalidArgument("BinaryLabels: entries must be 0 or 1");
    }
}

std::size_t BinaryLabels::count_positive() const noexcept
{
    return static_cast<std::size_t>(std::count(values_.begin(), values_.end(), std::uint8_t{1}));
}

NeighbourhoodSpec::NeighbourhoodSpec(Instance center, double radius, std::size_t n_samples, RngSeed seed,
                                     std::optional<double> kernel_width)
    : center_(std::move(center)), radius_(radius), n_samples_(n_samples), seed_(seed),
      kernel_width_(kernel_width)
{
    if (!std::isfinite(radius_) || radius_ < 0.0) {
        throw InvalidArgument("NeighbourhoodSpec: radius must be finite and >= 0");
    }
    if (n_samples_ < 1) {
        throw InvalidArgument("NeighbourhoodSpec: n_samples must be >= 1");
    }
    if (kernel_width_ && !(std::isfinite(*kernel_width_) && *kernel_width_ > 0.0)) {
        throw InvalidArgument("NeighbourhoodSpec: kernel_width must be a positive finite number");
    }
}

NeighbourhoodSpec NeighbourhoodSpec::with_seed(RngSeed seed) const
{
    return NeighbourhoodSpec(center_, radius_, n_samples_, seed, kernel_width_);
}

NeighbourhoodSpec NeighbourhoodSpec::with_size(std::size_t n_samples) const
{
    return NeighbourhoodSpec(center_, radius_, n_samples, seed_, kernel_width_);
}

Neighbourhood::Neighbourhood(NeighbourhoodSpec spec, FeatureMatrix points, BinaryLabels labels,
                             std::optional<std::vector<double>> weights)
    : spec_(std::move(spec)), points_(std::move(points)), labels_(std::move(labels)), weights_(std::move(weights))
{
    if (points_.rows() != spec_.n_samples() || labels_.size() != spec_.n_samples()) {
        throw InvalidArgument("Neighbourhood: points, labels and n_samples must agree");
    }
    if (points_.cols() != spec_.center().dim()) {
        throw DimensionMismatch("Neighbourhood: point dimension differs from center dimension");
    }
    const double limit = spec_.radius();
    for (std::size_t i = 0; i < points_.rows(); ++i) {
        if (euclidean_distance(points_.row(i), spec_.center().values()) > limit) {
            throw InvalidArgument("Neighbourhood: point " + std::to_string(i) + " lies outside the ball");
        }
    }
    if (weights_) {
        if (weights_->size() != labels_.size()) {
            throw InvalidArgument("Neighbourhood: weight count differs from sample count");
        }
        for (double w : *weights_) {
            if (!(w > 0.0 && w <= 1.0)) {
                throw InvalidArgument("Neighbourhood: weights must lie in (0, 1]");
            }
        }
    }
}

double euclidean_distance(std::span<const double> a, std::span<const double> b)
{
    if (a.size() != b.size()) {
        throw DimensionMismatch("euclidean_distance: operand sizes differ");
    }
    double acc = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        const double d = a[j] - b[j];
        acc += d * d;
    }
    return std::sqrt(acc);
}

} // namespace surrscope
