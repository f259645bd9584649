#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace surrscope {

/// 64-bit seed. Every stochastic operation is a pure function of the seed it
/// receives; see rng.hpp for how per-operation streams are derived.
struct RngSeed {
    std::uint64_t value = 0;

    friend bool operator==(RngSeed, RngSeed) = default;
};

/// A single feature vector (the instance being explained, a ball center, ...).
/// Non-empty and finite.
class Instance {
public:
    explicit Instance(std::vector<double> values);

    std::size_t dim() const noexcept { return values_.size(); }
    std::span<const double> values() const noexcept { return values_; }
    double operator[](std::size_t j) const { return values_[j]; }

    friend bool operator==(const Instance&, const Instance&) = default;

private:
    std::vector<double> values_;
};

/// Row-major matrix of samples. Zero rows are allowed, zero columns are not.
class FeatureMatrix {
public:
    FeatureMatrix(std::size_t rows, std::size_t cols, std::vector<double> data);

    /// Every row is a copy of `row`.
    static FeatureMatrix repeat(std::span<const double> row, std::size_t times);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::span<const double> data() const noexcept { return data_; }
    std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }
    double at(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    /// Rows `order[0], order[1], ...` of this matrix.
    FeatureMatrix select_rows(std::span<const std::size_t> order) const;

    friend bool operator==(const FeatureMatrix&, const FeatureMatrix&) = default;

private:
    std::size_t rows_;
    std::size_t cols_;
    std::vector<double> data_;
};

/// Hard labels over {0, 1}; class 1 is the positive class.
class BinaryLabels {
public:
    BinaryLabels() = default;
    explicit BinaryLabels(std::vector<std::uint8_t> values);

    std::size_t size() const noexcept { return values_.size(); }
    bool empty() const noexcept { return values_.empty(); }
    std::span<const std::uint8_t> values() const noexcept { return values_; }
    std::uint8_t operator[](std::size_t i) const { return values_[i]; }
    std::size_t count_positive() const noexcept;

    friend bool operator==(const BinaryLabels&, const BinaryLabels&) = default;

private:
    std::vector<std::uint8_t> values_;
};

/// Default neighbourhood size used throughout the experiments.
inline constexpr std::size_t kDefaultNeighbourhoodSize = 2000;

/// A hypersphere of `radius` around `center` from which `n_samples` points are
/// drawn. When `kernel_width` is set, neighbourhoods built from this spec carry
/// distance-kernel weights.
class NeighbourhoodSpec {
public:
    NeighbourhoodSpec(Instance center, double radius, std::size_t n_samples, RngSeed seed,
                      std::optional<double> kernel_width = std::nullopt);

    const Instance& center() const noexcept { return center_; }
    double radius() const noexcept { return radius_; }
    std::size_t n_samples() const noexcept { return n_samples_; }
    RngSeed seed() const noexcept { return seed_; }
    const std::optional<double>& kernel_width() const noexcept { return kernel_width_; }

    NeighbourhoodSpec with_seed(RngSeed seed) const;
    NeighbourhoodSpec with_size(std::size_t n_samples) const;

    friend bool operator==(const NeighbourhoodSpec&, const NeighbourhoodSpec&) = default;

private:
    Instance center_;
    double radius_;
    std::size_t n_samples_;
    RngSeed seed_;
    std::optional<double> kernel_width_;
};

/// Sampled points with their black-box labels and optional kernel weights.
class Neighbourhood {
public:
    Neighbourhood(NeighbourhoodSpec spec, FeatureMatrix points, BinaryLabels labels,
                  std::optional<std::vector<double>> weights = std::nullopt);

    const NeighbourhoodSpec& spec() const noexcept { return spec_; }
    const FeatureMatrix& points() const noexcept { return points_; }
    const BinaryLabels& labels() const noexcept { return labels_; }
    const std::optional<std::vector<double>>& weights() const noexcept { return weights_; }
    std::size_t size() const noexcept { return labels_.size(); }

    friend bool operator==(const Neighbourhood&, const Neighbourhood&) = default;

private:
    NeighbourhoodSpec spec_;
    FeatureMatrix points_;
    BinaryLabels labels_;
    std::optional<std::vector<double>> weights_;
};

/// Euclidean distance between two equally sized vectors.
double euclidean_distance(std::span<const double> a, std::span<const double> b);

} // namespace surrscope
