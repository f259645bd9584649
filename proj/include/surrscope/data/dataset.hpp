#pragma once

#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "surrscope/core/types.hpp"

namespace surrscope {

struct Bounds {
    double min = 0.0;
    double max = 0.0;

    friend bool operator==(const Bounds&, const Bounds&) = default;
};

/// Labelled samples the black-box is trained on. Bounds are the empirical
/// per-column extrema of X.
class Dataset {
public:
    Dataset(FeatureMatrix X, BinaryLabels y, std::vector<std::string> feature_names);

    const FeatureMatrix& X() const noexcept { return X_; }
    const BinaryLabels& y() const noexcept { return y_; }
    const std::vector<std::string>& feature_names() const noexcept { return feature_names_; }
    const std::vector<Bounds>& bounds() const noexcept { return bounds_; }
    std::size_t size() const noexcept { return y_.size(); }
    std::size_t dim() const noexcept { return X_.cols(); }

    Instance row_instance(std::size_t i) const;

    friend bool operator==(const Dataset&, const Dataset&) = default;

private:
    FeatureMatrix X_;
    BinaryLabels y_;
    std::vector<std::string> feature_names_;
    std::vector<Bounds> bounds_;
};

/// Two interleaving half circles: class 0 on the upper unit arc, class 1 on
/// the lower arc shifted by (1, 0.5). Gaussian noise of standard deviation
/// `noise` is added to both coordinates. Rows are shuffled.
Dataset make_moons(std::size_t n, double noise, RngSeed seed);

/// Class 0 on the unit circle, class 1 on the circle of radius `factor`.
Dataset make_circles(std::size_t n, double noise, double factor, RngSeed seed);

struct MedianThreshold {};
using Threshold = std::variant<MedianThreshold, double>;

/// Reads a numeric CSV with a header row. label = 1 iff target > threshold
/// (samples equal to the median get label 0); the other columns become
/// features in header order.
Dataset load_csv_binary(const std::filesystem::path& path, const std::string& target_column,
                        const Threshold& threshold);

/// Median with the average-of-middle-pair convention for even counts.
double median(std::vector<double> values);

} // namespace surrscope
