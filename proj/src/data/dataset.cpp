#include "surrscope/data/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>
#include <sstream>

#include "surrscope/core/error.hpp"
#include "surrscope/core/rng.hpp"

namespace surrscope {

namespace {

std::vector<Bounds> column_bounds(const FeatureMatrix& X)
{
    std::vector<Bounds> out(X.cols());
    if (X.rows() == 0) {
        return out;
    }
    for (std::size_t j = 0; j < X.cols(); ++j) {
        out[j] = {X.at(0, j), X.at(0, j)};
    }
    for (std::size_t i = 1; i < X.rows(); ++i) {
        for (std::size_t j = 0; j < X.cols(); ++j) {
            out[j].min = std::min(out[j].min, X.at(i, j));
            out[j].max = std::max(out[j].max, X.at(i, j));
        }
    }
    return out;
}

std::vector<double> linspace(double lo, double hi, std::size_t n, bool endpoint)
{
    std::vector<double> out(n);
    const double div = endpoint ? static_cast<double>(n > 1 ? n - 1 : 1) : static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = lo + (hi - lo) * static_cast<double>(i) / div;
    }
    return out;
}

// Assembles a two-class 2-D dataset from clean coordinates, adds noise, and
// shuffles rows with a Fisher-Yates pass.
Dataset finish_2d(std::vector<double> xy, std::vector<std::uint8_t> labels, double noise, RngSeed seed)
{
    const std::size_t n = labels.size();
    if (noise > 0.0) {
        RandomStream noise_rng(seed, "dataset.noise");
        for (double& v : xy) {
            v += noise * noise_rng.normal();
        }
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    RandomStream shuffle_rng(seed, "dataset.shuffle");
    for (std::size_t i = n; i > 1; --i) {
        std::swap(order[i - 1], order[shuffle_rng.below(i)]);
    }
    std::vector<double> X(2 * n);
    std::vector<std::uint8_t> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        X[2 * i] = xy[2 * order[i]];
        X[2 * i + 1] = xy[2 * order[i] + 1];
        y[i] = labels[order[i]];
    }
    return Dataset(FeatureMatrix(n, 2, std::move(X)), BinaryLabels(std::move(y)), {"x0", "x1"});
}

std::vector<std::string> split_csv_line(const std::string& line)
{
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) {
        cells.push_back(cell);
    }
    if (!line.empty() && line.back() == ',') {
        cells.emplace_back();
    }
    return cells;
}

std::string trim(std::string s)
{
    const auto not_space = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    return s;
}

} // namespace

Dataset::Dataset(FeatureMatrix X, BinaryLabels y, std::vector<std::string> feature_names)
    : X_(std::move(X)), y_(std::move(y)), feature_names_(std::move(feature_names))
{
    if (X_.rows() != y_.size()) {
        throw InvalidArgument("Dataset: X rows and label count differ");
    }
    if (feature_names_.size() != X_.cols()) {
        throw InvalidArgument("Dataset: one feature name per column required");
    }
    bounds_ = column_bounds(X_);
}

Instance Dataset::row_instance(std::size_t i) const
{
    if (i >= size()) {
        throw InvalidArgument("Dataset: row index " + std::to_string(i) + " out of range (size "
                              + std::to_string(size()) + ")");
    }
    auto r = X_.row(i);
    return Instance(std::vector<double>(r.begin(), r.end()));
}

Dataset make_moons(std::size_t n, double noise, RngSeed seed)
{
    if (n < 2) {
        throw InvalidArgument("make_moons: n must be >= 2");
    }
    if (!(noise >= 0.0) || !std::isfinite(noise)) {
        throw InvalidArgument("make_moons: noise must be finite and >= 0");
    }
    const std::size_t n_outer = n / 2;
    const std::size_t n_inner = n - n_outer;
    std::vector<double> xy;
    std::vector<std::uint8_t> y;
    xy.reserve(2 * n);
    y.reserve(n);
    for (double t : linspace(0.0, std::numbers::pi, n_outer, true)) {
        xy.push_back(std::cos(t));
        xy.push_back(std::sin(t));
        y.push_back(0);
    }
    for (double t : linspace(0.0, std::numbers::pi, n_inner, true)) {
        xy.push_back(1.0 - std::cos(t));
        xy.push_back(1.0 - std::sin(t) - 0.5);
        y.push_back(1);
    }
    return finish_2d(std::move(xy), std::move(y), noise, seed);
}

Dataset make_circles(std::size_t n, double noise, double factor, RngSeed seed)
{
    if (n < 2) {
        throw InvalidArgument("make_circles: n must be >= 2");
    }
    if (!(factor > 0.0 && factor < 1.0)) {
        throw InvalidArgument("make_circles: factor must lie in (0, 1)");
    }
    if (!(noise >= 0.0) || !std::isfinite(noise)) {
        throw InvalidArgument("make_circles: noise must be finite and >= 0");
    }
    const std::size_t n_outer = n / 2;
    const std::size_t n_inner = n - n_outer;
    std::vector<double> xy;
    std::vector<std::uint8_t> y;
    xy.reserve(2 * n);
    y.reserve(n);
    for (double t : linspace(0.0, 2.0 * std::numbers::pi, n_outer, false)) {
        xy.push_back(std::cos(t));
        xy.push_back(std::sin(t));
        y.push_back(0);
    }
    for (double t : linspace(0.0, 2.0 * std::numbers::pi, n_inner, false)) {
        xy.push_back(factor * std::cos(t));
        xy.push_back(factor * std::sin(t));
        y.push_back(1);
    }
    return finish_2d(std::move(xy), std::move(y), noise, seed);
}

double median(std::vector<double> values)
{
    if (values.empty()) {
        throw InvalidArgument("median: empty input");
    }
    std::sort(values.begin(), values.end());
    const std::size_t m = values.size() / 2;
    return values.size() % 2 == 1 ? values[m] : 0.5 * (values[m - 1] + values[m]);
}

Dataset load_csv_binary(const std::filesystem::path& path, const std::string& target_column,
                        const Threshold& threshold)
{
    std::ifstream in(path);
    if (!in) {
        throw DataError(DataError::Kind::file_not_found, "cannot open CSV file: " + path.string());
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw DataError(DataError::Kind::malformed, "CSV file has no header row: " + path.string());
    }
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    std::vector<std::string> header = split_csv_line(line);
    for (auto& h : header) {
        h = trim(h);
    }
    const auto target_it = std::find(header.begin(), header.end(), target_column);
    if (target_it == header.end()) {
        throw DataError(DataError::Kind::missing_column, "target column '" + target_column + "' not in header");
    }
    const std::size_t target_idx = static_cast<std::size_t>(target_it - header.begin());
    if (header.size() < 2) {
        throw DataError(DataError::Kind::malformed, "CSV needs at least one feature column besides the target");
    }

    std::vector<double> features;
    std::vector<double> targets;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (trim(line).empty()) {
            continue;
        }
        const auto cells = split_csv_line(line);
        if (cells.size() != header.size()) {
            throw DataError(DataError::Kind::malformed,
                            "line " + std::to_string(line_no) + ": expected " + std::to_string(header.size())
                                + " cells, found " + std::to_string(cells.size()));
        }
        for (std::size_t j = 0; j < cells.size(); ++j) {
            const std::string cell = trim(cells[j]);
            double v = 0.0;
            const char* first = cell.data();
            const char* last = cell.data() + cell.size();
            if (!cell.empty() && *first == '+') {
                ++first;
            }
            const auto [ptr, ec] = std::from_chars(first, last, v);
            if (cell.empty() || ec != std::errc{} || ptr != last || !std::isfinite(v)) {
                throw DataError(DataError::Kind::non_numeric_cell, "line " + std::to_string(line_no) + ", column '"
                                                                       + header[j] + "': not a number: '" + cell + "'");
            }
            (j == target_idx ? targets : features).push_back(v);
        }
    }
    if (targets.empty()) {
        throw DataError(DataError::Kind::malformed, "CSV file has no data rows: " + path.string());
    }

    const double cut = std::holds_alternative<MedianThreshold>(threshold) ? median(targets)
                                                                          : std::get<double>(threshold);
    std::vector<std::uint8_t> labels(targets.size());
    std::transform(targets.begin(), targets.end(), labels.begin(),
                   [cut](double t) { return static_cast<std::uint8_t>(t > cut ? 1 : 0); });

    std::vector<std::string> names;
    for (std::size_t j = 0; j < header.size(); ++j) {
        if (j != target_idx) {
            names.push_back(header[j]);
        }
    }
    FeatureMatrix X(targets.size(), names.size(), std::move(features));
    return Dataset(std::move(X), BinaryLabels(std::move(labels)), std::move(names));
}

} // namespace surrscope
