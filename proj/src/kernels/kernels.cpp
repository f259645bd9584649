#include "surrscope/kernels/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "surrscope/core/error.hpp"
#include "surrscope/core/rng.hpp"

namespace surrscope::kernels {

namespace {

constexpr std::size_t kRowBlock = 64;

inline double activate(Activation a, double z) noexcept
{
    return a == Activation::tanh ? std::tanh(z) : (z > 0.0 ? z : 0.0);
}

// One uniform-in-ball draw: Gaussian direction, radius * U^(1/d) distance.
inline void draw_ball_point(RandomStream stream, std::span<const double> center, double radius, double* out)
{
    const std::size_t d = center.size();
    double norm2 = 0.0;
    do {
        norm2 = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            out[j] = stream.normal();
            norm2 += out[j] * out[j];
        }
    } while (norm2 == 0.0);
    const double rho = radius * std::pow(stream.uniform(), 1.0 / static_cast<double>(d));
    double scale = rho / std::sqrt(norm2);
    // Rounding can put a point a few ulps past the sphere; pull it back so
    // that containment holds exactly under the distance used everywhere else.
    for (;;) {
        double dist2 = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            const double diff = (center[j] + scale * out[j]) - center[j];
            dist2 += diff * diff;
        }
        if (std::sqrt(dist2) <= radius) {
            break;
        }
        scale *= 1.0 - 0x1p-50;
    }
    for (std::size_t j = 0; j < d; ++j) {
        out[j] = center[j] + scale * out[j];
    }
}

inline double kernel_weight(std::span<const double> point, std::span<const double> center, double width) noexcept
{
    double dist2 = 0.0;
    for (std::size_t j = 0; j < point.size(); ++j) {
        const double d = point[j] - center[j];
        dist2 += d * d;
    }
    return std::max(std::exp(-dist2 / (width * width)), std::numeric_limits<double>::min());
}

void check_net_input(const MlpWeights& net, const FeatureMatrix& X)
{
    if (X.cols() != net.input_dim()) {
        throw DimensionMismatch("mlp_logits: expected " + std::to_string(net.input_dim()) + " features, got "
                                + std::to_string(X.cols()));
    }
}

} // namespace

std::vector<double> mlp_logits(const MlpWeights& net, const FeatureMatrix& X, const ExecPolicy& exec)
{
    check_net_input(net, X);
    const std::size_t n = X.rows();
    const std::size_t d = X.cols();
    std::size_t widest = d;
    for (const auto& layer : net.layers) {
        widest = std::max(widest, layer.out);
    }
    std::vector<double> logits(n);
    const std::size_t blocks = (n + kRowBlock - 1) / kRowBlock;

    parallel_for(exec, blocks, [&](std::size_t b) {
        const std::size_t r0 = b * kRowBlock;
        const std::size_t rows = std::min(kRowBlock, n - r0);
        std::vector<double> cur(rows * widest);
        std::vector<double> next(rows * widest);
        for (std::size_t r = 0; r < rows; ++r) {
            const auto x = X.row(r0 + r);
            for (std::size_t j = 0; j < d; ++j) {
                cur[r * widest + j] = (x[j] - net.input_mean[j]) / net.input_scale[j];
            }
        }
        for (std::size_t l = 0; l < net.layers.size(); ++l) {
            const auto& layer = net.layers[l];
            const bool hidden = l + 1 < net.layers.size();
            for (std::size_t o = 0; o < layer.out; ++o) {
                const double* w = layer.weights.data() + o * layer.in;
                for (std::size_t r = 0; r < rows; ++r) {
                    const double* a = cur.data() + r * widest;
                    double acc = layer.bias[o];
                    for (std::size_t k = 0; k < layer.in; ++k) {
                        acc += w[k] * a[k];
                    }
                    next[r * widest + o] = hidden ? activate(net.activation, acc) : acc;
                }
            }
            std::swap(cur, next);
        }
        for (std::size_t r = 0; r < rows; ++r) {
            logits[r0 + r] = cur[r * widest];
        }
    });
    return logits;
}

FeatureMatrix sample_ball(std::span<const double> center, double radius, std::size_t n, RngSeed seed,
                          const ExecPolicy& exec)
{
    const std::size_t d = center.size();
    const RandomStream base(seed, "sample_ball");
    std::vector<double> data(n * d);
    parallel_for(exec, n, [&](std::size_t i) { draw_ball_point(base.substream(i), center, radius, data.data() + i * d); });
    return FeatureMatrix(n, d, std::move(data));
}

std::vector<double> kernel_weights(const FeatureMatrix& points, std::span<const double> center, double width,
                                   const ExecPolicy& exec)
{
    std::vector<double> w(points.rows());
    parallel_for(exec, points.rows(), [&](std::size_t i) { w[i] = kernel_weight(points.row(i), center, width); });
    return w;
}

namespace reference {

std::vector<double> mlp_logits(const MlpWeights& net, const FeatureMatrix& X)
{
    check_net_input(net, X);
    std::vector<double> logits;
    logits.reserve(X.rows());
    for (std::size_t i = 0; i < X.rows(); ++i) {
        const auto x = X.row(i);
        std::vector<double> a(x.size());
        for (std::size_t j = 0; j < x.size(); ++j) {
            a[j] = (x[j] - net.input_mean[j]) / net.input_scale[j];
        }
        for (std::size_t l = 0; l < net.layers.size(); ++l) {
            const auto& layer = net.layers[l];
            std::vector<double> z(layer.out);
            for (std::size_t o = 0; o < layer.out; ++o) {
                double acc = layer.bias[o];
                for (std::size_t k = 0; k < layer.in; ++k) {
                    acc += layer.weights[o * layer.in + k] * a[k];
                }
                z[o] = l + 1 < net.layers.size() ? activate(net.activation, acc) : acc;
            }
            a = std::move(z);
        }
        logits.push_back(a[0]);
    }
    return logits;
}

FeatureMatrix sample_ball(std::span<const double> center, double radius, std::size_t n, RngSeed seed)
{
    const std::size_t d = center.size();
    const RandomStream base(seed, "sample_ball");
    std::vector<double> data(n * d);
    for (std::size_t i = 0; i < n; ++i) {
        draw_ball_point(base.substream(i), center, radius, data.data() + i * d);
    }
    return FeatureMatrix(n, d, std::move(data));
}

std::vector<double> kernel_weights(const FeatureMatrix& points, std::span<const double> center, double width)
{
    std::vector<double> w;
    w.reserve(points.rows());
    for (std::size_t i = 0; i < points.rows(); ++i) {
        w.push_back(kernel_weight(points.row(i), center, width));
    }
    return w;
}

} // namespace reference

} // namespace surrscope::kernels
