#include "surrscope/blackbox/mlp.hpp"

#include <cmath>

#include "surrscope/core/error.hpp"
#include "surrscope/core/rng.hpp"
#include "surrscope/kernels/kernels.hpp"

namespace surrscope {

BinaryLabels BlackBox::predict(const FeatureMatrix& X) const
{
    if (X.cols() != input_dim()) {
        throw DimensionMismatch("predict: black-box expects " + std::to_string(input_dim()) + " features, got "
                                + std::to_string(X.cols()));
    }
    if (X.rows() == 0) {
        return BinaryLabels{};
    }
    auto labels = predict_rows(X);
    if (labels.size() != X.rows()) {
        throw BlackBoxError("predict: black-box returned " + std::to_string(labels.size()) + " labels for "
                            + std::to_string(X.rows()) + " rows");
    }
    return labels;
}

ConstantBlackBox::ConstantBlackBox(std::size_t dim, std::uint8_t label) : dim_(dim), label_(label)
{
    if (dim == 0 || label > 1) {
        throw InvalidArgument("ConstantBlackBox: need dim >= 1 and label in {0,1}");
    }
}

BinaryLabels ConstantBlackBox::predict_rows(const FeatureMatrix& X) const
{
    return BinaryLabels(std::vector<std::uint8_t>(X.rows(), label_));
}

std::uint8_t label_from_logit(double logit) noexcept
{
    const double p = 1.0 / (1.0 + std::exp(-logit));
    return p > 0.5 ? 1 : 0;
}

void MlpConfig::validate() const
{
    if (hidden_layers.empty()) {
        throw InvalidArgument("MlpConfig: at least one hidden layer required");
    }
    for (auto h : hidden_layers) {
        if (h == 0) {
            throw InvalidArgument("MlpConfig: hidden layer widths must be positive");
        }
    }
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
        throw InvalidArgument("MlpConfig: learning_rate must be positive");
    }
    if (epochs == 0) {
        throw InvalidArgument("MlpConfig: epochs must be positive");
    }
}

void MlpWeights::validate() const
{
    if (input_mean.empty() || input_mean.size() != input_scale.size()) {
        throw InvalidArgument("MlpWeights: input statistics malformed");
    }
    if (layers.empty()) {
        throw InvalidArgument("MlpWeights: no layers");
    }
    std::size_t width = input_dim();
    for (const auto& layer : layers) {
        if (layer.in != width || layer.out == 0 || layer.weights.size() != layer.in * layer.out
            || layer.bias.size() != layer.out) {
            throw InvalidArgument("MlpWeights: layer shapes inconsistent");
        }
        width = layer.out;
    }
    if (width != 1) {
        throw InvalidArgument("MlpWeights: output layer must have a single unit");
    }
    for (double s : input_scale) {
        if (!(s > 0.0) || !std::isfinite(s)) {
            throw InvalidArgument("MlpWeights: input scales must be positive");
        }
    }
}

MlpClassifier::MlpClassifier(MlpWeights weights, ExecPolicy exec) : weights_(std::move(weights)), exec_(exec)
{
    weights_.validate();
}

BinaryLabels MlpClassifier::predict_rows(const FeatureMatrix& X) const
{
    const auto logits = kernels::mlp_logits(weights_, X, exec_);
    std::vector<std::uint8_t> labels(logits.size());
    for (std::size_t i = 0; i < logits.size(); ++i) {
        labels[i] = label_from_logit(logits[i]);
    }
    return BinaryLabels(std::move(labels));
}

TrainedMlp train_mlp(const Dataset& data, const MlpConfig& config)
{
    config.validate();
    const std::size_t n = data.size();
    const std::size_t d = data.dim();
    if (n == 0) {
        throw InvalidArgument("train_mlp: empty dataset");
    }

    MlpWeights net;
    net.activation = config.activation;
    net.input_mean.assign(d, 0.0);
    net.input_scale.assign(d, 1.0);
    for (std::size_t j = 0; j < d; ++j) {
        double mean = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            mean += data.X().at(i, j);
        }
        mean /= static_cast<double>(n);
        double var = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double c = data.X().at(i, j) - mean;
            var += c * c;
        }
        var /= static_cast<double>(n);
        net.input_mean[j] = mean;
        net.input_scale[j] = var > 0.0 ? std::sqrt(var) : 1.0;
    }

    // Glorot-uniform initialisation, zero biases.
    RandomStream init(config.seed, "mlp.init");
    std::vector<std::size_t> widths{d};
    widths.insert(widths.end(), config.hidden_layers.begin(), config.hidden_layers.end());
    widths.push_back(1);
    for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
        DenseLayer layer{widths[l], widths[l + 1], {}, std::vector<double>(widths[l + 1], 0.0)};
        const double limit = std::sqrt(6.0 / static_cast<double>(layer.in + layer.out));
        layer.weights.resize(layer.in * layer.out);
        for (double& w : layer.weights) {
            w = limit * (2.0 * init.uniform() - 1.0);
        }
        net.layers.push_back(std::move(layer));
    }

    const std::size_t L = net.layers.size();
    // acts[0] is the standardized input, acts[l+1] the output of layer l.
    std::vector<std::vector<double>> acts(L + 1);
    acts[0].resize(n * d);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            acts[0][i * d + j] = (data.X().at(i, j) - net.input_mean[j]) / net.input_scale[j];
        }
    }
    for (std::size_t l = 0; l < L; ++l) {
        acts[l + 1].resize(n * net.layers[l].out);
    }
    std::vector<double> delta;
    std::vector<double> delta_prev;
    std::vector<double> grad_w;
    std::vector<double> grad_b;
    const double inv_n = 1.0 / static_cast<double>(n);

    const auto finite = [](const std::vector<DenseLayer>& layers) {
        for (const auto& layer : layers) {
            for (double w : layer.weights) {
                if (!std::isfinite(w)) {
                    return false;
                }
            }
            for (double b : layer.bias) {
                if (!std::isfinite(b)) {
                    return false;
                }
            }
        }
        return true;
    };
    std::vector<DenseLayer> last_good;

    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        last_good = net.layers;
        for (std::size_t l = 0; l < L; ++l) {
            const auto& layer = net.layers[l];
            const bool hidden = l + 1 < L;
            const auto& a = acts[l];
            auto& z = acts[l + 1];
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t o = 0; o < layer.out; ++o) {
                    double acc = layer.bias[o];
                    for (std::size_t k = 0; k < layer.in; ++k) {
                        acc += layer.weights[o * layer.in + k] * a[i * layer.in + k];
                    }
                    if (hidden) {
                        acc = net.activation == Activation::tanh ? std::tanh(acc) : (acc > 0.0 ? acc : 0.0);
                    }
                    z[i * layer.out + o] = acc;
                }
            }
        }

        // d(mean BCE)/d(logit) = (sigmoid(logit) - y) / n
        delta.assign(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const double p = 1.0 / (1.0 + std::exp(-acts[L][i]));
            delta[i] = (p - static_cast<double>(data.y()[i])) * inv_n;
        }

        for (std::size_t l = L; l-- > 0;) {
            auto& layer = net.layers[l];
            const auto& a = acts[l];
            grad_w.assign(layer.in * layer.out, 0.0);
            grad_b.assign(layer.out, 0.0);
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t o = 0; o < layer.out; ++o) {
                    const double g = delta[i * layer.out + o];
                    grad_b[o] += g;
                    for (std::size_t k = 0; k < layer.in; ++k) {
                        grad_w[o * layer.in + k] += g * a[i * layer.in + k];
                    }
                }
            }
            if (l > 0) {
                delta_prev.assign(n * layer.in, 0.0);
                for (std::size_t i = 0; i < n; ++i) {
                    for (std::size_t k = 0; k < layer.in; ++k) {
                        double acc = 0.0;
                        for (std::size_t o = 0; o < layer.out; ++o) {
                            acc += delta[i * layer.out + o] * layer.weights[o * layer.in + k];
                        }
                        const double h = a[i * layer.in + k];
                        const double slope = net.activation == Activation::tanh ? 1.0 - h * h : (h > 0.0 ? 1.0 : 0.0);
                        delta_prev[i * layer.in + k] = acc * slope;
                    }
                }
            }
            for (std::size_t q = 0; q < grad_w.size(); ++q) {
                layer.weights[q] -= config.learning_rate * grad_w[q];
            }
            for (std::size_t o = 0; o < layer.out; ++o) {
                layer.bias[o] -= config.learning_rate * grad_b[o];
            }
            if (l > 0) {
                std::swap(delta, delta_prev);
            }
        }
        // A diverging run keeps its last finite weights; the low training
        // accuracy reported below is the signal.
        if (!finite(net.layers)) {
            net.layers = std::move(last_good);
            break;
        }
    }

    auto model = std::make_shared<const MlpClassifier>(std::move(net));
    const auto predicted = model->predict(data.X());
    std::size_t correct = 0;
    for (std::size_t i = 0; i < n; ++i) {
        correct += predicted[i] == data.y()[i] ? 1 : 0;
    }
    return TrainedMlp{std::move(model), static_cast<double>(correct) / static_cast<double>(n)};
}

} // namespace surrscope
