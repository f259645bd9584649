#pragma once

#include <vector>

#include "surrscope/blackbox/blackbox.hpp"
#include "surrscope/data/dataset.hpp"
#include "surrscope/kernels/exec.hpp"

namespace surrscope {

enum class Activation { tanh, relu };

struct MlpConfig {
    std::vector<std::size_t> hidden_layers{16, 16};
    Activation activation = Activation::tanh;
    double learning_rate = 0.1;
    std::size_t epochs = 2000;
    RngSeed seed{0};

    void validate() const;
};

/// Fully connected layer, weights stored out x in row-major.
struct DenseLayer {
    std::size_t in = 0;
    std::size_t out = 0;
    std::vector<double> weights;
    std::vector<double> bias;

    friend bool operator==(const DenseLayer&, const DenseLayer&) = default;
};

/// Parameters of a trained network. Inputs are standardized with the
/// training-set column means and scales before the first layer; the last
/// layer has a single output unit read through a sigmoid.
struct MlpWeights {
    Activation activation = Activation::tanh;
    std::vector<double> input_mean;
    std::vector<double> input_scale;
    std::vector<DenseLayer> layers;

    std::size_t input_dim() const noexcept { return input_mean.size(); }
    void validate() const;

    friend bool operator==(const MlpWeights&, const MlpWeights&) = default;
};

class MlpClassifier final : public BlackBox {
public:
    explicit MlpClassifier(MlpWeights weights, ExecPolicy exec = ExecPolicy::openmp());

    std::size_t input_dim() const noexcept override { return weights_.input_dim(); }
    std::string kind() const override { return "builtin_mlp"; }

    /// For persistence only; the explanation pipeline sees predict().
    const MlpWeights& weights() const noexcept { return weights_; }

protected:
    BinaryLabels predict_rows(const FeatureMatrix& X) const override;

private:
    MlpWeights weights_;
    ExecPolicy exec_;
};

struct TrainedMlp {
    std::shared_ptr<const MlpClassifier> model;
    double training_accuracy = 0.0;
};

/// Full-batch gradient descent on the mean logistic loss with
/// backpropagation. Deterministic in config.seed.
TrainedMlp train_mlp(const Dataset& data, const MlpConfig& config);

/// Label rule shared by the kernels: 1 iff sigmoid(logit) > 0.5.
std::uint8_t label_from_logit(double logit) noexcept;

} // namespace surrscope
