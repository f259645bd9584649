#pragma once

#include <bit>
#include <memory>

#include "surrscope/blackbox/mlp.hpp"
#include "surrscope/core/rng.hpp"
#include "surrscope/data/dataset.hpp"

namespace surrscope::testing {

/// The pinned moons fixture: 1000 points, noise 0.1, dataset seed 0, default
/// MLP with seed 0. Trained once per process.
struct MoonsFixture {
    Dataset data;
    TrainedMlp mlp;
    Instance x;
};

inline const MoonsFixture& moons_fixture()
{
    static const MoonsFixture f = [] {
        auto data = make_moons(1000, 0.1, RngSeed{0});
        MlpConfig cfg;
        cfg.seed = RngSeed{0};
        auto mlp = train_mlp(data, cfg);
        return MoonsFixture{std::move(data), std::move(mlp), Instance({0.5, 0.25})};
    }();
    return f;
}

/// Half-space labels with a deterministic pseudo-random band around the
/// boundary, so neighbourhood labels are never linearly separable.
class NoisyHalfSpace final : public BlackBox {
public:
    NoisyHalfSpace(std::vector<double> w, double b, double band) : w_(std::move(w)), b_(b), band_(band) {}
    std::size_t input_dim() const noexcept override { return w_.size(); }
    std::string kind() const override { return "noisy_half_space"; }

protected:
    BinaryLabels predict_rows(const FeatureMatrix& X) const override
    {
        std::vector<std::uint8_t> out(X.rows());
        for (std::size_t i = 0; i < X.rows(); ++i) {
            double t = b_;
            std::uint64_t h = 0;
            for (std::size_t j = 0; j < w_.size(); ++j) {
                t += w_[j] * X.at(i, j);
                h = mix64(h ^ std::bit_cast<std::uint64_t>(X.at(i, j)));
            }
            const double u = static_cast<double>(h >> 11) * 0x1.0p-53;
            out[i] = t + band_ * (u - 0.5) > 0.0 ? 1 : 0;
        }
        return BinaryLabels(std::move(out));
    }

private:
    std::vector<double> w_;
    double b_;
    double band_;
};

} // namespace surrscope::testing
