// Serial reference kernels against their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include "surrscope/blackbox/mlp.hpp"
#include "surrscope/core/rng.hpp"
#include "surrscope/kernels/kernels.hpp"

using namespace surrscope;

namespace {

MlpWeights random_net(std::size_t in, std::size_t hidden)
{
    RandomStream rng(RngSeed{1});
    MlpWeights net;
    net.input_mean.assign(in, 0.0);
    net.input_scale.assign(in, 1.0);
    std::size_t prev = in;
    for (std::size_t out : {hidden, hidden, std::size_t{1}}) {
        DenseLayer layer{prev, out, std::vector<double>(prev * out), std::vector<double>(out, 0.0)};
        for (auto& w : layer.weights) {
            w = rng.normal() / static_cast<double>(prev);
        }
        net.layers.push_back(std::move(layer));
        prev = out;
    }
    return net;
}

FeatureMatrix points(std::size_t n, std::size_t d)
{
    const std::vector<double> c(d, 0.0);
    return kernels::reference::sample_ball(c, 1.0, n, RngSeed{2});
}

void BM_MlpLogitsSerial(benchmark::State& state)
{
    const auto net = random_net(10, 64);
    const auto X = points(static_cast<std::size_t>(state.range(0)), 10);
    for (auto _ : state) {
        benchmark::DoNotOptimize(kernels::reference::mlp_logits(net, X));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_MlpLogitsOpenMP(benchmark::State& state)
{
    const auto net = random_net(10, 64);
    const auto X = points(static_cast<std::size_t>(state.range(0)), 10);
    for (auto _ : state) {
        benchmark::DoNotOptimize(kernels::mlp_logits(net, X, ExecPolicy::openmp()));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_SampleBallSerial(benchmark::State& state)
{
    const std::vector<double> c(10, 0.0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(kernels::reference::sample_ball(c, 1.0, static_cast<std::size_t>(state.range(0)),
                                                                 RngSeed{3}));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_SampleBallOpenMP(benchmark::State& state)
{
    const std::vector<double> c(10, 0.0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            kernels::sample_ball(c, 1.0, static_cast<std::size_t>(state.range(0)), RngSeed{3}, ExecPolicy::openmp()));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_KernelWeightsSerial(benchmark::State& state)
{
    const std::vector<double> c(10, 0.0);
    const auto X = points(static_cast<std::size_t>(state.range(0)), 10);
    for (auto _ : state) {
        benchmark::DoNotOptimize(kernels::reference::kernel_weights(X, c, 0.75));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_KernelWeightsOpenMP(benchmark::State& state)
{
    const std::vector<double> c(10, 0.0);
    const auto X = points(static_cast<std::size_t>(state.range(0)), 10);
    for (auto _ : state) {
        benchmark::DoNotOptimize(kernels::kernel_weights(X, c, 0.75, ExecPolicy::openmp()));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

} // namespace

BENCHMARK(BM_MlpLogitsSerial)->Arg(1000)->Arg(100000);
BENCHMARK(BM_MlpLogitsOpenMP)->Arg(1000)->Arg(100000);
BENCHMARK(BM_SampleBallSerial)->Arg(1000)->Arg(100000);
BENCHMARK(BM_SampleBallOpenMP)->Arg(1000)->Arg(100000);
BENCHMARK(BM_KernelWeightsSerial)->Arg(1000)->Arg(100000);
BENCHMARK(BM_KernelWeightsOpenMP)->Arg(1000)->Arg(100000);

BENCHMARK_MAIN();
