#include <catch_amalgamated.hpp>

#include <atomic>
#include <cstring>
#include <stdexcept>

#include <omp.h>

#include "surrscope/core/error.hpp"
#include "surrscope/blackbox/mlp.hpp"
#include "surrscope/kernels/exec.hpp"
#include "surrscope/kernels/kernels.hpp"
#include "test_util.hpp"

using namespace surrscope;

namespace {

// Bit pattern equality, so -0.0 vs 0.0 or differently rounded sums fail.
bool bit_equal(std::span<const double> a, std::span<const double> b)
{
    return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

MlpWeights random_net(std::size_t d, std::vector<std::size_t> hidden, Activation act, RngSeed seed)
{
    RandomStream rng(seed);
    MlpWeights net;
    net.activation = act;
    for (std::size_t j = 0; j < d; ++j) {
        net.input_mean.push_back(rng.normal());
        net.input_scale.push_back(0.5 + rng.uniform());
    }
    std::size_t in = d;
    hidden.push_back(1);
    for (auto out : hidden) {
        DenseLayer layer{in, out, std::vector<double>(in * out), std::vector<double>(out)};
        for (auto& w : layer.weights) {
            w = rng.normal();
        }
        for (auto& b : layer.bias) {
            b = rng.normal();
        }
        net.layers.push_back(std::move(layer));
        in = out;
    }
    return net;
}

struct ThreadScope {
    explicit ThreadScope(int n) : saved(omp_get_max_threads()) { omp_set_num_threads(n); }
    ~ThreadScope() { omp_set_num_threads(saved); }
    int saved;
};

} // namespace

TEST_CASE("parallel_for visits every index once under any policy")
{
    ThreadScope threads(4);
    for (const auto& policy : {ExecPolicy::serial(), ExecPolicy::openmp(), ExecPolicy::openmp(2)}) {
        std::vector<std::atomic<int>> hits(1000);
        parallel_for(policy, hits.size(), [&](std::size_t i) { hits[i].fetch_add(1); });
        for (const auto& h : hits) {
            REQUIRE(h.load() == 1);
        }
    }
}

TEST_CASE("parallel_for rethrows the first failure")
{
    ThreadScope threads(4);
    CHECK_THROWS_AS(parallel_for(ExecPolicy::openmp(), 100,
                                 [](std::size_t i) {
                                     if (i == 37) {
                                         throw std::runtime_error("boom");
                                     }
                                 }),
                    std::runtime_error);
    CHECK_THROWS_AS(parallel_for(ExecPolicy::serial(), 3, [](std::size_t) { throw std::logic_error("x"); }),
                    std::logic_error);
}

TEST_CASE("effective_threads honours the policy cap")
{
    ThreadScope threads(4);
    CHECK(effective_threads(ExecPolicy::serial()) == 1);
    CHECK(effective_threads(ExecPolicy::openmp(2)) == 2);
    CHECK(effective_threads(ExecPolicy::openmp()) == 4);
    CHECK(effective_threads(ExecPolicy::openmp(16)) == 4);
}

TEST_CASE("ProgressSink reports running totals")
{
    std::vector<std::pair<std::size_t, std::size_t>> seen;
    ProgressSink sink([&](std::size_t done, std::size_t total) { seen.emplace_back(done, total); });
    sink.start(3);
    sink.advance();
    sink.advance(2);
    REQUIRE(seen.size() == 3);
    CHECK(seen[0] == std::pair<std::size_t, std::size_t>{0, 3});
    CHECK(seen[2] == std::pair<std::size_t, std::size_t>{3, 3});
}

TEST_CASE("mlp_logits matches the serial reference bit for bit")
{
    ThreadScope threads(4);
    for (auto act : {Activation::tanh, Activation::relu}) {
        const auto net = random_net(3, {16, 8}, act, RngSeed{9});
        // Row counts around the block size, including a ragged final block.
        for (std::size_t rows : {0, 1, 63, 64, 65, 1000}) {
            const auto X = testing::random_matrix(rows, 3, RngSeed{rows});
            const auto ref = kernels::reference::mlp_logits(net, X);
            for (const auto& policy : {ExecPolicy::serial(), ExecPolicy::openmp(), ExecPolicy::openmp(3)}) {
                REQUIRE(bit_equal(kernels::mlp_logits(net, X, policy), ref));
            }
        }
    }
}

TEST_CASE("mlp_logits rejects the wrong width")
{
    const auto net = random_net(3, {4}, Activation::tanh, RngSeed{1});
    const auto X = testing::random_matrix(5, 2, RngSeed{1});
    CHECK_THROWS_AS(kernels::mlp_logits(net, X, ExecPolicy::serial()), DimensionMismatch);
    CHECK_THROWS_AS(kernels::reference::mlp_logits(net, X), DimensionMismatch);
}

TEST_CASE("sample_ball matches the serial reference bit for bit")
{
    ThreadScope threads(4);
    for (std::size_t d : {1, 2, 5, 10}) {
        std::vector<double> center(d);
        for (std::size_t j = 0; j < d; ++j) {
            center[j] = 0.25 * static_cast<double>(j) - 1.0;
        }
        const auto ref = kernels::reference::sample_ball(center, 1.5, 777, RngSeed{d});
        for (const auto& policy : {ExecPolicy::serial(), ExecPolicy::openmp(), ExecPolicy::openmp(2)}) {
            const auto got = kernels::sample_ball(center, 1.5, 777, RngSeed{d}, policy);
            REQUIRE(got.rows() == ref.rows());
            REQUIRE(bit_equal(got.data(), ref.data()));
        }
    }
}

TEST_CASE("sample_ball rows are prefix-stable in n")
{
    const std::vector<double> center{0.0, 0.0, 0.0};
    const auto small = kernels::sample_ball(center, 1.0, 10, RngSeed{4}, ExecPolicy::serial());
    const auto large = kernels::sample_ball(center, 1.0, 100, RngSeed{4}, ExecPolicy::serial());
    CHECK(bit_equal(small.data(), large.data().subspan(0, small.data().size())));
}

TEST_CASE("kernel_weights matches the serial reference bit for bit")
{
    ThreadScope threads(4);
    const auto X = testing::random_matrix(5000, 4, RngSeed{2});
    const std::vector<double> center{0.1, -0.2, 0.3, 0.0};
    const auto ref = kernels::reference::kernel_weights(X, center, 0.75);
    for (const auto& policy : {ExecPolicy::serial(), ExecPolicy::openmp()}) {
        REQUIRE(bit_equal(kernels::kernel_weights(X, center, 0.75, policy), ref));
    }
}
