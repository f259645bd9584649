#include <catch_amalgamated.hpp>

#include "surrscope/core/error.hpp"
#include "surrscope/metrics/fidelity.hpp"
#include "surrscope/sampling/sampling.hpp"
#include "test_util.hpp"

using namespace surrscope;

TEST_CASE("confusion counts treat the black-box as truth")
{
    const BinaryLabels truth({1, 1, 0, 0, 1});
    const BinaryLabels pred({1, 0, 0, 1, 1});
    const auto r = fidelity_from_labels(truth, pred, EvalKind::fresh_neighbourhood);
    CHECK(r.counts == ConfusionCounts{2, 1, 1, 1});
    CHECK(r.accuracy == 0.6);
    CHECK(r.tpr == 2.0 / 3.0);
    CHECK(r.tnr == 0.5);
    CHECK(r.n_eval == 5);
}

TEST_CASE("rates with empty denominators are absent")
{
    const BinaryLabels truth({1, 1});
    const auto r = fidelity_from_labels(truth, BinaryLabels({1, 0}), EvalKind::meshgrid);
    CHECK(r.tpr == 0.5);
    CHECK(!r.tnr);
    CHECK(r.eval_kind == EvalKind::meshgrid);
    CHECK_THROWS_AS(fidelity_from_labels(truth, BinaryLabels({1}), EvalKind::meshgrid), DimensionMismatch);
    CHECK_THROWS_AS(fidelity_from_labels(BinaryLabels{}, BinaryLabels{}, EvalKind::meshgrid), InvalidArgument);
}

TEST_CASE("a surrogate equal to the black-box has perfect fidelity")
{
    const testing::HalfSpaceBlackBox bb({1.0, 2.0}, -0.5);
    const Surrogate s = LinearSurrogate{{1.0, 2.0}, -0.5, std::nullopt, false, 0, 0.0, true};
    const auto X = testing::random_matrix(1000, 2, RngSeed{1});
    const auto r = evaluate(s, bb, X, EvalKind::train_neighbourhood);
    CHECK(r.accuracy == 1.0);
    CHECK(r.tpr == 1.0);
    CHECK(r.tnr == 1.0);
}

TEST_CASE("fresh evaluation sets come from their own stream over the same ball")
{
    const NeighbourhoodSpec spec(Instance({1.0, 1.0}), 0.5, 300, RngSeed{5});
    const auto E = fresh_eval_set(spec, RngSeed{5}, 400);
    CHECK(E.rows() == 400);
    for (std::size_t i = 0; i < E.rows(); ++i) {
        REQUIRE(euclidean_distance(E.row(i), spec.center().values()) <= 0.5);
    }
    // Same seed value as the training spec, still a different sample.
    const auto T = sample_ball(spec);
    CHECK(E.at(0, 0) != T.at(0, 0));
    CHECK(fresh_eval_set(spec, RngSeed{5}, 400) == E);
}

TEST_CASE("eval kind names round-trip")
{
    for (auto k : {EvalKind::train_neighbourhood, EvalKind::fresh_neighbourhood, EvalKind::meshgrid}) {
        CHECK(eval_kind_from_string(to_string(k)) == k);
    }
    CHECK_THROWS_AS(eval_kind_from_string("holdout"), InvalidArgument);
}
