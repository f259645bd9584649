#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

#include "surrscope/analysis/analysis.hpp"
#include "surrscope/blackbox/meshgrid.hpp"
#include "surrscope/blackbox/mlp.hpp"
#include "surrscope/core/error.hpp"
#include "surrscope/core/types.hpp"
#include "surrscope/data/dataset.hpp"
#include "surrscope/metrics/fidelity.hpp"
#include "surrscope/surrogates/surrogate.hpp"

// JSON layout of every value type. Field names are listed in README.md.
// Objects are written with sorted keys and shortest round-trip doubles, so
// equal values always produce equal bytes.

namespace surrscope {

using Json = nlohmann::json;

void to_json(Json& j, const RngSeed& v);
void from_json(const Json& j, RngSeed& v);
void to_json(Json& j, const BinaryLabels& v);
void from_json(const Json& j, BinaryLabels& v);
void to_json(Json& j, const Bounds& v);
void from_json(const Json& j, Bounds& v);

void to_json(Json& j, const Activation& v);
void from_json(const Json& j, Activation& v);
void to_json(Json& j, const MlpConfig& v);
void from_json(const Json& j, MlpConfig& v);
void to_json(Json& j, const DenseLayer& v);
void from_json(const Json& j, DenseLayer& v);
void to_json(Json& j, const MlpWeights& v);
void from_json(const Json& j, MlpWeights& v);

void to_json(Json& j, const Family& v);
void from_json(const Json& j, Family& v);
void to_json(Json& j, const FitConfig& v);
void from_json(const Json& j, FitConfig& v);
void to_json(Json& j, const LinearSurrogate& v);
void from_json(const Json& j, LinearSurrogate& v);
void to_json(Json& j, const TreeNode& v);
void from_json(const Json& j, TreeNode& v);
void to_json(Json& j, const TreeSurrogate& v);
void from_json(const Json& j, TreeSurrogate& v);
void to_json(Json& j, const LinearComplexity& v);
void to_json(Json& j, const TreeComplexity& v);

void to_json(Json& j, const EvalKind& v);
void from_json(const Json& j, EvalKind& v);
void to_json(Json& j, const ConfusionCounts& v);
void from_json(const Json& j, ConfusionCounts& v);
void to_json(Json& j, const FidelityReport& v);
void from_json(const Json& j, FidelityReport& v);

void to_json(Json& j, const SpecDefaults& v);
void from_json(const Json& j, SpecDefaults& v);
void to_json(Json& j, const LocalFit& v);
void from_json(const Json& j, LocalFit& v);
void to_json(Json& j, const SweepResult& v);
void from_json(const Json& j, SweepResult& v);
void to_json(Json& j, const BootstrapReplicate& v);
void from_json(const Json& j, BootstrapReplicate& v);
void to_json(Json& j, const BootstrapSummary& v);
void from_json(const Json& j, BootstrapSummary& v);
void to_json(Json& j, const LassoPathEntry& v);
void from_json(const Json& j, LassoPathEntry& v);
void to_json(Json& j, const LassoPathResult& v);
void from_json(const Json& j, LassoPathResult& v);
void to_json(Json& j, const ParetoPoint& v);
void from_json(const Json& j, ParetoPoint& v);
void to_json(Json& j, const ParetoFrontier& v);
void from_json(const Json& j, ParetoFrontier& v);
void to_json(Json& j, const SignTransition& v);
void from_json(const Json& j, SignTransition& v);
void to_json(Json& j, const LadderRung& v);
void from_json(const Json& j, LadderRung& v);

} // namespace surrscope

// Types without a default constructor, and the variants.
namespace nlohmann {

#define SURRSCOPE_JSON_SERIALIZER(T)                                                                                   \
    template <>                                                                                                        \
    struct adl_serializer<T> {                                                                                         \
        static void to_json(json& j, const T& v);                                                                      \
        static T from_json(const json& j);                                                                             \
    }

SURRSCOPE_JSON_SERIALIZER(surrscope::Instance);
SURRSCOPE_JSON_SERIALIZER(surrscope::FeatureMatrix);
SURRSCOPE_JSON_SERIALIZER(surrscope::NeighbourhoodSpec);
SURRSCOPE_JSON_SERIALIZER(surrscope::Neighbourhood);
SURRSCOPE_JSON_SERIALIZER(surrscope::Dataset);
SURRSCOPE_JSON_SERIALIZER(surrscope::EvalGrid);
SURRSCOPE_JSON_SERIALIZER(surrscope::Surrogate);
SURRSCOPE_JSON_SERIALIZER(surrscope::ComplexityMeasure);

#undef SURRSCOPE_JSON_SERIALIZER

} // namespace nlohmann

namespace surrscope {

/// Canonical text of a value: compact unless indent >= 0.
template <class T>
std::string serialize(const T& value, int indent = -1)
{
    return Json(value).dump(indent);
}

/// Rebuilds the value and re-checks its invariants. Any structural or
/// invariant failure is a ParseError.
template <class T>
T from_json_value(const Json& j)
{
    try {
        return j.get<T>();
    } catch (const Json::exception& e) {
        throw ParseError(e.what());
    } catch (const InvalidArgument& e) {
        throw ParseError(e.what());
    } catch (const DimensionMismatch& e) {
        throw ParseError(e.what());
    }
}

Json parse_json(std::string_view text);

template <class T>
T deserialize(std::string_view text)
{
    return from_json_value<T>(parse_json(text));
}

} // namespace surrscope
