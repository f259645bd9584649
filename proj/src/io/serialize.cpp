#include "surrscope/io/serialize.hpp"

#include <cmath>
#include <limits>

namespace surrscope {

namespace {

template <class T>
void put_optional(Json& j, const char* key, const std::optional<T>& v)
{
    if (v) {
        j[key] = *v;
    } else {
        j[key] = nullptr;
    }
}

template <class T>
std::optional<T> get_optional(const Json& j, const char* key)
{
    const auto it = j.find(key);
    if (it == j.end() || it->is_null()) {
        return std::nullopt;
    }
    return it->get<T>();
}

double get_real(const Json& j, const char* key)
{
    const auto& v = j.at(key);
    if (!v.is_number()) {
        throw ParseError(std::string("field '") + key + "' must be a number");
    }
    const double x = v.get<double>();
    if (!std::isfinite(x)) {
        throw ParseError(std::string("field '") + key + "' must be finite");
    }
    return x;
}

std::size_t get_count(const Json& j, const char* key)
{
    const auto& v = j.at(key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
        throw ParseError(std::string("field '") + key + "' must be a non-negative integer");
    }
    return v.get<std::size_t>();
}

std::vector<double> get_reals(const Json& j, const char* key)
{
    const auto& v = j.at(key);
    if (!v.is_array()) {
        throw ParseError(std::string("field '") + key + "' must be an array");
    }
    std::vector<double> out;
    out.reserve(v.size());
    for (const auto& e : v) {
        if (!e.is_number()) {
            throw ParseError(std::string("field '") + key + "' must hold numbers");
        }
        out.push_back(e.get<double>());
    }
    return out;
}

void require_kind(const Json& j, const char* kind)
{
    if (j.at("kind").get<std::string>() != kind) {
        throw ParseError(std::string("expected kind '") + kind + "'");
    }
}

} // namespace

Json parse_json(std::string_view text)
{
    try {
        return Json::parse(text.begin(), text.end());
    } catch (const Json::exception& e) {
        throw ParseError(e.what());
    }
}

void to_json(Json& j, const RngSeed& v)
{
    j = v.value;
}

void from_json(const Json& j, RngSeed& v)
{
    if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<std::int64_t>() >= 0)) {
        throw ParseError("seed must be a non-negative integer");
    }
    v.value = j.get<std::uint64_t>();
}

void to_json(Json& j, const BinaryLabels& v)
{
    j = Json::array();
    for (auto b : v.values()) {
        j.push_back(static_cast<int>(b));
    }
}

void from_json(const Json& j, BinaryLabels& v)
{
    std::vector<std::uint8_t> out;
    out.reserve(j.size());
    for (const auto& e : j) {
        const int b = e.get<int>();
        if (b != 0 && b != 1) {
            throw ParseError("labels must be 0 or 1");
        }
        out.push_back(static_cast<std::uint8_t>(b));
    }
    v = BinaryLabels(std::move(out));
}

void to_json(Json& j, const Bounds& v)
{
    j = Json{{"min", v.min}, {"max", v.max}};
}

void from_json(const Json& j, Bounds& v)
{
    v.min = get_real(j, "min");
    v.max = get_real(j, "max");
}

void to_json(Json& j, const Activation& v)
{
    j = v == Activation::tanh ? "tanh" : "relu";
}

void from_json(const Json& j, Activation& v)
{
    const auto s = j.get<std::string>();
    if (s == "tanh") {
        v = Activation::tanh;
    } else if (s == "relu") {
        v = Activation::relu;
    } else {
        throw ParseError("unknown activation '" + s + "'");
    }
}

void to_json(Json& j, const MlpConfig& v)
{
    j = Json{{"hidden_layers", v.hidden_layers},
             {"activation", v.activation},
             {"learning_rate", v.learning_rate},
             {"epochs", v.epochs},
             {"seed", v.seed}};
}

void from_json(const Json& j, MlpConfig& v)
{
    MlpConfig c;
    if (j.contains("hidden_layers")) {
        c.hidden_layers = j.at("hidden_layers").get<std::vector<std::size_t>>();
    }
    if (j.contains("activation")) {
        c.activation = j.at("activation").get<Activation>();
    }
    if (j.contains("learning_rate")) {
        c.learning_rate = get_real(j, "learning_rate");
    }
    if (j.contains("epochs")) {
        c.epochs = get_count(j, "epochs");
    }
    if (j.contains("seed")) {
        c.seed = j.at("seed").get<RngSeed>();
    }
    c.validate();
    v = std::move(c);
}

void to_json(Json& j, const DenseLayer& v)
{
    j = Json{{"in", v.in}, {"out", v.out}, {"weights", v.weights}, {"bias", v.bias}};
}

void from_json(const Json& j, DenseLayer& v)
{
    v.in = get_count(j, "in");
    v.out = get_count(j, "out");
    v.weights = get_reals(j, "weights");
    v.bias = get_reals(j, "bias");
}

void to_json(Json& j, const MlpWeights& v)
{
    j = Json{{"activation", v.activation},
             {"input_mean", v.input_mean},
             {"input_scale", v.input_scale},
             {"layers", v.layers}};
}

void from_json(const Json& j, MlpWeights& v)
{
    MlpWeights w;
    w.activation = j.at("activation").get<Activation>();
    w.input_mean = get_reals(j, "input_mean");
    w.input_scale = get_reals(j, "input_scale");
    w.layers = j.at("layers").get<std::vector<DenseLayer>>();
    w.validate();
    v = std::move(w);
}

void to_json(Json& j, const Family& v)
{
    j = to_string(v);
}

void from_json(const Json& j, Family& v)
{
    v = family_from_string(j.get<std::string>());
}

void to_json(Json& j, const FitConfig& v)
{
    j = Json{{"family", v.family}, {"tol", v.tol}, {"max_iter", v.max_iter}};
    put_optional(j, "C", v.C);
    put_optional(j, "max_depth", v.max_depth);
    put_optional(j, "max_leaves", v.max_leaves);
    put_optional(j, "standardize", v.standardize);
}

void from_json(const Json& j, FitConfig& v)
{
    FitConfig c;
    c.family = j.at("family").get<Family>();
    if (j.contains("C") && !j.at("C").is_null()) {
        c.C = get_real(j, "C");
    }
    if (j.contains("max_depth") && !j.at("max_depth").is_null()) {
        c.max_depth = get_count(j, "max_depth");
    }
    if (j.contains("max_leaves") && !j.at("max_leaves").is_null()) {
        c.max_leaves = get_count(j, "max_leaves");
    }
    if (j.contains("tol")) {
        c.tol = get_real(j, "tol");
    }
    if (j.contains("max_iter")) {
        c.max_iter = get_count(j, "max_iter");
    }
    c.standardize = get_optional<bool>(j, "standardize");
    c.validate();
    v = c;
}

void to_json(Json& j, const LinearSurrogate& v)
{
    j = Json{{"kind", "linear"},
             {"coefficients", v.coefficients},
             {"intercept", v.intercept},
             {"degenerate", v.degenerate},
             {"iterations", v.iterations},
             {"objective", v.objective},
             {"converged", v.converged}};
    put_optional(j, "C", v.C);
}

void from_json(const Json& j, LinearSurrogate& v)
{
    require_kind(j, "linear");
    LinearSurrogate s;
    s.coefficients = get_reals(j, "coefficients");
    if (s.coefficients.empty()) {
        throw ParseError("linear surrogate needs at least one coefficient");
    }
    for (double w : s.coefficients) {
        if (!std::isfinite(w)) {
            throw ParseError("coefficients must be finite");
        }
    }
    s.intercept = get_real(j, "intercept");
    if (j.contains("C") && !j.at("C").is_null()) {
        s.C = get_real(j, "C");
    }
    s.degenerate = j.at("degenerate").get<bool>();
    s.iterations = get_count(j, "iterations");
    s.objective = get_real(j, "objective");
    s.converged = j.at("converged").get<bool>();
    v = std::move(s);
}

void to_json(Json& j, const TreeNode& v)
{
    j = Json{{"feature", v.feature},
             {"threshold", v.threshold},
             {"left", v.left},
             {"right", v.right},
             {"label", static_cast<int>(v.label)}};
}

void from_json(const Json& j, TreeNode& v)
{
    v.feature = j.at("feature").get<int>();
    v.threshold = get_real(j, "threshold");
    v.left = j.at("left").get<int>();
    v.right = j.at("right").get<int>();
    const int label = j.at("label").get<int>();
    if (label != 0 && label != 1) {
        throw ParseError("leaf label must be 0 or 1");
    }
    v.label = static_cast<std::uint8_t>(label);
}

void to_json(Json& j, const TreeSurrogate& v)
{
    j = Json{{"kind", "tree"},
             {"n_features", v.n_features},
             {"nodes", v.nodes},
             {"depth", v.depth},
             {"n_leaves", v.n_leaves},
             {"degenerate", v.degenerate}};
}

void from_json(const Json& j, TreeSurrogate& v)
{
    require_kind(j, "tree");
    TreeSurrogate t;
    t.n_features = get_count(j, "n_features");
    t.nodes = j.at("nodes").get<std::vector<TreeNode>>();
    t.depth = get_count(j, "depth");
    t.n_leaves = get_count(j, "n_leaves");
    t.degenerate = j.at("degenerate").get<bool>();
    t.validate();
    v = std::move(t);
}

void to_json(Json& j, const LinearComplexity& v)
{
    j = Json{{"kind", "linear"}, {"l0", v.l0}};
}

void to_json(Json& j, const TreeComplexity& v)
{
    j = Json{{"kind", "tree"}, {"depth", v.depth}, {"n_leaves", v.n_leaves}};
}

void to_json(Json& j, const EvalKind& v)
{
    j = to_string(v);
}

void from_json(const Json& j, EvalKind& v)
{
    v = eval_kind_from_string(j.get<std::string>());
}

void to_json(Json& j, const ConfusionCounts& v)
{
    j = Json{{"tp", v.tp}, {"fp", v.fp}, {"tn", v.tn}, {"fn", v.fn}};
}

void from_json(const Json& j, ConfusionCounts& v)
{
    v.tp = get_count(j, "tp");
    v.fp = get_count(j, "fp");
    v.tn = get_count(j, "tn");
    v.fn = get_count(j, "fn");
}

void to_json(Json& j, const FidelityReport& v)
{
    j = Json{{"accuracy", v.accuracy}, {"counts", v.counts}, {"n_eval", v.n_eval}, {"eval_kind", v.eval_kind}};
    put_optional(j, "tpr", v.tpr);
    put_optional(j, "tnr", v.tnr);
}

void from_json(const Json& j, FidelityReport& v)
{
    FidelityReport r;
    r.accuracy = get_real(j, "accuracy");
    r.counts = j.at("counts").get<ConfusionCounts>();
    r.n_eval = get_count(j, "n_eval");
    r.eval_kind = j.at("eval_kind").get<EvalKind>();
    r.tpr = get_optional<double>(j, "tpr");
    r.tnr = get_optional<double>(j, "tnr");
    const auto& c = r.counts;
    if (c.tp + c.fp + c.tn + c.fn != r.n_eval) {
        throw ParseError("fidelity counts do not sum to n_eval");
    }
    if (r.tpr.has_value() != (c.tp + c.fn > 0) || r.tnr.has_value() != (c.tn + c.fp > 0)) {
        throw ParseError("tpr/tnr presence disagrees with counts");
    }
    v = r;
}

void to_json(Json& j, const SpecDefaults& v)
{
    j = Json{{"n_samples", v.n_samples}, {"eval_samples", v.eval_samples}, {"eval_kind", v.eval_kind}};
    put_optional(j, "kernel_width", v.kernel_width);
}

void from_json(const Json& j, SpecDefaults& v)
{
    SpecDefaults d;
    if (j.contains("n_samples")) {
        d.n_samples = get_count(j, "n_samples");
    }
    if (j.contains("eval_samples")) {
        d.eval_samples = get_count(j, "eval_samples");
    }
    if (j.contains("kernel_width") && !j.at("kernel_width").is_null()) {
        d.kernel_width = get_real(j, "kernel_width");
    }
    if (j.contains("eval_kind")) {
        d.eval_kind = j.at("eval_kind").get<EvalKind>();
    }
    d.validate();
    v = d;
}

void to_json(Json& j, const LocalFit& v)
{
    j = Json{{"radius", v.radius},
             {"surrogate", v.surrogate},
             {"fidelity", v.fidelity},
             {"complexity", v.complexity},
             {"degenerate", v.degenerate},
             {"train_positive", v.train_positive},
             {"train_size", v.train_size}};
}

void from_json(const Json& j, LocalFit& v)
{
    LocalFit f;
    f.radius = get_real(j, "radius");
    f.surrogate = j.at("surrogate").get<Surrogate>();
    f.fidelity = j.at("fidelity").get<FidelityReport>();
    f.complexity = j.at("complexity").get<ComplexityMeasure>();
    f.degenerate = j.at("degenerate").get<bool>();
    f.train_positive = get_count(j, "train_positive");
    f.train_size = get_count(j, "train_size");
    v = std::move(f);
}

void to_json(Json& j, const SweepResult& v)
{
    j = Json{{"radii", v.radii}, {"entries", v.entries}};
}

void from_json(const Json& j, SweepResult& v)
{
    SweepResult r;
    r.radii = get_reals(j, "radii");
    r.entries = j.at("entries").get<std::vector<LocalFit>>();
    if (r.radii.size() != r.entries.size()) {
        throw ParseError("sweep needs one entry per radius");
    }
    v = std::move(r);
}

void to_json(Json& j, const BootstrapReplicate& v)
{
    j = Json{{"seed", v.seed}, {"accuracy", v.accuracy}, {"coefficients", v.coefficients}, {"intercept", v.intercept}};
}

void from_json(const Json& j, BootstrapReplicate& v)
{
    v.seed = j.at("seed").get<RngSeed>();
    v.accuracy = get_real(j, "accuracy");
    v.coefficients = get_reals(j, "coefficients");
    v.intercept = get_real(j, "intercept");
}

void to_json(Json& j, const BootstrapSummary& v)
{
    j = Json{{"radius", v.radius},
             {"B", v.B},
             {"n", v.n},
             {"accuracy_mean", v.accuracy_mean},
             {"accuracy_std", v.accuracy_std},
             {"coef_mean", v.coef_mean},
             {"coef_std", v.coef_std},
             {"replicate_seeds", v.replicate_seeds},
             {"replicates", v.replicates}};
}

void from_json(const Json& j, BootstrapSummary& v)
{
    BootstrapSummary s;
    s.radius = get_real(j, "radius");
    s.B = get_count(j, "B");
    s.n = get_count(j, "n");
    s.accuracy_mean = get_real(j, "accuracy_mean");
    s.accuracy_std = get_real(j, "accuracy_std");
    s.coef_mean = get_reals(j, "coef_mean");
    s.coef_std = get_reals(j, "coef_std");
    s.replicate_seeds = j.at("replicate_seeds").get<std::vector<RngSeed>>();
    s.replicates = j.at("replicates").get<std::vector<BootstrapReplicate>>();
    if (s.B < 2 || s.replicate_seeds.size() != s.B || s.replicates.size() != s.B) {
        throw ParseError("bootstrap summary needs B >= 2 replicates");
    }
    v = std::move(s);
}

void to_json(Json& j, const LassoPathEntry& v)
{
    j = Json{{"C", v.C},
             {"coefficients", v.coefficients},
             {"intercept", v.intercept},
             {"fidelity", v.fidelity},
             {"l0", v.l0}};
}

void from_json(const Json& j, LassoPathEntry& v)
{
    v.C = get_real(j, "C");
    v.coefficients = get_reals(j, "coefficients");
    v.intercept = get_real(j, "intercept");
    v.fidelity = j.at("fidelity").get<FidelityReport>();
    v.l0 = get_count(j, "l0");
}

void to_json(Json& j, const LassoPathResult& v)
{
    j = Json{{"radius", v.radius}, {"C_grid", v.C_grid}, {"entries", v.entries}};
}

void from_json(const Json& j, LassoPathResult& v)
{
    LassoPathResult r;
    r.radius = get_real(j, "radius");
    r.C_grid = get_reals(j, "C_grid");
    r.entries = j.at("entries").get<std::vector<LassoPathEntry>>();
    if (r.C_grid.size() != r.entries.size()) {
        throw ParseError("lasso path needs one entry per C");
    }
    v = std::move(r);
}

void to_json(Json& j, const ParetoPoint& v)
{
    j = Json{{"complexity", v.complexity}, {"fidelity", v.fidelity}, {"tag", v.tag}};
}

void from_json(const Json& j, ParetoPoint& v)
{
    v.complexity = get_real(j, "complexity");
    v.fidelity = get_real(j, "fidelity");
    v.tag = j.at("tag").get<std::string>();
}

void to_json(Json& j, const ParetoFrontier& v)
{
    j = Json{{"points", v.points}, {"frontier_indices", v.frontier_indices}};
}

void from_json(const Json& j, ParetoFrontier& v)
{
    v.points = j.at("points").get<std::vector<ParetoPoint>>();
    v.frontier_indices = j.at("frontier_indices").get<std::vector<std::size_t>>();
    for (auto i : v.frontier_indices) {
        if (i >= v.points.size()) {
            throw ParseError("frontier index out of range");
        }
    }
}

void to_json(Json& j, const SignTransition& v)
{
    j = Json{{"feature", v.feature}, {"radius_from", v.radius_from}, {"radius_to", v.radius_to}};
}

void from_json(const Json& j, SignTransition& v)
{
    v.feature = get_count(j, "feature");
    v.radius_from = get_real(j, "radius_from");
    v.radius_to = get_real(j, "radius_to");
}

void to_json(Json& j, const LadderRung& v)
{
    j = Json{{"depth", v.depth}, {"n_leaves", v.n_leaves}, {"fidelity", v.fidelity}};
    put_optional(j, "max_depth", v.max_depth);
}

void from_json(const Json& j, LadderRung& v)
{
    v.max_depth = std::nullopt;
    if (j.contains("max_depth") && !j.at("max_depth").is_null()) {
        v.max_depth = get_count(j, "max_depth");
    }
    v.depth = get_count(j, "depth");
    v.n_leaves = get_count(j, "n_leaves");
    v.fidelity = j.at("fidelity").get<FidelityReport>();
}

} // namespace surrscope

namespace nlohmann {

using surrscope::Json;

void adl_serializer<surrscope::Instance>::to_json(json& j, const surrscope::Instance& v)
{
    j = Json{{"values", std::vector<double>(v.values().begin(), v.values().end())}};
}

surrscope::Instance adl_serializer<surrscope::Instance>::from_json(const json& j)
{
    return surrscope::Instance(surrscope::get_reals(j, "values"));
}

void adl_serializer<surrscope::FeatureMatrix>::to_json(json& j, const surrscope::FeatureMatrix& v)
{
    j = Json{{"rows", v.rows()},
             {"cols", v.cols()},
             {"data", std::vector<double>(v.data().begin(), v.data().end())}};
}

surrscope::FeatureMatrix adl_serializer<surrscope::FeatureMatrix>::from_json(const json& j)
{
    return surrscope::FeatureMatrix(surrscope::get_count(j, "rows"), surrscope::get_count(j, "cols"),
                                    surrscope::get_reals(j, "data"));
}

void adl_serializer<surrscope::NeighbourhoodSpec>::to_json(json& j, const surrscope::NeighbourhoodSpec& v)
{
    j = Json{{"center", v.center()}, {"radius", v.radius()}, {"n_samples", v.n_samples()}, {"seed", v.seed()}};
    surrscope::put_optional(j, "kernel_width", v.kernel_width());
}

surrscope::NeighbourhoodSpec adl_serializer<surrscope::NeighbourhoodSpec>::from_json(const json& j)
{
    std::optional<double> width;
    if (j.contains("kernel_width") && !j.at("kernel_width").is_null()) {
        width = surrscope::get_real(j, "kernel_width");
    }
    return surrscope::NeighbourhoodSpec(j.at("center").get<surrscope::Instance>(), surrscope::get_real(j, "radius"),
                                        surrscope::get_count(j, "n_samples"), j.at("seed").get<surrscope::RngSeed>(),
                                        width);
}

void adl_serializer<surrscope::Neighbourhood>::to_json(json& j, const surrscope::Neighbourhood& v)
{
    j = Json{{"spec", v.spec()}, {"points", v.points()}, {"labels", v.labels()}};
    surrscope::put_optional(j, "weights", v.weights());
}

surrscope::Neighbourhood adl_serializer<surrscope::Neighbourhood>::from_json(const json& j)
{
    std::optional<std::vector<double>> weights;
    if (j.contains("weights") && !j.at("weights").is_null()) {
        weights = surrscope::get_reals(j, "weights");
    }
    return surrscope::Neighbourhood(j.at("spec").get<surrscope::NeighbourhoodSpec>(),
                                    j.at("points").get<surrscope::FeatureMatrix>(),
                                    j.at("labels").get<surrscope::BinaryLabels>(), std::move(weights));
}

void adl_serializer<surrscope::Dataset>::to_json(json& j, const surrscope::Dataset& v)
{
    j = Json{{"X", v.X()}, {"y", v.y()}, {"feature_names", v.feature_names()}, {"bounds", v.bounds()}};
}

surrscope::Dataset adl_serializer<surrscope::Dataset>::from_json(const json& j)
{
    surrscope::Dataset d(j.at("X").get<surrscope::FeatureMatrix>(), j.at("y").get<surrscope::BinaryLabels>(),
                         j.at("feature_names").get<std::vector<std::string>>());
    if (j.contains("bounds") && j.at("bounds").get<std::vector<surrscope::Bounds>>() != d.bounds()) {
        throw surrscope::ParseError("dataset bounds do not match its samples");
    }
    return d;
}

void adl_serializer<surrscope::EvalGrid>::to_json(json& j, const surrscope::EvalGrid& v)
{
    j = Json{{"bounds", v.bounds}, {"resolution", v.resolution}, {"points", v.points}, {"labels", v.labels}};
}

surrscope::EvalGrid adl_serializer<surrscope::EvalGrid>::from_json(const json& j)
{
    surrscope::EvalGrid g{j.at("bounds").get<std::vector<surrscope::Bounds>>(), surrscope::get_count(j, "resolution"),
                          j.at("points").get<surrscope::FeatureMatrix>(), j.at("labels").get<surrscope::BinaryLabels>()};
    if (g.points.rows() != g.resolution * g.resolution || g.labels.size() != g.points.rows()) {
        throw surrscope::ParseError("grid needs resolution^2 points and one label per point");
    }
    return g;
}

void adl_serializer<surrscope::Surrogate>::to_json(json& j, const surrscope::Surrogate& v)
{
    std::visit([&](const auto& s) { j = s; }, v);
}

surrscope::Surrogate adl_serializer<surrscope::Surrogate>::from_json(const json& j)
{
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "linear") {
        return j.get<surrscope::LinearSurrogate>();
    }
    if (kind == "tree") {
        return j.get<surrscope::TreeSurrogate>();
    }
    throw surrscope::ParseError("unknown surrogate kind '" + kind + "'");
}

void adl_serializer<surrscope::ComplexityMeasure>::to_json(json& j, const surrscope::ComplexityMeasure& v)
{
    std::visit([&](const auto& c) { j = c; }, v);
}

surrscope::ComplexityMeasure adl_serializer<surrscope::ComplexityMeasure>::from_json(const json& j)
{
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "linear") {
        return surrscope::LinearComplexity{surrscope::get_count(j, "l0")};
    }
    if (kind == "tree") {
        return surrscope::TreeComplexity{surrscope::get_count(j, "depth"), surrscope::get_count(j, "n_leaves")};
    }
    throw surrscope::ParseError("unknown complexity kind '" + kind + "'");
}

} // namespace nlohmann
