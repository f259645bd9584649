#include "surrscope/app/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "surrscope/core/rng.hpp"

namespace surrscope {

namespace {

void only_keys(const Json& j, const std::set<std::string>& allowed, const std::string& where)
{
    if (!j.is_object()) {
        throw ConfigError(where + " must be an object");
    }
    for (const auto& [key, _] : j.items()) {
        if (!allowed.contains(key)) {
            throw ConfigError("unknown key '" + key + "' in " + where);
        }
    }
}

const Json& field(const Json& j, const char* key, const std::string& where)
{
    if (!j.is_object() || !j.contains(key)) {
        throw ConfigError(where + "." + key + " is required");
    }
    return j.at(key);
}

double real_field(const Json& j, const char* key, const std::string& where)
{
    const auto& v = field(j, key, where);
    if (!v.is_number() || !std::isfinite(v.get<double>())) {
        throw ConfigError(where + "." + key + " must be a finite number");
    }
    return v.get<double>();
}

std::size_t count_field(const Json& j, const char* key, const std::string& where)
{
    const auto& v = field(j, key, where);
    if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
        throw ConfigError(where + "." + key + " must be a non-negative integer");
    }
    return v.get<std::size_t>();
}

RngSeed seed_field(const Json& j, const char* key, const std::string& where)
{
    const auto& v = field(j, key, where);
    if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
        throw ConfigError(where + "." + key + " must be a non-negative integer");
    }
    return RngSeed{v.get<std::uint64_t>()};
}

std::filesystem::path resolve(const std::filesystem::path& p, const std::filesystem::path& base_dir)
{
    return p.is_absolute() ? p : base_dir / p;
}

std::variant<GeneratorSpec, CsvSpec> parse_dataset(const Json& j, const std::filesystem::path& base_dir)
{
    only_keys(j, {"generator", "n", "noise", "factor", "seed", "csv", "target", "threshold"}, "dataset");
    const bool gen = j.contains("generator");
    const bool csv = j.contains("csv");
    if (gen == csv) {
        throw ConfigError("dataset needs exactly one of 'generator' or 'csv'");
    }
    if (gen) {
        GeneratorSpec g;
        g.name = j.at("generator").get<std::string>();
        if (g.name != "moons" && g.name != "circles") {
            throw ConfigError("unknown generator '" + g.name + "' (expected moons or circles)");
        }
        if (j.contains("n")) {
            g.n = count_field(j, "n", "dataset");
        }
        if (j.contains("noise")) {
            g.noise = real_field(j, "noise", "dataset");
        }
        if (j.contains("factor")) {
            g.factor = real_field(j, "factor", "dataset");
        }
        if (j.contains("seed")) {
            g.seed = seed_field(j, "seed", "dataset");
        }
        if (j.contains("target") || j.contains("threshold")) {
            throw ConfigError("dataset.target and dataset.threshold apply to csv datasets only");
        }
        return g;
    }
    CsvSpec c;
    c.path = resolve(j.at("csv").get<std::string>(), base_dir);
    if (j.contains("target")) {
        c.target = j.at("target").get<std::string>();
    }
    if (j.contains("threshold")) {
        const auto& t = j.at("threshold");
        if (t.is_string()) {
            if (t.get<std::string>() != "median") {
                throw ConfigError("dataset.threshold must be \"median\" or a number");
            }
            c.threshold = MedianThreshold{};
        } else {
            c.threshold = real_field(j, "threshold", "dataset");
        }
    }
    for (const char* k : {"n", "noise", "factor", "seed"}) {
        if (j.contains(k)) {
            throw ConfigError(std::string("dataset.") + k + " applies to generated datasets only");
        }
    }
    return c;
}

BlackBoxSpec parse_blackbox(const Json& j, const std::filesystem::path& base_dir)
{
    only_keys(j, {"mlp", "external"}, "blackbox");
    if (j.contains("mlp") == j.contains("external")) {
        throw ConfigError("blackbox needs exactly one of 'mlp' or 'external'");
    }
    BlackBoxSpec spec;
    if (j.contains("mlp")) {
        const auto& m = j.at("mlp");
        only_keys(m, {"hidden_layers", "activation", "learning_rate", "epochs", "seed"}, "blackbox.mlp");
        Json filled = m;
        if (m.contains("seed")) {
            spec.mlp_seed = seed_field(m, "seed", "blackbox.mlp");
            filled.erase("seed");
        }
        spec.model = from_json_value<MlpConfig>(filled);
        return spec;
    }
    const auto& e = j.at("external");
    only_keys(e, {"command", "timeout_ms"}, "blackbox.external");
    ExternalSpec ext;
    ext.command = e.at("command").get<std::vector<std::string>>();
    if (ext.command.empty()) {
        throw ConfigError("blackbox.external.command must be non-empty");
    }
    // Programs given as relative paths live next to the config.
    if (ext.command.front().find('/') != std::string::npos) {
        ext.command.front() = resolve(ext.command.front(), base_dir).string();
    }
    if (e.contains("timeout_ms")) {
        ext.timeout = std::chrono::milliseconds(count_field(e, "timeout_ms", "blackbox.external"));
    }
    spec.model = std::move(ext);
    return spec;
}

InstanceSpec parse_instance(const Json& j)
{
    only_keys(j, {"row", "values"}, "instance");
    if (j.contains("row") == j.contains("values")) {
        throw ConfigError("instance needs exactly one of 'row' or 'values'");
    }
    if (j.contains("row")) {
        return InstanceSpec{count_field(j, "row", "instance")};
    }
    return InstanceSpec{j.at("values").get<std::vector<double>>()};
}

std::vector<std::optional<std::size_t>> parse_depth_grid(const Json& j)
{
    std::vector<std::optional<std::size_t>> out;
    for (const auto& v : j) {
        if (v.is_null() || (v.is_string() && v.get<std::string>() == "inf")) {
            out.emplace_back(std::nullopt);
        } else if (v.is_number_integer() && v.get<std::int64_t>() >= 0) {
            out.emplace_back(v.get<std::size_t>());
        } else {
            throw ConfigError("ladder.depth_grid entries must be non-negative integers, null or \"inf\"");
        }
    }
    return out;
}

} // namespace

std::vector<double> linear_grid(double lo, double hi, std::size_t steps)
{
    if (steps == 0 || !std::isfinite(lo) || !std::isfinite(hi) || hi < lo || (steps == 1 && lo != hi)) {
        throw ConfigError("radius grid needs lo <= hi and a positive step count (1 only when lo == hi)");
    }
    if (steps == 1) {
        return {lo};
    }
    std::vector<double> out(steps);
    for (std::size_t i = 0; i < steps; ++i) {
        out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(steps - 1);
    }
    out.back() = hi;
    return out;
}

std::vector<double> parse_radii(const Json& j)
{
    if (j.is_array()) {
        std::vector<double> out;
        for (const auto& v : j) {
            if (!v.is_number()) {
                throw ConfigError("radii must be numbers");
            }
            out.push_back(v.get<double>());
        }
        return out;
    }
    only_keys(j, {"min", "max", "steps"}, "radii");
    return linear_grid(real_field(j, "min", "radii"), real_field(j, "max", "radii"), count_field(j, "steps", "radii"));
}

std::vector<double> parse_C_grid(const std::string& text)
{
    const auto number = [&](const std::string& s) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(s, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != s.size()) {
            throw ConfigError("bad number '" + s + "' in C grid '" + text + "'");
        }
        return v;
    };
    std::vector<std::string> parts;
    const char sep = text.find(':') != std::string::npos ? ':' : ',';
    std::stringstream ss(text);
    for (std::string part; std::getline(ss, part, sep);) {
        parts.push_back(part);
    }
    if (sep == ':') {
        if (parts.size() != 3) {
            throw ConfigError("C grid range must be lo:hi:count");
        }
        const double count = number(parts[2]);
        if (count < 1 || count != std::floor(count)) {
            throw ConfigError("C grid count must be a positive integer");
        }
        try {
            return log_grid(number(parts[0]), number(parts[1]), static_cast<std::size_t>(count));
        } catch (const InvalidArgument& e) {
            throw ConfigError(e.what());
        }
    }
    std::vector<double> out;
    for (const auto& p : parts) {
        out.push_back(number(p));
    }
    if (out.empty()) {
        throw ConfigError("empty C grid");
    }
    return out;
}

FitConfig parse_fit_config(const Json& j)
{
    only_keys(j, {"family", "C", "max_depth", "max_leaves", "tol", "max_iter", "standardize"}, "fit");
    if (!j.contains("family")) {
        throw ConfigError("fit.family is required");
    }
    try {
        return from_json_value<FitConfig>(j);
    } catch (const ParseError& e) {
        throw ConfigError(std::string("fit: ") + e.what());
    }
}

RunConfig parse_run_config(const Json& j, const std::filesystem::path& base_dir)
{
    try {
        only_keys(j,
                  {"seed", "dataset", "blackbox", "instance", "neighbourhood", "fit", "sweep", "bootstrap", "path",
                   "ladder", "explain", "output"},
                  "config");
        RunConfig c;
        if (j.contains("seed")) {
            c.seed = seed_field(j, "seed", "config");
        }
        if (!j.contains("dataset") || !j.contains("blackbox") || !j.contains("instance")) {
            throw ConfigError("config needs dataset, blackbox and instance");
        }
        c.dataset = parse_dataset(j.at("dataset"), base_dir);
        c.blackbox = parse_blackbox(j.at("blackbox"), base_dir);
        c.instance = parse_instance(j.at("instance"));
        if (j.contains("neighbourhood")) {
            only_keys(j.at("neighbourhood"), {"n_samples", "eval_samples", "kernel_width", "eval_kind"},
                      "neighbourhood");
            c.neighbourhood = from_json_value<SpecDefaults>(j.at("neighbourhood"));
        }
        if (j.contains("fit")) {
            c.fit = parse_fit_config(j.at("fit"));
        }
        if (j.contains("sweep")) {
            const auto& s = j.at("sweep");
            only_keys(s, {"radii"}, "sweep");
            c.sweep = SweepSpec{parse_radii(s.at("radii"))};
        }
        if (j.contains("bootstrap")) {
            const auto& s = j.at("bootstrap");
            only_keys(s, {"radii", "B", "n"}, "bootstrap");
            BootstrapSpec b;
            b.radii = parse_radii(s.at("radii"));
            if (s.contains("B")) {
                b.B = count_field(s, "B", "bootstrap");
            }
            if (s.contains("n")) {
                b.n = count_field(s, "n", "bootstrap");
            }
            c.bootstrap = b;
        }
        if (j.contains("path")) {
            const auto& s = j.at("path");
            only_keys(s, {"radii", "C_grid"}, "path");
            PathSpec p;
            p.radii = parse_radii(s.at("radii"));
            if (s.contains("C_grid")) {
                const auto& g = s.at("C_grid");
                p.C_grid = g.is_string() ? parse_C_grid(g.get<std::string>()) : g.get<std::vector<double>>();
            }
            c.path = p;
        }
        if (j.contains("ladder")) {
            const auto& s = j.at("ladder");
            only_keys(s, {"depth_grid", "resolution"}, "ladder");
            LadderSpec l;
            if (s.contains("depth_grid")) {
                l.depth_grid = parse_depth_grid(s.at("depth_grid"));
            }
            if (s.contains("resolution")) {
                l.resolution = count_field(s, "resolution", "ladder");
            }
            c.ladder = l;
        }
        if (j.contains("explain")) {
            const auto& s = j.at("explain");
            only_keys(s, {"radius"}, "explain");
            c.explain = ExplainSpec{real_field(s, "radius", "explain")};
        }
        if (j.contains("output")) {
            const auto& s = j.at("output");
            only_keys(s, {"dir", "svg"}, "output");
            if (s.contains("dir")) {
                c.output.dir = resolve(s.at("dir").get<std::string>(), base_dir);
            }
            if (s.contains("svg")) {
                c.output.svg = s.at("svg").get<bool>();
            }
        }
        return c;
    } catch (const Json::exception& e) {
        throw ConfigError(e.what());
    } catch (const ParseError& e) {
        throw ConfigError(e.what());
    } catch (const InvalidArgument& e) {
        throw ConfigError(e.what());
    }
}

RunConfig load_run_config(const std::filesystem::path& file)
{
    std::ifstream in(file);
    if (!in) {
        throw ConfigError("cannot open config '" + file.string() + "'");
    }
    std::stringstream buf;
    buf << in.rdbuf();
    Json j;
    try {
        j = parse_json(buf.str());
    } catch (const ParseError& e) {
        throw ConfigError("config '" + file.string() + "' is not valid JSON: " + e.what());
    }
    return parse_run_config(j, file.parent_path());
}

Pipeline materialize(const RunConfig& config)
{
    auto dataset = std::visit(
        [&](const auto& spec) -> Dataset {
            using T = std::decay_t<decltype(spec)>;
            if constexpr (std::is_same_v<T, GeneratorSpec>) {
                const RngSeed seed = spec.seed.value_or(derive_seed(config.seed, "dataset"));
                if (spec.name == "moons") {
                    return make_moons(spec.n, spec.noise.value_or(0.1), seed);
                }
                return make_circles(spec.n, spec.noise.value_or(0.05), spec.factor, seed);
            } else {
                return load_csv_binary(spec.path, spec.target, spec.threshold);
            }
        },
        config.dataset);

    Instance instance = std::visit(
        [&](const auto& src) -> Instance {
            using T = std::decay_t<decltype(src)>;
            if constexpr (std::is_same_v<T, std::size_t>) {
                if (src >= dataset.size()) {
                    throw ConfigError("instance.row " + std::to_string(src) + " is outside the dataset ("
                                      + std::to_string(dataset.size()) + " rows)");
                }
                return dataset.row_instance(src);
            } else {
                return Instance(src);
            }
        },
        config.instance.source);
    if (instance.dim() != dataset.dim()) {
        throw DimensionMismatch("instance has " + std::to_string(instance.dim()) + " features, dataset has "
                                + std::to_string(dataset.dim()));
    }

    BlackBoxRef bb;
    std::optional<double> accuracy;
    if (const auto* mlp = std::get_if<MlpConfig>(&config.blackbox.model)) {
        MlpConfig cfg = *mlp;
        cfg.seed = config.blackbox.mlp_seed.value_or(derive_seed(config.seed, "mlp"));
        auto trained = train_mlp(dataset, cfg);
        bb = trained.model;
        accuracy = trained.training_accuracy;
    } else {
        const auto& ext = std::get<ExternalSpec>(config.blackbox.model);
        bb = std::make_shared<ExternalProcessBlackBox>(ExternalProcessConfig{ext.command, dataset.dim(), ext.timeout});
    }
    return Pipeline{std::move(dataset), std::move(bb), accuracy, std::move(instance)};
}

} // namespace surrscope
