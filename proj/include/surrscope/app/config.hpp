#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "surrscope/analysis/analysis.hpp"
#include "surrscope/blackbox/external_process.hpp"
#include "surrscope/blackbox/mlp.hpp"
#include "surrscope/core/error.hpp"
#include "surrscope/data/dataset.hpp"
#include "surrscope/io/serialize.hpp"

namespace surrscope {

/// A run or session description that cannot be used as given.
class ConfigError : public Error {
public:
    using Error::Error;
};

struct GeneratorSpec {
    std::string name = "moons";
    std::size_t n = 1000;
    std::optional<double> noise;
    double factor = 0.5;
    std::optional<RngSeed> seed;
};

struct CsvSpec {
    std::filesystem::path path;
    std::string target = "target";
    Threshold threshold = MedianThreshold{};
};

struct ExternalSpec {
    std::vector<std::string> command;
    std::chrono::milliseconds timeout{10000};
};

struct BlackBoxSpec {
    std::variant<MlpConfig, ExternalSpec> model;
    /// MLP training seed; unset means derived from the run seed.
    std::optional<RngSeed> mlp_seed;
};

struct InstanceSpec {
    std::variant<std::size_t, std::vector<double>> source;
};

struct SweepSpec {
    std::vector<double> radii;
};

struct BootstrapSpec {
    std::vector<double> radii;
    std::size_t B = 500;
    std::size_t n = 200;
};

struct PathSpec {
    std::vector<double> radii;
    std::vector<double> C_grid = default_C_grid();
};

struct LadderSpec {
    std::vector<std::optional<std::size_t>> depth_grid{1, 2, 3, 5, std::nullopt};
    std::size_t resolution = 100;
};

struct ExplainSpec {
    double radius = 0.5;
};

struct OutputSpec {
    std::filesystem::path dir = "surrscope-out";
    bool svg = true;
};

/// Everything a CLI run or a service session needs. Seeds of the dataset
/// generator and the MLP default to streams derived from `seed`.
struct RunConfig {
    RngSeed seed{0};
    std::variant<GeneratorSpec, CsvSpec> dataset;
    BlackBoxSpec blackbox;
    InstanceSpec instance;
    SpecDefaults neighbourhood;
    FitConfig fit;
    std::optional<SweepSpec> sweep;
    std::optional<BootstrapSpec> bootstrap;
    std::optional<PathSpec> path;
    std::optional<LadderSpec> ladder;
    std::optional<ExplainSpec> explain;
    OutputSpec output;
};

/// Relative file paths in `j` resolve against `base_dir`.
RunConfig parse_run_config(const Json& j, const std::filesystem::path& base_dir);
RunConfig load_run_config(const std::filesystem::path& file);

/// "lo:hi:count" (log-spaced) or a comma-separated list.
std::vector<double> parse_C_grid(const std::string& text);

/// `steps` values from lo to hi inclusive, evenly spaced.
std::vector<double> linear_grid(double lo, double hi, std::size_t steps);

/// Radii from either an array or {"min", "max", "steps"}.
std::vector<double> parse_radii(const Json& j);

FitConfig parse_fit_config(const Json& j);

/// The realised inputs of an analysis.
struct Pipeline {
    Dataset dataset;
    BlackBoxRef blackbox;
    /// Set for the built-in MLP.
    std::optional<double> training_accuracy;
    Instance instance;
};

/// Builds the dataset, trains or attaches the black-box, and resolves the
/// instance. Dimension disagreements are DimensionMismatch.
Pipeline materialize(const RunConfig& config);

} // namespace surrscope
