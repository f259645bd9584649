#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <unistd.h>

#include <CLI11.hpp>
#include <omp.h>

#include "surrscope/app/config.hpp"
#include "surrscope/app/report.hpp"
#include "surrscope/service/service.hpp"

namespace {

using namespace surrscope;

constexpr int kConfigFailure = 1;
constexpr int kAnalysisFailure = 2;

struct Overrides {
    std::string config;
    std::optional<double> radius_min;
    std::optional<double> radius_max;
    std::optional<std::size_t> radius_steps;
    std::optional<double> radius;
    std::optional<std::string> family;
    std::optional<std::string> C_grid;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> B;
    std::optional<std::size_t> n;
    std::optional<std::string> out_dir;
    int threads = 0;
    bool no_svg = false;
};

void add_run_options(CLI::App* cmd, Overrides& o)
{
    cmd->add_option("--config", o.config, "Run configuration (JSON)")->required();
    cmd->add_option("--radius-min", o.radius_min, "Smallest radius of the grid");
    cmd->add_option("--radius-max", o.radius_max, "Largest radius of the grid");
    cmd->add_option("--radius-steps", o.radius_steps, "Number of evenly spaced radii");
    cmd->add_option("--family", o.family, "Surrogate family: logistic, logistic_l1 or tree");
    cmd->add_option("--C-grid", o.C_grid, "lo:hi:count (log-spaced) or a comma-separated list");
    cmd->add_option("--seed", o.seed, "Analysis seed (overrides SURRSCOPE_SEED and the config)");
    cmd->add_option("--B", o.B, "Bootstrap replicates per radius");
    cmd->add_option("--n", o.n, "Bootstrap neighbourhood size");
    cmd->add_option("--out-dir", o.out_dir, "Output directory");
    cmd->add_option("--threads", o.threads, "Maximum worker threads (0 = all)")->check(CLI::NonNegativeNumber);
    cmd->add_flag("--no-svg", o.no_svg, "Skip SVG plots");
}

std::optional<std::vector<double>> radius_override(const Overrides& o)
{
    const int given = o.radius_min.has_value() + o.radius_max.has_value() + o.radius_steps.has_value();
    if (given == 0) {
        return std::nullopt;
    }
    if (given != 3) {
        throw ConfigError("--radius-min, --radius-max and --radius-steps go together");
    }
    return linear_grid(*o.radius_min, *o.radius_max, *o.radius_steps);
}

void apply(const Overrides& o, AnalysisKind kind, RunConfig& c)
{
    if (const char* env = std::getenv("SURRSCOPE_SEED"); env && *env) {
        try {
            std::size_t used = 0;
            c.seed = RngSeed{std::stoull(env, &used)};
            if (env[used] != '\0') {
                throw std::invalid_argument(env);
            }
        } catch (const std::exception&) {
            throw ConfigError(std::string("SURRSCOPE_SEED must be an unsigned integer, got '") + env + "'");
        }
    }
    if (o.seed) {
        c.seed = RngSeed{*o.seed};
    }
    if (o.family) {
        c.fit.family = family_from_string(*o.family);
        if (c.fit.family != Family::logistic_l1) {
            c.fit.C.reset();
        }
    }
    if (o.out_dir) {
        c.output.dir = *o.out_dir;
    }
    if (o.no_svg) {
        c.output.svg = false;
    }
    const auto radii = radius_override(o);
    switch (kind) {
    case AnalysisKind::sweep:
        if (radii) {
            c.sweep = SweepSpec{*radii};
        }
        break;
    case AnalysisKind::bootstrap:
        if (radii || o.B || o.n) {
            BootstrapSpec b = c.bootstrap.value_or(BootstrapSpec{});
            if (radii) {
                b.radii = *radii;
            }
            b.B = o.B.value_or(b.B);
            b.n = o.n.value_or(b.n);
            c.bootstrap = b;
        }
        break;
    case AnalysisKind::path:
        if (radii || o.C_grid) {
            PathSpec p = c.path.value_or(PathSpec{});
            if (radii) {
                p.radii = *radii;
            }
            if (o.C_grid) {
                p.C_grid = parse_C_grid(*o.C_grid);
            }
            c.path = p;
        }
        break;
    case AnalysisKind::explain:
        if (o.radius) {
            c.explain = ExplainSpec{*o.radius};
        }
        break;
    case AnalysisKind::ladder:
        break;
    }
}

/// Writes every artifact to a temporary name first and renames only once all
/// of them are on disk.
void write_outputs(const std::filesystem::path& dir, const std::vector<Artifact>& files)
{
    std::filesystem::create_directories(dir);
    std::vector<std::pair<std::filesystem::path, std::filesystem::path>> staged;
    try {
        for (const auto& f : files) {
            const auto target = dir / f.name;
            const auto tmp = dir / ("." + f.name + ".tmp" + std::to_string(::getpid()));
            std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
            out << f.content;
            out.close();
            if (!out) {
                throw Error("cannot write " + tmp.string());
            }
            staged.emplace_back(tmp, target);
        }
    } catch (...) {
        for (const auto& [tmp, _] : staged) {
            std::error_code ec;
            std::filesystem::remove(tmp, ec);
        }
        throw;
    }
    for (const auto& [tmp, target] : staged) {
        std::filesystem::rename(tmp, target);
    }
}

int run_command(AnalysisKind kind, const Overrides& o)
{
    RunConfig config;
    std::optional<Pipeline> pipeline;
    try {
        config = load_run_config(o.config);
        apply(o, kind, config);
        pipeline.emplace(materialize(config));
    } catch (const Error& e) {
        std::cerr << "surrscope: error: " << e.what() << "\n";
        return kConfigFailure;
    }
    if (o.threads > 0) {
        omp_set_num_threads(o.threads);
    }
    std::vector<Artifact> files;
    try {
        files = run_analysis(kind, *pipeline, config, RunOptions{ExecPolicy::openmp(o.threads), nullptr});
    } catch (const ConfigError& e) {
        std::cerr << "surrscope: error: " << e.what() << "\n";
        return kConfigFailure;
    } catch (const std::exception& e) {
        std::cerr << "surrscope: analysis failed: " << e.what() << "\n";
        return kAnalysisFailure;
    }
    try {
        write_outputs(config.output.dir, files);
    } catch (const std::exception& e) {
        std::cerr << "surrscope: cannot write outputs: " << e.what() << "\n";
        return kAnalysisFailure;
    }
    if (pipeline->training_accuracy) {
        std::cout << "black-box training accuracy: " << *pipeline->training_accuracy << "\n";
    }
    for (const auto& f : files) {
        std::cout << (config.output.dir / f.name).string() << "\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Local surrogate explanations: coverage sweeps, bootstrap bands, lasso paths"};
    app.require_subcommand(1);

    const std::pair<AnalysisKind, const char*> commands[] = {
        {AnalysisKind::sweep, "Fit surrogates over a grid of radii"},
        {AnalysisKind::bootstrap, "Mean and std of surrogates over re-drawn neighbourhoods"},
        {AnalysisKind::path, "Lasso regularisation paths at one or more radii"},
        {AnalysisKind::ladder, "Global tree accuracy against depth on a meshgrid (2-D)"},
        {AnalysisKind::explain, "One surrogate and its fidelity at a single radius"},
    };
    Overrides overrides;
    std::optional<AnalysisKind> chosen;
    for (const auto& [kind, help] : commands) {
        auto* cmd = app.add_subcommand(to_string(kind), help);
        add_run_options(cmd, overrides);
        if (kind == AnalysisKind::explain) {
            cmd->add_option("--radius", overrides.radius, "Neighbourhood radius");
        }
        cmd->callback([&chosen, kind = kind] { chosen = kind; });
    }

    std::string host = "127.0.0.1";
    int port = 8080;
    ServiceOptions service_options;
    std::string static_dir;
    std::string data_dir;
    int serve_threads = 0;
    auto* serve = app.add_subcommand("serve", "Start the HTTP service");
    serve->add_option("--host", host, "Listen address");
    serve->add_option("--port", port, "Listen port (0 picks a free one)");
    serve->add_option("--workers", service_options.workers, "Job worker threads");
    serve->add_option("--session-cap", service_options.session_cap, "Sessions kept before LRU eviction");
    serve->add_option("--static-dir", static_dir, "Directory of built UI assets");
    serve->add_option("--data-dir", data_dir, "Base directory for relative dataset paths");
    serve->add_option("--threads", serve_threads, "Maximum threads per job (0 = all)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : kConfigFailure;
    }

    if (chosen) {
        return run_command(*chosen, overrides);
    }

    service_options.static_dir = static_dir;
    if (!data_dir.empty()) {
        service_options.data_dir = data_dir;
    }
    service_options.exec = ExecPolicy::openmp(serve_threads);
    try {
        Service service(service_options);
        HttpServer server(service);
        const int bound = server.bind(host, port);
        std::cout << "surrscope listening on http://" << host << ":" << bound << "/" << std::endl;
        server.run();
    } catch (const std::exception& e) {
        std::cerr << "surrscope: " << e.what() << "\n";
        return kConfigFailure;
    }
    return 0;
}
