#include <catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "surrscope/app/config.hpp"
#include "surrscope/app/report.hpp"

using namespace surrscope;
namespace fs = std::filesystem;

namespace {

const char* kConfig = R"({
    "seed": 11,
    "dataset": {"generator": "moons", "n": 200, "noise": 0.1, "seed": 0},
    "blackbox": {"mlp": {"hidden_layers": [8], "epochs": 300, "seed": 0}},
    "instance": {"values": [0.5, 0.25]},
    "neighbourhood": {"n_samples": 200, "eval_samples": 300},
    "fit": {"family": "logistic"},
    "sweep": {"radii": [0.25, 0.5, 1.0, 2.0]},
    "bootstrap": {"radii": [0.0, 0.5], "B": 4, "n": 30},
    "path": {"radii": [0.5, 1.0], "C_grid": "0.1:100:4"},
    "ladder": {"depth_grid": [1, 2, null], "resolution": 20},
    "explain": {"radius": 0.5},
    "output": {"dir": "out"}
})";

fs::path fresh_dir(const std::string& name)
{
    const auto dir = fs::temp_directory_path() / ("surrscope_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

fs::path write_config(const fs::path& dir, const std::string& text = kConfig)
{
    std::ofstream(dir / "run.json") << text;
    return dir / "run.json";
}

int run_cli(const fs::path& cwd, const std::string& args, const std::string& env = "")
{
    const std::string cmd = "cd '" + cwd.string() + "' && " + (env.empty() ? "" : env + " ") + "'"
                            + SURRSCOPE_CLI + "' " + args + " > cli.log 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::map<std::string, std::string> read_dir(const fs::path& dir)
{
    std::map<std::string, std::string> out;
    for (const auto& e : fs::directory_iterator(dir)) {
        std::ifstream in(e.path(), std::ios::binary);
        std::stringstream buf;
        buf << in.rdbuf();
        out[e.path().filename().string()] = buf.str();
    }
    return out;
}

} // namespace

TEST_CASE("sweep output equals the library call")
{
    const auto dir = fresh_dir("sweep");
    const auto cfg = write_config(dir);
    REQUIRE(run_cli(dir, "sweep --config run.json") == 0);
    const auto files = read_dir(dir / "out");
    for (const char* name : {"sweep.json", "sweep.csv", "sweep_pareto.json", "sweep_transitions.json", "sweep.svg",
                             "boundary.svg"}) {
        CHECK(files.count(name) == 1);
    }
    const auto config = load_run_config(cfg);
    const auto lib = run_sweep(materialize(config), config);
    CHECK(deserialize<SweepResult>(files.at("sweep.json")) == lib);
    CHECK(files.at("sweep.json") == serialize(lib));
}

TEST_CASE("every subcommand is byte-identical on re-run and across thread counts")
{
    const auto dir = fresh_dir("determinism");
    write_config(dir);
    for (const char* cmd : {"sweep", "bootstrap", "path", "ladder", "explain"}) {
        CAPTURE(cmd);
        REQUIRE(run_cli(dir, std::string(cmd) + " --config run.json --threads 1 --out-dir a") == 0);
        REQUIRE(run_cli(dir, std::string(cmd) + " --config run.json --threads 1 --out-dir b") == 0);
        REQUIRE(run_cli(dir, std::string(cmd) + " --config run.json --threads 4 --out-dir c") == 0);
        const auto a = read_dir(dir / "a");
        CHECK(!a.empty());
        CHECK(a == read_dir(dir / "b"));
        CHECK(a == read_dir(dir / "c"));
        fs::remove_all(dir / "a");
        fs::remove_all(dir / "b");
        fs::remove_all(dir / "c");
    }
}

TEST_CASE("a malformed config exits 1 and writes nothing")
{
    const auto dir = fresh_dir("malformed");
    write_config(dir, R"({"dataset": {"generator": "moons"}, "blackbox": )");
    CHECK(run_cli(dir, "sweep --config run.json --out-dir out") == 1);
    CHECK(!fs::exists(dir / "out"));
    write_config(dir, R"({"dataset": {"generator": "spirals"}, "blackbox": {"mlp": {}}, "instance": {"row": 0}})");
    CHECK(run_cli(dir, "sweep --config run.json --out-dir out") == 1);
    CHECK(!fs::exists(dir / "out"));
    write_config(dir);
    CHECK(run_cli(dir, "sweep --config run.json --radius-min 0.1") == 1);
    CHECK(run_cli(dir, "sweep --config missing.json") == 1);
    CHECK(run_cli(dir, "sweep") == 1);
    CHECK(run_cli(dir, "sweep --config run.json", "SURRSCOPE_SEED=abc") == 1);
    CHECK(!fs::exists(dir / "out"));
    CHECK(run_cli(dir, "--help") == 0);
}

TEST_CASE("seed precedence: config, then SURRSCOPE_SEED, then --seed")
{
    const auto dir = fresh_dir("seed");
    write_config(dir);
    const auto sweep_json = [&](const std::string& args, const std::string& env) {
        REQUIRE(run_cli(dir, "sweep --no-svg --config run.json --out-dir o " + args, env) == 0);
        const auto files = read_dir(dir / "o");
        fs::remove_all(dir / "o");
        return files.at("sweep.json");
    };
    const auto base = sweep_json("", "");
    const auto env7 = sweep_json("", "SURRSCOPE_SEED=7");
    CHECK(base != env7);
    CHECK(sweep_json("--seed 7", "") == env7);
    CHECK(sweep_json("--seed 11", "SURRSCOPE_SEED=7") == base);
}

TEST_CASE("command-line overrides")
{
    const auto dir = fresh_dir("overrides");
    write_config(dir);
    REQUIRE(run_cli(dir, "sweep --config run.json --no-svg --radius-min 0.5 --radius-max 1.5 --radius-steps 3 "
                         "--family tree --out-dir o") == 0);
    const auto files = read_dir(dir / "o");
    CHECK(files.count("sweep.svg") == 0);
    const auto r = deserialize<SweepResult>(files.at("sweep.json"));
    CHECK(r.radii == std::vector<double>{0.5, 1.0, 1.5});
    CHECK(std::holds_alternative<TreeSurrogate>(r.entries[0].surrogate));

    REQUIRE(run_cli(dir, "explain --config run.json --radius 0.75 --out-dir e") == 0);
    CHECK(deserialize<LocalFit>(read_dir(dir / "e").at("explain.json")).radius == 0.75);

    REQUIRE(run_cli(dir, "bootstrap --config run.json --B 2 --n 10 --out-dir b") == 0);
    const auto boot = deserialize<std::vector<BootstrapSummary>>(read_dir(dir / "b").at("bootstrap.json"));
    CHECK(boot[0].B == 2);
    CHECK(boot[0].n == 10);

    REQUIRE(run_cli(dir, "path --config run.json --C-grid 0.5,5 --out-dir p") == 0);
    const auto path = deserialize<std::vector<LassoPathResult>>(read_dir(dir / "p").at("path.json"));
    CHECK(path[0].C_grid == std::vector<double>{0.5, 5.0});

    // Coefficient bootstrap needs a linear family; that is a config problem.
    CHECK(run_cli(dir, "bootstrap --config run.json --family tree --out-dir t") == 1);
    CHECK(!fs::exists(dir / "t"));
}
