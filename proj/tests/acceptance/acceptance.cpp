// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <sys/wait.h>

#include <omp.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <thread>

#include <boost/math/distributions/chi_squared.hpp>
#include <httplib.h>

#include "surrscope/app/config.hpp"
#include "surrscope/app/report.hpp"
#include "surrscope/sampling/sampling.hpp"
#include "surrscope/service/service.hpp"
#include "test_util.hpp"

using namespace surrscope;
namespace fs = std::filesystem;

namespace {

/// Thrown by expect(); carries the reason a criterion failed.
struct Failure {
    std::string what;
};

void expect(bool ok, const std::string& what)
{
    if (!ok) {
        throw Failure{what};
    }
}

std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

fs::path fixture(const char* name)
{
    return fs::path(SURRSCOPE_FIXTURE_DIR) / name;
}

std::string read_file(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// ---- 1: sampler law ---------------------------------------------------------

std::string sampler_law()
{
    const std::size_t shells = 10;
    double worst_p = 1.0;
    for (std::size_t d : {1, 2, 5, 10}) {
        const std::vector<double> c(d, 0.0);
        const NeighbourhoodSpec spec(Instance(c), 1.0, 100000, RngSeed{2024 + d});
        const auto X = sample_ball(spec);
        expect(X.rows() == 100000, "wrong sample count");
        std::vector<double> observed(shells, 0.0);
        for (std::size_t i = 0; i < X.rows(); ++i) {
            const double rho = euclidean_distance(X.row(i), c);
            expect(rho <= 1.0, "point outside the ball in d=" + std::to_string(d));
            // Equal-probability shells: boundaries at (k / shells)^(1/d).
            const auto k = std::min(shells - 1, static_cast<std::size_t>(std::pow(rho, static_cast<double>(d))
                                                                         * static_cast<double>(shells)));
            observed[k] += 1.0;
        }
        const double expected = static_cast<double>(X.rows()) / static_cast<double>(shells);
        double chi2 = 0.0;
        for (double o : observed) {
            chi2 += (o - expected) * (o - expected) / expected;
        }
        const boost::math::chi_squared dist(static_cast<double>(shells - 1));
        const double p = boost::math::cdf(boost::math::complement(dist, chi2));
        expect(p > 0.001, "chi-square p=" + fmt(p) + " in d=" + std::to_string(d));
        worst_p = std::min(worst_p, p);
    }
    return "min p=" + fmt(worst_p);
}

// ---- 2: optimizer -------------------------------------------------------------

struct Problem {
    FeatureMatrix X;
    BinaryLabels y;
};

Problem random_problem(std::size_t n, std::size_t d, std::uint64_t seed)
{
    RandomStream rng(RngSeed{seed});
    auto X = testing::random_matrix(n, d, RngSeed{seed + 1000}, -2.0, 2.0);
    std::vector<double> w(d);
    for (auto& v : w) {
        v = rng.normal();
    }
    std::vector<std::uint8_t> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        double t = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            t += w[j] * X.at(i, j);
        }
        y[i] = rng.uniform() < 1.0 / (1.0 + std::exp(-t)) ? 1 : 0;
    }
    return {std::move(X), BinaryLabels(std::move(y))};
}

std::string optimizer()
{
    RandomStream rng(RngSeed{3});
    double worst = 0.0;
    for (std::uint64_t trial = 0; trial < 20; ++trial) {
        const auto p = random_problem(200, 5, 900 + trial);
        const TrainingView view{p.X, p.y, {}};
        std::vector<double> w(5);
        for (auto& v : w) {
            v = rng.normal();
        }
        const double b = rng.normal();
        const auto at = logistic_loss(view, w, b);
        const double h = 1e-6;
        for (std::size_t j = 0; j <= 5; ++j) {
            auto wp = w;
            auto wm = w;
            double bp = b;
            double bm = b;
            (j < 5 ? wp[j] : bp) += h;
            (j < 5 ? wm[j] : bm) -= h;
            const double fd = (logistic_loss(view, wp, bp).value - logistic_loss(view, wm, bm).value) / (2.0 * h);
            const double g = j < 5 ? at.grad_coefficients[j] : at.grad_intercept;
            worst = std::max(worst, std::abs(g - fd) / std::max({std::abs(g), std::abs(fd), 1e-6}));
        }
    }
    expect(worst <= 1e-5, "gradient relative error " + fmt(worst));

    std::size_t steps = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto p = random_problem(150, 5, seed);
        const TrainingView view{p.X, p.y, {}};
        double prev_norm = std::numeric_limits<double>::infinity();
        for (double C = 1000.0; C >= 1e-3; C /= 2.0) {
            FitConfig cfg;
            cfg.family = Family::logistic_l1;
            cfg.C = C;
            cfg.tol = 1e-10;
            cfg.max_iter = 100000;
            SolverTrace trace;
            const auto s = fit_logistic_l1(view, cfg, nullptr, &trace);
            for (std::size_t k = 1; k < trace.objective.size(); ++k) {
                expect(trace.objective[k] <= trace.objective[k - 1], "proximal objective rose");
            }
            steps += trace.objective.size() - 1;
            double norm = 0.0;
            for (double v : s.coefficients) {
                norm += std::abs(v);
            }
            expect(norm <= prev_norm + 1e-8, "L1 norm grew as C decreased at C=" + fmt(C));
            prev_norm = norm;
        }
    }
    return "max grad rel err=" + fmt(worst) + ", " + std::to_string(steps) + " monotone steps";
}

// ---- 3: tree oracle -----------------------------------------------------------

double training_accuracy(const TreeSurrogate& t, const FeatureMatrix& X, const BinaryLabels& y)
{
    const auto p = surrogate_predict(t, X);
    std::size_t ok = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        ok += p[i] == y[i];
    }
    return static_cast<double>(ok) / static_cast<double>(y.size());
}

double best_stump_accuracy(const FeatureMatrix& X, const BinaryLabels& y)
{
    const std::size_t n = y.size();
    const std::size_t pos = y.count_positive();
    double best = static_cast<double>(std::max(pos, n - pos)) / static_cast<double>(n);
    for (std::size_t f = 0; f < X.cols(); ++f) {
        for (std::size_t a = 0; a < n; ++a) {
            std::size_t l0 = 0, l1 = 0, r0 = 0, r1 = 0;
            for (std::size_t i = 0; i < n; ++i) {
                const bool left = X.at(i, f) <= X.at(a, f);
                (left ? (y[i] ? l1 : l0) : (y[i] ? r1 : r0))++;
            }
            best = std::max(best, static_cast<double>(std::max(l0, l1) + std::max(r0, r1)) / static_cast<double>(n));
        }
    }
    return best;
}

std::string tree_oracle()
{
    FitConfig stump;
    stump.family = Family::tree;
    stump.max_depth = 1;
    FitConfig two = stump;
    two.max_depth = 2;
    RandomStream rng(RngSeed{17});
    std::size_t instances = 0;
    // The unit square, then random axis-aligned rectangles; all 16 labelings.
    for (int layout = 0; layout < 20; ++layout) {
        std::vector<double> xy{0.0, 0.0, 0.0, 1.0, 1.0, 0.0, 1.0, 1.0};
        if (layout > 0) {
            const double x0 = rng.uniform() - 1.0;
            const double x1 = rng.uniform();
            const double y0 = rng.uniform() - 1.0;
            const double y1 = rng.uniform();
            xy = {x0, y0, x0, y1, x1, y0, x1, y1};
        }
        const FeatureMatrix X(4, 2, xy);
        for (unsigned mask = 0; mask < 16; ++mask) {
            const BinaryLabels y({static_cast<std::uint8_t>(mask & 1), static_cast<std::uint8_t>((mask >> 1) & 1),
                                  static_cast<std::uint8_t>((mask >> 2) & 1),
                                  static_cast<std::uint8_t>((mask >> 3) & 1)});
            const std::string where = "layout " + std::to_string(layout) + " mask " + std::to_string(mask);
            expect(training_accuracy(fit_tree(TrainingView{X, y, {}}, stump), X, y) == best_stump_accuracy(X, y),
                   "stump below oracle at " + where);
            expect(training_accuracy(fit_tree(TrainingView{X, y, {}}, two), X, y) == 1.0,
                   "depth 2 below 1.0 at " + where);
            ++instances;
        }
    }
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const auto X = testing::random_matrix(100, 3, RngSeed{500 + seed});
        RandomStream labels_rng(RngSeed{700 + seed});
        std::vector<std::uint8_t> labels(100);
        for (auto& v : labels) {
            v = labels_rng.uniform() < 0.45 ? 1 : 0;
        }
        const BinaryLabels y(labels);
        double prev = 0.0;
        for (std::size_t depth = 0; depth <= 15; ++depth) {
            FitConfig cfg;
            cfg.family = Family::tree;
            cfg.max_depth = depth;
            const double acc = training_accuracy(fit_tree(TrainingView{X, y, {}}, cfg), X, y);
            expect(acc >= prev, "training accuracy fell at depth " + std::to_string(depth));
            prev = acc;
        }
    }
    return std::to_string(instances) + " XOR-type instances, 50 prefix sets";
}

// ---- 4: Pareto oracle ---------------------------------------------------------

std::string pareto_oracle()
{
    RandomStream rng(RngSeed{99});
    std::size_t points = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 1 + rng.below(200);
        const bool coarse = trial % 2 == 0;
        std::vector<ParetoPoint> pts(n);
        for (auto& p : pts) {
            p.complexity = coarse ? static_cast<double>(rng.below(8)) : rng.uniform() * 10.0;
            p.fidelity = coarse ? static_cast<double>(rng.below(6)) / 5.0 : rng.uniform();
        }
        std::vector<std::size_t> brute;
        for (std::size_t i = 0; i < n; ++i) {
            bool dominated = false;
            for (std::size_t j = 0; j < n && !dominated; ++j) {
                dominated = pts[j].complexity <= pts[i].complexity && pts[j].fidelity >= pts[i].fidelity
                            && (pts[j].complexity < pts[i].complexity || pts[j].fidelity > pts[i].fidelity);
            }
            if (!dominated) {
                brute.push_back(i);
            }
        }
        expect(pareto_frontier(pts).frontier_indices == brute, "frontier differs on trial " + std::to_string(trial));
        points += n;
    }
    return "100 sets, " + std::to_string(points) + " points";
}

// ---- 5-8: pinned fixtures -----------------------------------------------------

std::string ladder()
{
    auto config = load_run_config(fixture("moons.json"));
    const auto p = materialize(config);
    const auto rungs = run_ladder(p, config);
    expect(rungs.size() == 5 && !rungs.back().max_depth, "unexpected depth grid");
    std::string trace;
    for (std::size_t k = 0; k < rungs.size(); ++k) {
        const double acc = rungs[k].fidelity.accuracy;
        expect(k == 0 || acc >= rungs[k - 1].fidelity.accuracy, "ladder accuracy fell");
        trace += (k ? "," : "") + fmt(acc);
    }
    expect(rungs.back().fidelity.accuracy >= 0.98, "unconstrained accuracy below 0.98");
    return "accuracy " + trace;
}

std::string sweep_trend()
{
    auto config = load_run_config(fixture("moons.json"));
    const auto p = materialize(config);
    expect(p.training_accuracy && *p.training_accuracy >= 0.95, "MLP training accuracy below 0.95");
    config.sweep = SweepSpec{linear_grid(0.1, 3.0, 10)};
    int both = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        config.seed = RngSeed{seed};
        const auto sweep = run_sweep(p, config);
        const bool transition = !sign_transitions(sweep).empty();
        const bool shrinking =
            sweep.entries.front().fidelity.accuracy > sweep.entries.back().fidelity.accuracy;
        both += transition && shrinking ? 1 : 0;
    }
    expect(both >= 8, std::to_string(both) + "/10 seeds");
    return "MLP train acc " + fmt(*p.training_accuracy) + ", " + std::to_string(both) + "/10 seeds";
}

std::string bootstrap_scale()
{
    auto config = load_run_config(fixture("moons.json"));
    const auto p = materialize(config);
    const auto radii = linear_grid(0.0, 1.8, 10);
    config.bootstrap = BootstrapSpec{radii, 500, 200};
    const auto t0 = std::chrono::steady_clock::now();
    const auto half = run_bootstrap(p, config);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    expect(secs < 300.0, "B=500 took " + fmt(secs) + " s");
    expect(half.size() == 10 && half[0].radius == 0.0, "unexpected radii");
    expect(half[0].accuracy_std == 0.0, "nonzero accuracy std at radius 0");
    for (double s : half[0].coef_std) {
        expect(s == 0.0, "nonzero coefficient std at radius 0");
    }
    config.bootstrap->B = 1000;
    const auto full = run_bootstrap(p, config);
    for (std::size_t r = 0; r < radii.size(); ++r) {
        expect(full[r].replicates.size() == 1000, "B=1000 replicate count");
        for (std::size_t b = 0; b < 500; ++b) {
            expect(full[r].replicates[b] == half[r].replicates[b] && full[r].replicate_seeds[b] == half[r].replicate_seeds[b],
                   "replicate " + std::to_string(b) + " changed at radius " + fmt(radii[r]));
        }
    }
    return "B=500 in " + fmt(secs) + " s, 5000 replicates preserved";
}

std::string lasso_trend()
{
    const auto config = load_run_config(fixture("diabetes.json"));
    const auto p = materialize(config);
    expect(p.dataset.size() == 442, "diabetes rows");
    const auto paths = run_path(p, config);
    expect(paths.size() == 3, "three pinned radii");
    for (const auto& path : paths) {
        expect(path.entries.front().l0 == 0, "nonzero coefficients at the strongest C, radius " + fmt(path.radius));
    }
    const double small = paths.front().mean_accuracy();
    const double large = paths.back().mean_accuracy();
    expect(small > large, "mean accuracy " + fmt(small) + " <= " + fmt(large));
    return "mean accuracy r=" + fmt(paths.front().radius) + ": " + fmt(small) + ", r=" + fmt(paths.back().radius)
           + ": " + fmt(large);
}

// ---- 9: CLI determinism -------------------------------------------------------

std::map<std::string, std::string> read_dir(const fs::path& dir)
{
    std::map<std::string, std::string> out;
    for (const auto& e : fs::directory_iterator(dir)) {
        out[e.path().filename().string()] = read_file(e.path());
    }
    return out;
}

std::string cli_determinism()
{
    const auto dir = fs::temp_directory_path() / "surrscope_acceptance_cli";
    fs::remove_all(dir);
    fs::create_directories(dir);
    fs::copy_file(fixture("moons.json"), dir / "run.json");
    const auto run = [&](const std::string& args) {
        const std::string cmd =
            "cd '" + dir.string() + "' && '" + SURRSCOPE_CLI + "' " + args + " --config run.json > cli.log 2>&1";
        const int status = std::system(cmd.c_str());
        expect(WIFEXITED(status) && WEXITSTATUS(status) == 0, "'" + args + "' failed");
    };
    std::size_t files = 0;
    for (const char* cmd : {"sweep", "bootstrap", "path", "ladder", "explain"}) {
        const std::string c(cmd);
        run(c + " --out-dir a");
        run(c + " --out-dir b");
        run(c + " --threads 1 --out-dir t1");
        run(c + " --threads 4 --out-dir t4");
        const auto a = read_dir(dir / "a");
        expect(a.count(c + ".json") == 1, c + ".json missing");
        expect(a == read_dir(dir / "b"), c + " differs on re-run");
        expect(a == read_dir(dir / "t1"), c + " differs under --threads 1");
        expect(a == read_dir(dir / "t4"), c + " differs under --threads 4");
        files += a.size();
        for (const char* sub : {"a", "b", "t1", "t4"}) {
            fs::remove_all(dir / sub);
        }
    }
    return std::to_string(files) + " files identical across 4 runs each";
}

// ---- 10: service parity -------------------------------------------------------

std::string service_parity()
{
    const auto fixture_json = parse_json(read_file(fixture("moons.json")));
    Json session;
    for (const char* key : {"seed", "dataset", "blackbox", "instance", "neighbourhood", "fit"}) {
        session[key] = fixture_json.at(key);
    }
    auto config = load_run_config(fixture("moons.json"));
    const auto p = materialize(config);

    Service service;
    HttpServer http(service);
    const int port = http.bind("127.0.0.1", 0);
    http.start();
    httplib::Client client("127.0.0.1", port);
    client.set_read_timeout(600, 0);

    const auto post = [&](const std::string& path, const std::string& body) {
        auto r = client.Post(path, body, "application/json");
        expect(r && r->status == 200, "POST " + path + " failed");
        return Json::parse(r->body);
    };
    const std::string id = post("/sessions", session.dump()).at("id").get<std::string>();

    const auto surrogate = post("/sessions/" + id + "/surrogate", Json{{"radius", config.explain->radius}}.dump());
    expect(surrogate.at("fit").dump() == serialize(run_explain(p, config)), "surrogate differs from library");

    std::size_t polls = 0;
    const auto job = [&](const std::string& kind, const Json& body) {
        const auto sub = post("/sessions/" + id + "/jobs/" + kind, body.dump());
        const std::string job_id = sub.at("job_id").get<std::string>();
        double last = 0.0;
        for (;;) {
            auto r = client.Get("/jobs/" + job_id);
            expect(r && r->status == 200, "poll failed");
            const auto j = Json::parse(r->body);
            const double progress = j.at("progress").get<double>();
            expect(progress >= last && progress <= 1.0, kind + " progress went backwards");
            last = progress;
            ++polls;
            if (j.at("status") == "done") {
                expect(progress == 1.0, kind + " finished below 1.0");
                return j.at("result").dump();
            }
            expect(j.at("status") == "pending", kind + " job failed");
            std::this_thread::sleep_for(std::chrono::milliseconds(10));
        }
    };
    expect(job("sweep", fixture_json.at("sweep")) == serialize(run_sweep(p, config)), "sweep differs");
    expect(job("bootstrap", fixture_json.at("bootstrap")) == serialize(run_bootstrap(p, config)),
           "bootstrap differs");
    expect(job("path", fixture_json.at("path")) == serialize(run_path(p, config)), "path differs");
    http.stop();
    return "surrogate + 3 jobs equal, " + std::to_string(polls) + " monotone polls";
}

} // namespace

int main()
{
    // Serial and parallel paths are both exercised even on one-core machines.
    omp_set_num_threads(std::max(4, omp_get_max_threads()));

    struct Criterion {
        int number;
        double limit_seconds;
        std::function<std::string()> run;
    };
    const Criterion criteria[] = {
        {1, 10.0, sampler_law},     {2, 10.0, optimizer},          {3, 30.0, tree_oracle},
        {4, 5.0, pareto_oracle},    {5, 60.0, ladder},             {6, 120.0, sweep_trend},
        {7, 900.0, bootstrap_scale}, {8, 120.0, lasso_trend},      {9, 600.0, cli_determinism},
        {10, 600.0, service_parity},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        std::string detail;
        bool ok = true;
        try {
            detail = c.run();
        } catch (const Failure& f) {
            ok = false;
            detail = f.what;
        } catch (const std::exception& e) {
            ok = false;
            detail = std::string("exception: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (ok && secs >= c.limit_seconds) {
            ok = false;
            detail += "; exceeded " + fmt(c.limit_seconds) + " s";
        }
        std::printf("criterion %d: %s (%s, %.2f s)\n", c.number, ok ? "PASS" : "FAIL", detail.c_str(), secs);
        std::fflush(stdout);
        failed += ok ? 0 : 1;
    }
    return failed == 0 ? 0 : 1;
}
