#include "surrscope/app/report.hpp"

#include <cstdio>
#include <sstream>

#include "surrscope/app/svg.hpp"

namespace surrscope {

namespace {

constexpr double kWidth = 760.0;
constexpr double kPanel = 300.0;

template <class T>
const T& require(const std::optional<T>& section, const char* name)
{
    if (!section) {
        throw ConfigError(std::string("config has no '") + name + "' section");
    }
    return *section;
}

// Library argument errors surface as config errors: the config asked for
// something the analysis cannot do.
template <class F>
auto as_config_errors(F&& f)
{
    try {
        return f();
    } catch (const InvalidArgument& e) {
        throw ConfigError(e.what());
    }
}

void check_fidelity_defaults(const RunConfig& c)
{
    try {
        c.neighbourhood.validate();
        c.fit.validate();
    } catch (const InvalidArgument& e) {
        throw ConfigError(e.what());
    }
}

std::vector<std::string> feature_labels(const Pipeline& p)
{
    return p.dataset.feature_names();
}

std::string fidelity_cells(const FidelityReport& f)
{
    return csv_number(f.accuracy) + "," + csv_number(f.tpr) + "," + csv_number(f.tnr) + ","
           + std::to_string(f.counts.tp) + "," + std::to_string(f.counts.fp) + "," + std::to_string(f.counts.tn) + ","
           + std::to_string(f.counts.fn) + "," + std::to_string(f.n_eval);
}

constexpr const char* kFidelityHeader = "accuracy,tpr,tnr,tp,fp,tn,fn,n_eval";

std::string local_fit_row(const LocalFit& e, std::size_t d)
{
    std::string row = csv_number(e.radius) + "," + fidelity_cells(e.fidelity) + "," + (e.degenerate ? "1" : "0");
    if (const auto* lin = std::get_if<LinearSurrogate>(&e.surrogate)) {
        row += "," + std::to_string(std::get<LinearComplexity>(e.complexity).l0) + ",,," + csv_number(lin->intercept);
        for (double w : lin->coefficients) {
            row += "," + csv_number(w);
        }
    } else {
        const auto& t = std::get<TreeSurrogate>(e.surrogate);
        row += ",," + std::to_string(t.depth) + "," + std::to_string(t.n_leaves) + ",";
        row += std::string(d, ',');
    }
    return row;
}

std::string local_fit_header(std::size_t d)
{
    std::string h = std::string("radius,") + kFidelityHeader + ",degenerate,l0,depth,n_leaves,intercept";
    for (std::size_t j = 0; j < d; ++j) {
        h += ",w" + std::to_string(j);
    }
    return h;
}

std::vector<svg::Series> fidelity_series(const std::vector<double>& x, const std::vector<FidelityReport>& reports)
{
    svg::Series acc{"accuracy", x, {}, {}, {}, true};
    svg::Series tpr{"TPR", {}, {}, {}, {}, true};
    svg::Series tnr{"TNR", {}, {}, {}, {}, true};
    for (std::size_t i = 0; i < reports.size(); ++i) {
        acc.y.push_back(reports[i].accuracy);
        if (reports[i].tpr) {
            tpr.x.push_back(x[i]);
            tpr.y.push_back(*reports[i].tpr);
        }
        if (reports[i].tnr) {
            tnr.x.push_back(x[i]);
            tnr.y.push_back(*reports[i].tnr);
        }
    }
    return {acc, tpr, tnr};
}

std::vector<Artifact> sweep_artifacts(const SweepResult& r, const Pipeline& p, const RunConfig& c)
{
    std::vector<Artifact> out{{"sweep.json", serialize(r)}, {"sweep.csv", sweep_csv(r)}};
    out.push_back({"sweep_pareto.json", serialize(pareto_frontier(r))});
    out.push_back({"sweep_transitions.json", serialize(sign_transitions(r))});
    if (!c.output.svg) {
        return out;
    }
    std::vector<FidelityReport> reports;
    for (const auto& e : r.entries) {
        reports.push_back(e.fidelity);
    }
    std::vector<std::string> panels{svg::line_panel({"Fidelity vs radius", "radius", "fidelity", false, 0.0, 1.0},
                                                    fidelity_series(r.radii, reports), kWidth, kPanel)};
    if (c.fit.family != Family::tree) {
        std::vector<svg::Series> coefs;
        const auto names = feature_labels(p);
        for (std::size_t j = 0; j < p.instance.dim(); ++j) {
            svg::Series s{names[j], r.radii, {}, {}, {}, true};
            for (const auto& e : r.entries) {
                s.y.push_back(std::get<LinearSurrogate>(e.surrogate).coefficients[j]);
            }
            coefs.push_back(std::move(s));
        }
        panels.push_back(svg::line_panel({"Coefficients vs radius", "radius", "coefficient", false, {}, {}}, coefs, kWidth, kPanel));
    } else {
        svg::Series depth{"depth", r.radii, {}, {}, {}, true};
        svg::Series leaves{"leaves", r.radii, {}, {}, {}, true};
        for (const auto& e : r.entries) {
            const auto& t = std::get<TreeSurrogate>(e.surrogate);
            depth.y.push_back(static_cast<double>(t.depth));
            leaves.y.push_back(static_cast<double>(t.n_leaves));
        }
        panels.push_back(svg::line_panel({"Tree complexity vs radius", "radius", "count", false, {}, {}}, {depth, leaves}, kWidth,
                                         kPanel));
    }
    out.push_back({"sweep.svg", svg::document(panels, kWidth, kPanel)});
    if (p.dataset.dim() == 2) {
        const auto grid = meshgrid_predict(*p.blackbox, p.dataset.bounds(), 60);
        const std::vector<double> x(p.instance.values().begin(), p.instance.values().end());
        out.push_back({"boundary.svg", svg::document({svg::heatmap_panel("Black-box labels", grid, nullptr, x,
                                                                         r.radii.back(), kWidth, 560.0)},
                                                     kWidth, 560.0)});
    }
    return out;
}

std::vector<Artifact> bootstrap_artifacts(const std::vector<BootstrapSummary>& r, const Pipeline& p,
                                          const RunConfig& c)
{
    std::vector<Artifact> out{{"bootstrap.json", serialize(r)}, {"bootstrap.csv", bootstrap_csv(r)}};
    if (!c.output.svg) {
        return out;
    }
    svg::Series acc{"accuracy", {}, {}, {}, {}, true};
    for (const auto& s : r) {
        acc.x.push_back(s.radius);
        acc.y.push_back(s.accuracy_mean);
        acc.lower.push_back(s.accuracy_mean - s.accuracy_std);
        acc.upper.push_back(s.accuracy_mean + s.accuracy_std);
    }
    std::vector<svg::Series> coefs;
    const auto names = feature_labels(p);
    for (std::size_t j = 0; j < p.instance.dim(); ++j) {
        svg::Series s{names[j], {}, {}, {}, {}, true};
        for (const auto& b : r) {
            s.x.push_back(b.radius);
            s.y.push_back(b.coef_mean[j]);
            s.lower.push_back(b.coef_mean[j] - b.coef_std[j]);
            s.upper.push_back(b.coef_mean[j] + b.coef_std[j]);
        }
        coefs.push_back(std::move(s));
    }
    out.push_back({"bootstrap.svg",
                   svg::document({svg::line_panel({"Accuracy mean +/- 1 std", "radius", "accuracy", false, {}, {}}, {acc}, kWidth,
                                                  kPanel),
                                  svg::line_panel({"Coefficient mean +/- 1 std", "radius", "coefficient", false, {}, {}}, coefs,
                                                  kWidth, kPanel)},
                                 kWidth, kPanel)});
    return out;
}

std::vector<Artifact> path_artifacts(const std::vector<LassoPathResult>& r, const Pipeline& p, const RunConfig& c)
{
    std::vector<Artifact> out{{"path.json", serialize(r)}, {"path.csv", path_csv(r)}};
    if (!c.output.svg) {
        return out;
    }
    const auto names = feature_labels(p);
    for (std::size_t k = 0; k < r.size(); ++k) {
        const auto& path = r[k];
        std::vector<svg::Series> coefs;
        for (std::size_t j = 0; j < p.instance.dim(); ++j) {
            svg::Series s{names[j], path.C_grid, {}, {}, {}, false};
            for (const auto& e : path.entries) {
                s.y.push_back(e.coefficients[j]);
            }
            coefs.push_back(std::move(s));
        }
        svg::Series acc{"accuracy", path.C_grid, {}, {}, {}, true};
        svg::Series l0{"l0", path.C_grid, {}, {}, {}, true};
        for (const auto& e : path.entries) {
            acc.y.push_back(e.fidelity.accuracy);
            l0.y.push_back(static_cast<double>(e.l0));
        }
        std::ostringstream title;
        title.precision(6);
        title << "Lasso path, radius " << path.radius;
        out.push_back({"path_" + std::to_string(k) + ".svg",
                       svg::document({svg::line_panel({title.str(), "C", "coefficient", true, {}, {}}, coefs, kWidth, kPanel),
                                      svg::line_panel({"Accuracy", "C", "accuracy", true, {}, {}}, {acc}, kWidth, kPanel),
                                      svg::line_panel({"Non-zero coefficients", "C", "l0", true, 0.0, {}}, {l0}, kWidth,
                                                      kPanel)},
                                     kWidth, kPanel)});
    }
    return out;
}

std::vector<Artifact> ladder_artifacts(const std::vector<LadderRung>& r, const RunConfig& c)
{
    std::vector<Artifact> out{{"ladder.json", serialize(r)}, {"ladder.csv", ladder_csv(r)}};
    if (!c.output.svg) {
        return out;
    }
    svg::Series acc{"accuracy", {}, {}, {}, {}, true};
    for (const auto& rung : r) {
        acc.x.push_back(static_cast<double>(rung.n_leaves));
        acc.y.push_back(rung.fidelity.accuracy);
    }
    out.push_back({"ladder.svg", svg::document({svg::line_panel({"Global tree: accuracy vs leaves", "leaves",
                                                                 "meshgrid accuracy", false, {}, {}},
                                                                {acc}, kWidth, kPanel)},
                                               kWidth, kPanel)});
    return out;
}

std::vector<Artifact> explain_artifacts(const LocalFit& r, const Pipeline& p, const RunConfig& c)
{
    std::vector<Artifact> out{{"explain.json", serialize(r)}, {"explain.csv", explain_csv(r)}};
    if (!c.output.svg) {
        return out;
    }
    std::vector<std::string> panels;
    if (const auto* lin = std::get_if<LinearSurrogate>(&r.surrogate)) {
        panels.push_back(svg::bar_panel("Surrogate coefficients", feature_labels(p), lin->coefficients, kWidth,
                                        kPanel));
        out.push_back({"explain.svg", svg::document(panels, kWidth, kPanel)});
    }
    if (p.dataset.dim() == 2) {
        const auto g = boundary_grid(*p.blackbox, r.surrogate, p.dataset.bounds(), 60);
        const std::vector<double> x(p.instance.values().begin(), p.instance.values().end());
        out.push_back({"boundary.svg",
                       svg::document({svg::heatmap_panel("Black-box labels with surrogate boundary", g.blackbox,
                                                         &g.surrogate, x, r.radius, kWidth, 560.0)},
                                     kWidth, 560.0)});
    }
    return out;
}

} // namespace

std::string to_string(AnalysisKind k)
{
    switch (k) {
    case AnalysisKind::sweep:
        return "sweep";
    case AnalysisKind::bootstrap:
        return "bootstrap";
    case AnalysisKind::path:
        return "path";
    case AnalysisKind::ladder:
        return "ladder";
    case AnalysisKind::explain:
        return "explain";
    }
    return "unknown";
}

AnalysisKind analysis_from_string(const std::string& name)
{
    for (auto k : {AnalysisKind::sweep, AnalysisKind::bootstrap, AnalysisKind::path, AnalysisKind::ladder,
                   AnalysisKind::explain}) {
        if (to_string(k) == name) {
            return k;
        }
    }
    throw ConfigError("unknown analysis '" + name + "'");
}

std::string csv_number(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string csv_number(const std::optional<double>& v)
{
    return v ? csv_number(*v) : std::string();
}

SweepResult run_sweep(const Pipeline& p, const RunConfig& c, const RunOptions& opts)
{
    const auto& spec = require(c.sweep, "sweep");
    check_fidelity_defaults(c);
    return as_config_errors(
        [&] { return coverage_sweep(*p.blackbox, p.instance, spec.radii, c.fit, c.neighbourhood, c.seed, opts); });
}

std::vector<BootstrapSummary> run_bootstrap(const Pipeline& p, const RunConfig& c, const RunOptions& opts)
{
    const auto& spec = require(c.bootstrap, "bootstrap");
    check_fidelity_defaults(c);
    return as_config_errors([&] {
        return bootstrap_sweep(*p.blackbox, p.instance, spec.radii, spec.B, spec.n, c.fit, c.neighbourhood, c.seed,
                               opts);
    });
}

std::vector<LassoPathResult> run_path(const Pipeline& p, const RunConfig& c, const RunOptions& opts)
{
    const auto& spec = require(c.path, "path");
    try {
        c.neighbourhood.validate();
    } catch (const InvalidArgument& e) {
        throw ConfigError(e.what());
    }
    return as_config_errors([&] {
        return lasso_paths(*p.blackbox, p.instance, spec.radii, spec.C_grid, c.fit, c.neighbourhood, c.seed, opts);
    });
}

std::vector<LadderRung> run_ladder(const Pipeline& p, const RunConfig& c, const RunOptions& opts)
{
    const auto& spec = require(c.ladder, "ladder");
    if (p.dataset.dim() != 2) {
        throw ConfigError("ladder needs a 2-D dataset");
    }
    return as_config_errors(
        [&] { return complexity_ladder(*p.blackbox, p.dataset.bounds(), spec.depth_grid, spec.resolution, opts); });
}

LocalFit run_explain(const Pipeline& p, const RunConfig& c, const RunOptions& opts)
{
    const auto& spec = require(c.explain, "explain");
    check_fidelity_defaults(c);
    return as_config_errors(
        [&] { return fit_local(*p.blackbox, p.instance, spec.radius, c.fit, c.neighbourhood, c.seed, opts.exec); });
}

BoundaryGrid boundary_grid(const BlackBox& bb, const Surrogate& s, const std::vector<Bounds>& bounds,
                           std::size_t resolution)
{
    auto grid = meshgrid_predict(bb, bounds, resolution);
    auto labels = surrogate_predict(s, grid.points);
    return BoundaryGrid{std::move(grid), std::move(labels)};
}

std::vector<Artifact> run_analysis(AnalysisKind kind, const Pipeline& p, const RunConfig& c, const RunOptions& opts)
{
    switch (kind) {
    case AnalysisKind::sweep:
        return sweep_artifacts(run_sweep(p, c, opts), p, c);
    case AnalysisKind::bootstrap:
        return bootstrap_artifacts(run_bootstrap(p, c, opts), p, c);
    case AnalysisKind::path:
        return path_artifacts(run_path(p, c, opts), p, c);
    case AnalysisKind::ladder:
        return ladder_artifacts(run_ladder(p, c, opts), c);
    case AnalysisKind::explain:
        return explain_artifacts(run_explain(p, c, opts), p, c);
    }
    throw ConfigError("unknown analysis");
}

std::string sweep_csv(const SweepResult& r)
{
    const std::size_t d = r.entries.empty() ? 0 : [&] {
        if (const auto* lin = std::get_if<LinearSurrogate>(&r.entries.front().surrogate)) {
            return lin->coefficients.size();
        }
        return std::get<TreeSurrogate>(r.entries.front().surrogate).n_features;
    }();
    std::string out = local_fit_header(d) + "\n";
    for (const auto& e : r.entries) {
        out += local_fit_row(e, d) + "\n";
    }
    return out;
}

std::string explain_csv(const LocalFit& r)
{
    std::size_t d = 0;
    if (const auto* lin = std::get_if<LinearSurrogate>(&r.surrogate)) {
        d = lin->coefficients.size();
    } else {
        d = std::get<TreeSurrogate>(r.surrogate).n_features;
    }
    return local_fit_header(d) + "\n" + local_fit_row(r, d) + "\n";
}

std::string bootstrap_csv(const std::vector<BootstrapSummary>& r)
{
    const std::size_t d = r.empty() ? 0 : r.front().coef_mean.size();
    std::string out = "radius,B,n,accuracy_mean,accuracy_std";
    for (std::size_t j = 0; j < d; ++j) {
        out += ",coef_mean" + std::to_string(j);
    }
    for (std::size_t j = 0; j < d; ++j) {
        out += ",coef_std" + std::to_string(j);
    }
    out += "\n";
    for (const auto& s : r) {
        out += csv_number(s.radius) + "," + std::to_string(s.B) + "," + std::to_string(s.n) + ","
               + csv_number(s.accuracy_mean) + "," + csv_number(s.accuracy_std);
        for (double v : s.coef_mean) {
            out += "," + csv_number(v);
        }
        for (double v : s.coef_std) {
            out += "," + csv_number(v);
        }
        out += "\n";
    }
    return out;
}

std::string path_csv(const std::vector<LassoPathResult>& r)
{
    const std::size_t d = r.empty() || r.front().entries.empty() ? 0 : r.front().entries.front().coefficients.size();
    std::string out = std::string("radius,C,") + kFidelityHeader + ",l0,intercept";
    for (std::size_t j = 0; j < d; ++j) {
        out += ",w" + std::to_string(j);
    }
    out += "\n";
    for (const auto& path : r) {
        for (const auto& e : path.entries) {
            out += csv_number(path.radius) + "," + csv_number(e.C) + "," + fidelity_cells(e.fidelity) + ","
                   + std::to_string(e.l0) + "," + csv_number(e.intercept);
            for (double w : e.coefficients) {
                out += "," + csv_number(w);
            }
            out += "\n";
        }
    }
    return out;
}

std::string ladder_csv(const std::vector<LadderRung>& r)
{
    std::string out = std::string("max_depth,depth,n_leaves,") + kFidelityHeader + "\n";
    for (const auto& rung : r) {
        out += (rung.max_depth ? std::to_string(*rung.max_depth) : std::string("inf")) + ","
               + std::to_string(rung.depth) + "," + std::to_string(rung.n_leaves) + "," + fidelity_cells(rung.fidelity)
               + "\n";
    }
    return out;
}

} // namespace surrscope
