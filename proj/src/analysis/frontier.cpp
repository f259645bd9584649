#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "surrscope/analysis/analysis.hpp"
#include "surrscope/blackbox/meshgrid.hpp"
#include "surrscope/core/error.hpp"

namespace surrscope {

ParetoFrontier pareto_frontier(std::vector<ParetoPoint> points)
{
    if (points.empty()) {
        throw InvalidArgument("pareto_frontier: no points");
    }
    for (const auto& p : points) {
        if (!std::isfinite(p.complexity) || !std::isfinite(p.fidelity)) {
            throw InvalidArgument("pareto_frontier: non-finite point");
        }
    }
    // Sweep by increasing complexity, best fidelity first within a complexity.
    // A point survives iff its fidelity beats everything of strictly lower
    // complexity and it ties the best of its own complexity.
    std::vector<std::size_t> order(points.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (points[a].complexity != points[b].complexity) {
            return points[a].complexity < points[b].complexity;
        }
        if (points[a].fidelity != points[b].fidelity) {
            return points[a].fidelity > points[b].fidelity;
        }
        return a < b;
    });

    std::vector<std::size_t> frontier;
    bool have_best = false;
    double best_lower = 0.0;
    std::size_t i = 0;
    while (i < order.size()) {
        const double c = points[order[i]].complexity;
        const double top = points[order[i]].fidelity;
        std::size_t j = i;
        for (; j < order.size() && points[order[j]].complexity == c; ++j) {
            if (points[order[j]].fidelity == top && (!have_best || top > best_lower)) {
                frontier.push_back(order[j]);
            }
        }
        if (!have_best || top > best_lower) {
            best_lower = top;
            have_best = true;
        }
        i = j;
    }
    std::sort(frontier.begin(), frontier.end());
    return ParetoFrontier{std::move(points), std::move(frontier)};
}

ParetoFrontier pareto_frontier(const SweepResult& sweep)
{
    std::vector<ParetoPoint> points;
    points.reserve(sweep.entries.size());
    for (const auto& e : sweep.entries) {
        std::ostringstream tag;
        tag.precision(17);
        tag << "r=" << e.radius;
        points.push_back(ParetoPoint{scalar_complexity(e.complexity), e.fidelity.accuracy, tag.str()});
    }
    return pareto_frontier(std::move(points));
}

std::vector<SignTransition> sign_transitions(const std::vector<double>& radii,
                                             const std::vector<std::vector<double>>& series)
{
    if (radii.size() != series.size()) {
        throw DimensionMismatch("sign_transitions: one coefficient vector per radius required");
    }
    if (series.empty()) {
        return {};
    }
    const std::size_t d = series.front().size();
    for (const auto& v : series) {
        if (v.size() != d) {
            throw DimensionMismatch("sign_transitions: coefficient vectors differ in length");
        }
    }
    std::vector<SignTransition> out;
    for (std::size_t j = 0; j < d; ++j) {
        int last_sign = 0;
        double last_radius = 0.0;
        for (std::size_t k = 0; k < series.size(); ++k) {
            const double w = series[k][j];
            if (std::abs(w) <= kZeroCoefficient) {
                continue;
            }
            const int sign = w > 0.0 ? 1 : -1;
            if (last_sign != 0 && sign != last_sign) {
                out.push_back(SignTransition{j, last_radius, radii[k]});
            }
            last_sign = sign;
            last_radius = radii[k];
        }
    }
    return out;
}

std::vector<SignTransition> sign_transitions(const SweepResult& sweep)
{
    std::vector<double> radii;
    std::vector<std::vector<double>> series;
    for (const auto& e : sweep.entries) {
        if (const auto* lin = std::get_if<LinearSurrogate>(&e.surrogate)) {
            radii.push_back(e.radius);
            series.push_back(lin->coefficients);
        }
    }
    return sign_transitions(radii, series);
}

std::vector<LadderRung> complexity_ladder(const BlackBox& bb, const std::vector<Bounds>& bounds,
                                          const std::vector<std::optional<std::size_t>>& depth_grid,
                                          std::size_t resolution, const RunOptions& opts)
{
    if (depth_grid.empty()) {
        throw InvalidArgument("complexity_ladder: depth_grid must be non-empty");
    }
    for (std::size_t k = 1; k < depth_grid.size(); ++k) {
        const auto& prev = depth_grid[k - 1];
        const auto& cur = depth_grid[k];
        if (!prev || (cur && !(*prev < *cur))) {
            throw InvalidArgument("complexity_ladder: depth_grid must be increasing, unconstrained last");
        }
    }
    const auto grid = meshgrid_predict(bb, bounds, resolution);
    const TrainingView view{grid.points, grid.labels, {}};
    std::vector<LadderRung> out(depth_grid.size());
    if (opts.progress) {
        opts.progress->start(depth_grid.size());
    }
    parallel_for(opts.exec, depth_grid.size(), [&](std::size_t k) {
        FitConfig cfg;
        cfg.family = Family::tree;
        cfg.max_depth = depth_grid[k];
        const auto tree = fit_tree(view, cfg);
        out[k] = LadderRung{depth_grid[k], tree.depth, tree.n_leaves,
                            fidelity_from_labels(grid.labels, surrogate_predict(tree, grid.points), EvalKind::meshgrid)};
        if (opts.progress) {
            opts.progress->advance();
        }
    });
    return out;
}

} // namespace surrscope
