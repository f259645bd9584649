#pragma once

#include <string>
#include <vector>

#include "surrscope/app/config.hpp"

namespace surrscope {

enum class AnalysisKind { sweep, bootstrap, path, ladder, explain };

std::string to_string(AnalysisKind k);
AnalysisKind analysis_from_string(const std::string& name);

/// A file produced by a run: name relative to the output directory.
struct Artifact {
    std::string name;
    std::string content;
};

// Each runner needs the matching section of the config and throws
// ConfigError when it is missing or invalid.
SweepResult run_sweep(const Pipeline& p, const RunConfig& c, const RunOptions& opts = {});
std::vector<BootstrapSummary> run_bootstrap(const Pipeline& p, const RunConfig& c, const RunOptions& opts = {});
std::vector<LassoPathResult> run_path(const Pipeline& p, const RunConfig& c, const RunOptions& opts = {});
std::vector<LadderRung> run_ladder(const Pipeline& p, const RunConfig& c, const RunOptions& opts = {});
LocalFit run_explain(const Pipeline& p, const RunConfig& c, const RunOptions& opts = {});

/// Black-box and surrogate labels on a grid over the dataset bounds (2-D only).
struct BoundaryGrid {
    EvalGrid blackbox;
    BinaryLabels surrogate;
};

BoundaryGrid boundary_grid(const BlackBox& bb, const Surrogate& s, const std::vector<Bounds>& bounds,
                           std::size_t resolution);

/// Runs one analysis and renders its structured result, CSV and (optionally)
/// SVG plots. The structured result is artifacts[0].
std::vector<Artifact> run_analysis(AnalysisKind kind, const Pipeline& p, const RunConfig& c,
                                   const RunOptions& opts = {});

/// %.17g, or the empty string for an absent value.
std::string csv_number(double v);
std::string csv_number(const std::optional<double>& v);

std::string sweep_csv(const SweepResult& r);
std::string bootstrap_csv(const std::vector<BootstrapSummary>& r);
std::string path_csv(const std::vector<LassoPathResult>& r);
std::string ladder_csv(const std::vector<LadderRung>& r);
std::string explain_csv(const LocalFit& r);

} // namespace surrscope
