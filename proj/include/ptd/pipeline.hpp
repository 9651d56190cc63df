#pragma once

#include <string>

#include "ptd/config.hpp"
#include "ptd/designopt.hpp"
#include "ptd/validate.hpp"

namespace ptd::pipeline {

/// Names of the files each stage writes into the output directory.
inline constexpr const char* kPlanFile = "plan.csv";
inline constexpr const char* kBundleFile = "bundle.json";
inline constexpr const char* kFitReportFile = "fit_report.json";
inline constexpr const char* kBatterySamplesFile = "battery_samples.csv";
inline constexpr const char* kSolutionFile = "solution.json";
inline constexpr const char* kTrajectoriesFile = "trajectories.csv";
inline constexpr const char* kValidationFile = "validation.json";
inline constexpr const char* kValidationTrajectoriesFile = "validation_trajectories.csv";
inline constexpr const char* kReportMapsFile = "report_maps.csv";
inline constexpr const char* kReportTrajectoriesFile = "report_trajectories.csv";

/// Write the sampling plan and one oracle efficiency map per plan design.
void cmd_sample(const ToolkitConfig& config, const std::string& out_dir);

/// Fit the loss surrogate against the oracle on the sampled plan, fit the
/// battery, and persist both as a bundle plus a fit-quality report.
void cmd_fit(const ToolkitConfig& config, const std::string& out_dir);

/// Solve the design problem from the fitted bundle; writes the solution JSON
/// and trajectory CSV and prints a one-line summary.
SolveResult cmd_optimize(const ToolkitConfig& config, const std::string& out_dir);

/// Re-simulate the optimum through the oracle and write the drift report.
ValidationReport cmd_validate(const ToolkitConfig& config, const std::string& out_dir);

/// Emit plot-ready long-format map and trajectory tables for the optimum.
void cmd_report(const ToolkitConfig& config, const std::string& out_dir);

/// Problem assembly shared by optimize/validate/report: cycle from config,
/// box from the bundle's trained space plus the configured gear bounds.
DesignProblem make_problem(const ToolkitConfig& config, LossSurrogate surrogate,
                           BatteryModel battery);

}  // namespace ptd::pipeline
