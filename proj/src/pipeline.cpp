#include "ptd/pipeline.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "ptd/csv.hpp"
#include "ptd/json_io.hpp"

namespace ptd::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string join(const std::string& dir, const std::string& name) {
    return (fs::path(dir) / name).string();
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw std::runtime_error("pipeline: cannot create output directory " + dir);
}

void require_file(const std::string& path, const std::string& producer) {
    if (!fs::exists(path)) {
        throw std::runtime_error("pipeline: missing " + path + "; run the '" + producer +
                                 "' command first");
    }
}

void write_json_file(const json& j, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("pipeline: cannot write " + path);
    out << j.dump(2) << '\n';
    if (!out) throw std::runtime_error("pipeline: write failed: " + path);
}

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("pipeline: cannot open " + path);
    try {
        json j;
        in >> j;
        return j;
    } catch (const json::parse_error& e) {
        throw std::runtime_error("pipeline: parse error in " + path + ": " + e.what());
    }
}

json report_to_json(const FeasibilityReport& report) {
    json arr = json::array();
    for (const auto& c : report.constraints) {
        arr.push_back({{"name", c.name},
                       {"margin", c.margin},
                       {"scaled", c.scaled},
                       {"satisfied", c.satisfied}});
    }
    return arr;
}

// Diagnostics are persisted without wall time so reruns are byte-identical.
json diagnostics_to_json(const SolverDiagnostics& diag) {
    json j;
    j["method"] = diag.method;
    j["local"] = {{"starts", diag.local.starts},
                  {"converged", diag.local.converged},
                  {"iterations", diag.local.iterations},
                  {"objective_evals", diag.local.objective_evals},
                  {"spread_rel", diag.local.spread_rel}};
    j["grid"] = {{"resolution", {diag.grid.n_p, diag.grid.n_lambda, diag.grid.n_gamma}},
                 {"evaluated", diag.grid.evaluated},
                 {"feasible_cells", diag.grid.feasible_cells},
                 {"refined", diag.grid.refined},
                 {"coarse_best_j", diag.grid.coarse_best}};
    j["crosscheck"] = {{"performed", diag.crosscheck.performed},
                       {"objective_rel_gap", diag.crosscheck.objective_rel_gap},
                       {"cell_distance", diag.crosscheck.cell_distance}};
    return j;
}

void write_trajectories_csv(const DriveCycle& cycle, const Trajectories& traj,
                            const std::string& path) {
    std::vector<std::vector<std::string>> rows;
    rows.reserve(cycle.size());
    for (std::size_t k = 0; k < cycle.size(); ++k) {
        rows.push_back({csv::format(static_cast<double>(k) * cycle.dt),
                        csv::format(cycle.v[k]), csv::format(traj.omega[k]),
                        csv::format(traj.p_m[k]), csv::format(traj.p_loss[k]),
                        csv::format(traj.p_dc[k]), csv::format(traj.p_i[k]),
                        csv::format(traj.soe.e_b[k])});
    }
    csv::write_file(path,
                    {"t_s", "v_mps", "omega_radps", "P_m_W", "P_loss_W", "P_dc_W", "P_i_W",
                     "E_b_J"},
                    rows);
}

void write_validation_trajectories_csv(const DriveCycle& cycle, const Trajectories& traj,
                                       const ValidationReport& report,
                                       const std::string& path) {
    std::vector<std::vector<std::string>> rows;
    rows.reserve(cycle.size());
    for (std::size_t k = 0; k < cycle.size(); ++k) {
        rows.push_back({csv::format(static_cast<double>(k) * cycle.dt),
                        csv::format(cycle.v[k]), csv::format(traj.omega[k]),
                        csv::format(traj.p_m[k]), csv::format(traj.p_loss[k]),
                        csv::format(traj.p_dc[k]), csv::format(traj.p_i[k]),
                        csv::format(traj.soe.e_b[k]), csv::format(report.loss_oracle[k]),
                        csv::format(report.e_b_val[k]), csv::format(report.drift[k])});
    }
    csv::write_file(path,
                    {"t_s", "v_mps", "omega_radps", "P_m_W", "P_loss_W", "P_dc_W", "P_i_W",
                     "E_b_J", "P_loss_val_W", "E_b_val_J", "drift_J"},
                    rows);
}

struct LoadedSolution {
    DesignVector design;
    DesignProblem prob;
};

LoadedSolution load_solution(const ToolkitConfig& config, const std::string& out_dir) {
    require_file(join(out_dir, kBundleFile), "fit");
    require_file(join(out_dir, kSolutionFile), "optimize");
    auto [surrogate, battery] = load_bundle(join(out_dir, kBundleFile));
    const json sol = load_json_file(join(out_dir, kSolutionFile));

    LoadedSolution loaded{
        {sol.at("design").at("p_rated_w").get<double>(),
         sol.at("design").at("lambda").get<double>(),
         sol.at("design").at("gamma_fgt").get<double>()},
        make_problem(config, std::move(surrogate), std::move(battery))};
    return loaded;
}

}  // namespace

DesignProblem make_problem(const ToolkitConfig& config, LossSurrogate surrogate,
                           BatteryModel battery) {
    DesignProblem prob;
    prob.cycle = config.make_cycle();
    prob.vehicle = config.vehicle;
    prob.motor = surrogate.spec;
    prob.box = {surrogate.space.p_min,      surrogate.space.p_max,
                surrogate.space.lambda_min, surrogate.space.lambda_max,
                config.gamma_min,           config.gamma_max};
    prob.surrogate = std::move(surrogate);
    prob.battery = std::move(battery);
    prob.v_max = config.v_max;
    prob.alpha_max = config.alpha_max;
    prob.validate();
    return prob;
}

void cmd_sample(const ToolkitConfig& config, const std::string& out_dir) {
    ensure_dir(out_dir);
    const SamplePlan plan = config.make_plan();
    write_plan_csv(plan, join(out_dir, kPlanFile));

    const int n = config.surrogate.map_points;
    for (std::size_t i = 0; i < plan.points.size(); ++i) {
        const EfficiencyMap map = generate_map(config.motor, plan.points[i], n, n);
        char stem[32];
        std::snprintf(stem, sizeof(stem), "map_%02zu", i);
        write_map_csv(map, join(out_dir, std::string(stem) + ".csv"));
        write_map_sidecar(map, config.motor, join(out_dir, std::string(stem) + ".json"));
    }
    std::printf("sample: wrote %zu plan points and %zu maps to %s\n", plan.points.size(),
                plan.points.size(), out_dir.c_str());
}

void cmd_fit(const ToolkitConfig& config, const std::string& out_dir) {
    ensure_dir(out_dir);
    require_file(join(out_dir, kPlanFile), "sample");
    const SamplePlan plan = load_plan_csv(join(out_dir, kPlanFile));

    SurrogateFitReport fit_report;
    const LossSurrogate surrogate =
        fit_surrogate(config.motor, config.space, plan, config.surrogate.power_levels,
                      config.surrogate.speed_samples, &fit_report);

    if (config.battery.samples_file.empty()) {
        write_battery_samples_csv(cell_stack_samples(config.battery.cell, config.battery.fit_samples),
                                  join(out_dir, kBatterySamplesFile));
    }
    const BatteryModel battery = config.make_battery_model();

    save_bundle(surrogate, battery, join(out_dir, kBundleFile));

    json report;
    report["battery"] = {{"b0", battery.b0},
                         {"b1", battery.b1},
                         {"b2", battery.b2},
                         {"nrmse", battery.fit_nrmse}};
    json levels = json::array();
    for (std::size_t i = 0; i < fit_report.levels.size(); ++i) {
        levels.push_back({{"p_level_w", surrogate.p_levels[i]},
                          {"iterations", fit_report.levels[i].iterations},
                          {"initial_cost", fit_report.levels[i].initial_cost},
                          {"final_cost", fit_report.levels[i].final_cost},
                          {"clamped_samples", fit_report.clamped_per_level[i]}});
    }
    report["levels"] = std::move(levels);

    // per-sample electrical-power accuracy over the trained envelope
    double mean = 0.0;
    json samples = json::array();
    for (const auto& d : plan.points) {
        PairedMaps maps;
        maps.oracle = generate_map(config.motor, d, config.surrogate.map_points,
                                   config.surrogate.map_points);
        maps.surrogate = maps.oracle;
        for (int i = 0; i < maps.oracle.omega_grid.size(); ++i) {
            for (int j = 0; j < maps.oracle.torque_grid.size(); ++j) {
                if (!maps.oracle.feasible(i, j)) continue;
                const double p_m = maps.oracle.omega_grid[i] * maps.oracle.torque_grid[j];
                maps.surrogate.loss(i, j) =
                    predict_loss(surrogate, maps.oracle.omega_grid[i], d, p_m);
            }
        }
        const double err = pdc_nrmse(maps, 0.1 * config.motor.omega_max, config.space.p_min);
        mean += err;
        samples.push_back(
            {{"p_rated_w", d.p_rated}, {"lambda", d.lambda}, {"pdc_nrmse", err}});
    }
    mean /= static_cast<double>(plan.points.size());
    report["samples"] = std::move(samples);
    report["mean_pdc_nrmse"] = mean;
    write_json_file(report, join(out_dir, kFitReportFile));

    std::printf("fit: mean P_dc NRMSE %.4f%%, battery NRMSE %.4f%%, bundle at %s\n",
                100.0 * mean, 100.0 * battery.fit_nrmse,
                join(out_dir, kBundleFile).c_str());
}

SolveResult cmd_optimize(const ToolkitConfig& config, const std::string& out_dir) {
    ensure_dir(out_dir);
    require_file(join(out_dir, kBundleFile), "fit");
    auto [surrogate, battery] = load_bundle(join(out_dir, kBundleFile));
    const DesignProblem prob = make_problem(config, std::move(surrogate), std::move(battery));

    SolveConfig solve_config;
    solve_config.local.starts = config.solver.starts;
    solve_config.local.seed = config.solver.seed;
    solve_config.grid.n_p = config.solver.grid_resolution;
    solve_config.grid.n_lambda = config.solver.grid_resolution;
    solve_config.grid.n_gamma = config.solver.grid_resolution;
    solve_config.grid.refine = config.solver.refine;
    solve_config.use_grid = config.solver.cross_check;

    const SolveResult result = solve(prob, solve_config);

    json sol;
    sol["design"] = {{"p_rated_w", result.design.p_rated},
                     {"lambda", result.design.lambda},
                     {"gamma_fgt", result.design.gamma_fgt}};
    sol["delta_e_j"] = result.delta_e;
    sol["soe"] = {{"e0_j", result.traj.soe.e_b.front()},
                  {"e_end_j", result.traj.soe.e_b.back()},
                  {"window_violation", result.traj.soe.window_violation}};
    sol["constraints"] = report_to_json(result.report);
    sol["diagnostics"] = diagnostics_to_json(result.diag);
    write_json_file(sol, join(out_dir, kSolutionFile));
    write_trajectories_csv(prob.cycle, result.traj, join(out_dir, kTrajectoriesFile));

    std::printf("P_rated_kW=%.6g lambda=%.6g gamma_fgt=%.6g deltaE_MJ=%.6g\n",
                result.design.p_rated / 1e3, result.design.lambda, result.design.gamma_fgt,
                result.delta_e / 1e6);
    return result;
}

ValidationReport cmd_validate(const ToolkitConfig& config, const std::string& out_dir) {
    ensure_dir(out_dir);
    const LoadedSolution loaded = load_solution(config, out_dir);

    // deterministic re-evaluation reproduces the solver's stored trajectories
    const DesignEvaluation eval = objective(loaded.design, loaded.prob, true);
    SolveResult result;
    result.design = loaded.design;
    result.delta_e = eval.delta_e;
    result.traj = eval.traj;
    result.report = eval.report;

    const ValidationReport report = validate_design(result, loaded.prob, loaded.prob.motor);

    json j;
    j["design"] = {{"p_rated_w", loaded.design.p_rated},
                   {"lambda", loaded.design.lambda},
                   {"gamma_fgt", loaded.design.gamma_fgt}};
    j["final_drift_j"] = report.final_drift_j;
    j["final_rel_drift"] = report.final_rel_drift;
    j["consumed_j"] = report.consumed_j;
    j["clamped_points"] = report.clamped;
    j["loss_nrmse"] = report.loss_nrmse;
    write_json_file(j, join(out_dir, kValidationFile));
    write_validation_trajectories_csv(loaded.prob.cycle, result.traj, report,
                                      join(out_dir, kValidationTrajectoriesFile));

    std::printf("validate: final_rel_drift=%.4f%% final_drift_kJ=%.4g clamped=%d\n",
                100.0 * report.final_rel_drift, report.final_drift_j / 1e3, report.clamped);
    return report;
}

void cmd_report(const ToolkitConfig& config, const std::string& out_dir) {
    ensure_dir(out_dir);
    const LoadedSolution loaded = load_solution(config, out_dir);

    const DesignEvaluation eval = objective(loaded.design, loaded.prob, true);
    SolveResult result;
    result.design = loaded.design;
    result.delta_e = eval.delta_e;
    result.traj = eval.traj;
    result.report = eval.report;
    const ValidationReport validation = validate_design(result, loaded.prob, loaded.prob.motor);
    write_validation_trajectories_csv(loaded.prob.cycle, result.traj, validation,
                                      join(out_dir, kReportTrajectoriesFile));

    const int n = config.surrogate.map_points;
    const PairedMaps maps =
        map_comparison(loaded.design.motor(), loaded.prob, loaded.prob.motor, n, n);
    std::vector<std::vector<std::string>> rows;
    rows.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const double omega = maps.oracle.omega_grid[i];
            const double torque = maps.oracle.torque_grid[j];
            const bool ok = maps.oracle.feasible(i, j);
            const double p_m = omega * torque;
            std::vector<std::string> row{csv::format(omega), csv::format(torque),
                                         ok ? "1" : "0"};
            if (ok) {
                const double pred = maps.surrogate.loss(i, j);
                const double truth = maps.oracle.loss(i, j);
                row.push_back(csv::format(p_m));
                row.push_back(csv::format(pred));
                row.push_back(csv::format(truth));
                row.push_back(csv::format(pred - truth));
                row.push_back(p_m > 0.0 ? csv::format(p_m / (p_m + pred)) : "");
                row.push_back(p_m > 0.0 ? csv::format(p_m / (p_m + truth)) : "");
            } else {
                row.insert(row.end(), {"", "", "", "", "", ""});
            }
            rows.push_back(std::move(row));
        }
    }
    csv::write_file(join(out_dir, kReportMapsFile),
                    {"omega_radps", "torque_Nm", "feasible", "P_m_W", "loss_pred_W",
                     "loss_oracle_W", "loss_diff_W", "eff_pred", "eff_oracle"},
                    rows);

    std::printf("report: wrote %s and %s\n", join(out_dir, kReportMapsFile).c_str(),
                join(out_dir, kReportTrajectoriesFile).c_str());
}

}  // namespace ptd::pipeline
