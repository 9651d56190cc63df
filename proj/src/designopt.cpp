#include "ptd/designopt.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <stdexcept>

#include "ptd/optim.hpp"

namespace ptd {

namespace {

// continuous exact penalty: large enough that constraint intrusion at the
// solver's equilibrium stays far below the 1e-6 scaled-margin tolerance
constexpr double kPenaltyWeight = 1e13;       // [J per unit scaled violation]
constexpr double kFeasibleTol = -1e-6;        // on scaled margins
constexpr double kTorqueSpeedCutoff = 0.5;    // [m/s]

double gradeability_gamma(const DesignProblem& prob, double p_rated) {
    const auto& vp = prob.vehicle;
    const double t_max = p_rated / prob.motor.omega_rated;
    return vp.mass * vp.gravity * vp.wheel_radius * std::sin(prob.alpha_max) /
           (vp.driveline_eff * t_max);
}

double top_speed_gamma_cap(const DesignProblem& prob) {
    return prob.motor.omega_max * prob.vehicle.wheel_radius /
           (prob.v_max * prob.vehicle.final_drive_ratio);
}

}  // namespace

void DesignBox::validate() const {
    if (!(p_min < p_max) || !(lambda_min < lambda_max) || !(gamma_min < gamma_max)) {
        throw std::invalid_argument("designopt: box needs min < max on every axis");
    }
    if (!(p_min > 0.0) || !(lambda_min > 0.0) || !(gamma_min > 0.0)) {
        throw std::invalid_argument("designopt: box bounds must be positive");
    }
}

bool DesignBox::contains(double p, double lambda, double gamma) const {
    return p >= p_min && p <= p_max && lambda >= lambda_min && lambda <= lambda_max &&
           gamma >= gamma_min && gamma <= gamma_max;
}

void DesignProblem::validate() const {
    cycle.validate();
    vehicle.validate();
    motor.validate();
    battery.validate();
    surrogate.validate();
    box.validate();
    if (box.p_min < surrogate.space.p_min || box.p_max > surrogate.space.p_max ||
        box.lambda_min < surrogate.space.lambda_min ||
        box.lambda_max > surrogate.space.lambda_max) {
        throw std::invalid_argument(
            "designopt: design box exceeds the surrogate's trained space");
    }
    if (!(v_max > 0.0)) throw std::invalid_argument("designopt: v_max must be positive");
    if (!(alpha_max > 0.0 && alpha_max < kPi / 2.0)) {
        throw std::invalid_argument("designopt: alpha_max must be in (0, pi/2)");
    }
}

MotorSpeedResult motor_speed(const DriveCycle& cycle, const VehicleParams& vp,
                             double gamma_fgt, double omega_max) {
    if (!(gamma_fgt > 0.0)) {
        throw std::invalid_argument("designopt: gamma_fgt must be positive");
    }
    MotorSpeedResult result;
    result.omega.resize(cycle.size());
    const double ratio = gamma_fgt * vp.final_drive_ratio / vp.wheel_radius;
    for (std::size_t k = 0; k < cycle.size(); ++k) {
        result.omega[k] = ratio * cycle.v[k];
        if (result.omega[k] > omega_max) result.overspeed = true;
    }
    return result;
}

bool FeasibilityReport::feasible() const {
    for (const auto& c : constraints) {
        if (!c.satisfied) return false;
    }
    return true;
}

double FeasibilityReport::violation() const {
    double total = 0.0;
    for (const auto& c : constraints) total += std::max(0.0, -c.scaled);
    return total;
}

const ConstraintMargin* FeasibilityReport::find(const std::string& name) const {
    for (const auto& c : constraints) {
        if (c.name == name) return &c;
    }
    return nullptr;
}

namespace {

ConstraintMargin make_margin(std::string name, double margin, double scale) {
    ConstraintMargin c;
    c.name = std::move(name);
    c.margin = margin;
    c.scaled = margin / scale;
    c.satisfied = c.scaled >= kFeasibleTol;
    return c;
}

DesignEvaluation evaluate_design(const DesignVector& p, const DesignProblem& prob,
                                 bool want_traj) {
    if (!prob.box.contains(p.p_rated, p.lambda, p.gamma_fgt)) {
        throw std::invalid_argument("designopt: design outside the box");
    }
    const auto& vp = prob.vehicle;
    const auto& cycle = prob.cycle;
    const std::size_t n = cycle.size();

    DesignEvaluation eval;
    auto speeds = motor_speed(cycle, vp, p.gamma_fgt, prob.motor.omega_max);
    const std::vector<double> p_req = wheel_power(cycle, vp);
    const std::vector<double> p_m = motor_mech_power(p_req, vp, p.p_rated);

    // gear-ratio structural constraints
    const double gamma_cap = top_speed_gamma_cap(prob);
    const double gamma_req = gradeability_gamma(prob, p.p_rated);
    eval.report.constraints.push_back(
        make_margin("top_speed", gamma_cap - p.gamma_fgt, gamma_cap));
    eval.report.constraints.push_back(
        make_margin("gradeability", p.gamma_fgt - gamma_req, gamma_req));

    // power adequacy, both signs (the regen side is met by the clip)
    double max_pm = p_m[0], min_pm = p_m[0], max_omega = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        max_pm = std::max(max_pm, p_m[k]);
        min_pm = std::min(min_pm, p_m[k]);
        max_omega = std::max(max_omega, speeds.omega[k]);
    }
    eval.report.constraints.push_back(make_margin(
        "power_adequacy", std::min(p.p_rated - max_pm, p.p_rated + min_pm), p.p_rated));
    eval.report.constraints.push_back(make_margin(
        "motor_overspeed", prob.motor.omega_max - max_omega, prob.motor.omega_max));

    // per-sample torque adequacy in motoring and regeneration form
    const double t_max = p.p_rated / prob.motor.omega_rated;
    const double lhs_motoring = t_max * p.gamma_fgt * vp.driveline_eff;
    const double lhs_regen = t_max * p.gamma_fgt / vp.driveline_eff;
    double min_motoring = lhs_motoring;
    double min_regen = lhs_regen;
    for (std::size_t k = 0; k < n; ++k) {
        if (cycle.v[k] < kTorqueSpeedCutoff) continue;
        const double rhs = p_req[k] * vp.wheel_radius / cycle.v[k];
        min_motoring = std::min(min_motoring, lhs_motoring - rhs);
        min_regen = std::min(min_regen, lhs_regen - rhs);
    }
    eval.report.constraints.push_back(
        make_margin("torque_motoring", min_motoring, lhs_motoring));
    eval.report.constraints.push_back(make_margin("torque_regen", min_regen, lhs_regen));

    // loss chain and battery integration
    const MotorDesign d = p.motor();
    std::vector<double> p_loss(n), p_dc(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double w = std::min(speeds.omega[k], prob.motor.omega_max);
        p_loss[k] = predict_loss(prob.surrogate, w, d, p_m[k]);
        p_dc[k] = p_m[k] + p_loss[k];
    }
    SoeTrajectory soe =
        integrate_soe(prob.battery, p_dc, vp.aux_power, cycle.dt, prob.battery.zeta_max);

    double min_e = soe.e_b[0];
    for (double e : soe.e_b) min_e = std::min(min_e, e);
    const double floor = prob.battery.zeta_min * prob.battery.e_max;
    const double window =
        (prob.battery.zeta_max - prob.battery.zeta_min) * prob.battery.e_max;
    eval.report.constraints.push_back(make_margin("soc_window", min_e - floor, window));

    eval.delta_e = soe.delta_e;
    // continuous along the feasibility boundary so finite differences stay
    // informative there; zero violation leaves delta_e untouched
    eval.value = eval.delta_e + kPenaltyWeight * eval.report.violation();

    if (want_traj) {
        eval.traj.omega = std::move(speeds.omega);
        eval.traj.p_m = p_m;
        eval.traj.p_loss = std::move(p_loss);
        eval.traj.p_i.resize(n);
        for (std::size_t k = 0; k < n; ++k) {
            const double p_b = p_dc[k] + vp.aux_power;
            eval.traj.p_i[k] =
                prob.battery.b0 + prob.battery.b1 * p_b + prob.battery.b2 * p_b * p_b;
        }
        eval.traj.p_dc = std::move(p_dc);
        eval.traj.soe = std::move(soe);
    }
    return eval;
}

SolveResult finish_result(const DesignVector& design, const DesignProblem& prob,
                          const char* method) {
    auto eval = evaluate_design(design, prob, true);
    SolveResult result;
    result.design = design;
    result.delta_e = eval.delta_e;
    result.traj = std::move(eval.traj);
    result.report = std::move(eval.report);
    result.diag.method = method;
    return result;
}

}  // namespace

FeasibilityReport check_feasible(const DesignVector& p, const DesignProblem& prob) {
    return evaluate_design(p, prob, false).report;
}

DesignEvaluation objective(const DesignVector& p, const DesignProblem& prob,
                           bool want_traj) {
    return evaluate_design(p, prob, want_traj);
}

std::string box_infeasibility(const DesignProblem& prob) {
    const double gamma_cap = top_speed_gamma_cap(prob);
    if (prob.box.gamma_min > gamma_cap) return "top_speed";
    if (gradeability_gamma(prob, prob.box.p_max) > prob.box.gamma_max) {
        return "gradeability";
    }

    const std::vector<double> p_req = wheel_power(prob.cycle, prob.vehicle);
    double max_req = 0.0, max_v = 0.0;
    for (std::size_t k = 0; k < p_req.size(); ++k) {
        max_req = std::max(max_req, p_req[k]);
        max_v = std::max(max_v, prob.cycle.v[k]);
    }
    if (max_req / prob.vehicle.driveline_eff > prob.box.p_max) return "power_adequacy";
    if (prob.box.gamma_min * prob.vehicle.final_drive_ratio * max_v /
            prob.vehicle.wheel_radius > prob.motor.omega_max) {
        return "motor_overspeed";
    }
    return {};
}

SolveResult grid_search(const DesignProblem& prob, const GridOptions& opt) {
    prob.validate();
    if (opt.n_p < 5 || opt.n_lambda < 5 || opt.n_gamma < 5) {
        throw std::invalid_argument("grid_search: resolution must be >= 5 per axis");
    }
    const auto t0 = std::chrono::steady_clock::now();

    const auto sample = [&prob](const optim::Vector3d& x) {
        const auto eval = evaluate_design({x[0], x[1], x[2]}, prob, false);
        return optim::GridSample{eval.delta_e, eval.report.feasible()};
    };

    optim::GridSpec spec;
    spec.lo = {prob.box.p_min, prob.box.lambda_min, prob.box.gamma_min};
    spec.hi = {prob.box.p_max, prob.box.lambda_max, prob.box.gamma_max};
    spec.n = {opt.n_p, opt.n_lambda, opt.n_gamma};

    optim::GridOutcome coarse = optim::grid_minimize(sample, spec);
    if (!coarse.found) throw std::runtime_error("grid_search: empty feasible set");

    GridDiagnostics diag;
    diag.n_p = opt.n_p;
    diag.n_lambda = opt.n_lambda;
    diag.n_gamma = opt.n_gamma;
    for (int axis = 0; axis < 3; ++axis) {
        diag.cell_size[static_cast<std::size_t>(axis)] =
            (spec.hi[axis] - spec.lo[axis]) / (spec.n[static_cast<std::size_t>(axis)] - 1);
    }
    diag.evaluated = coarse.evaluated;
    diag.feasible_cells = coarse.feasible;
    diag.best_index = coarse.index;
    diag.coarse_best = coarse.value;

    optim::Vector3d best_x = coarse.x;
    double best_value = coarse.value;
    if (opt.refine) {
        diag.refined = true;
        optim::GridSpec fine;
        for (int axis = 0; axis < 3; ++axis) {
            const auto a = static_cast<std::size_t>(axis);
            const double cell = diag.cell_size[a];
            fine.lo[axis] = std::max(spec.lo[axis], coarse.x[axis] - cell);
            fine.hi[axis] = std::min(spec.hi[axis], coarse.x[axis] + cell);
            fine.n[a] = 7;   // one coarse cell each way at 3x resolution
        }
        const optim::GridOutcome refined = optim::grid_minimize(sample, fine);
        diag.evaluated += refined.evaluated;
        if (refined.found && refined.value < best_value) {
            best_value = refined.value;
            best_x = refined.x;
        }
    }

    SolveResult result = finish_result({best_x[0], best_x[1], best_x[2]}, prob, "grid");
    result.diag.grid = diag;
    result.diag.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return result;
}

SolveResult local_solve(const DesignProblem& prob, const LocalOptions& opt) {
    prob.validate();
    if (opt.starts < 1) throw std::invalid_argument("local_solve: starts must be >= 1");
    const auto t0 = std::chrono::steady_clock::now();

    const optim::Vector3d lo(prob.box.p_min, prob.box.lambda_min, prob.box.gamma_min);
    const optim::Vector3d width(prob.box.p_max - prob.box.p_min,
                                prob.box.lambda_max - prob.box.lambda_min,
                                prob.box.gamma_max - prob.box.gamma_min);
    // The gear-ratio feasible interval is known in closed form, so candidates
    // ride it instead of bouncing off the penalty: gamma is clamped into
    // [gamma_req(P), gamma_cap] before evaluation and the finite-difference
    // gradient in P then sees the moving bound.
    const double gamma_cap =
        std::clamp(top_speed_gamma_cap(prob), prob.box.gamma_min, prob.box.gamma_max);
    auto unscale = [&](const optim::Vector3d& x) {
        DesignVector p{lo[0] + width[0] * x[0], lo[1] + width[1] * x[1],
                       lo[2] + width[2] * x[2]};
        const double gamma_floor =
            std::clamp(gradeability_gamma(prob, p.p_rated), prob.box.gamma_min, gamma_cap);
        p.gamma_fgt = std::clamp(p.gamma_fgt, gamma_floor, gamma_cap);
        return p;
    };
    long evals = 0;
    auto value = [&](const optim::Vector3d& x) {
        ++evals;
        return evaluate_design(unscale(x), prob, false).value;
    };

    std::mt19937_64 rng(opt.seed);
    auto draw_unit = [&rng]() { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };

    std::vector<optim::Vector3d> starts;
    const long max_draws = 100L * opt.starts;
    for (long attempt = 0;
         attempt < max_draws && starts.size() < static_cast<std::size_t>(opt.starts);
         ++attempt) {
        const optim::Vector3d x(draw_unit(), draw_unit(), draw_unit());
        if (evaluate_design(unscale(x), prob, false).report.feasible()) {
            starts.push_back(x);
        }
    }
    if (starts.size() < static_cast<std::size_t>(opt.starts)) {
        throw std::runtime_error("local_solve: no feasible start found after " +
                                 std::to_string(max_draws) + " draws");
    }

    LocalDiagnostics diag;
    diag.starts = opt.starts;
    bool have_best = false;
    optim::BfgsOutcome best;
    double worst_value = -std::numeric_limits<double>::infinity();
    for (const optim::Vector3d& x0 : starts) {
        const optim::BfgsOutcome out = optim::projected_bfgs(value, x0, opt.max_iterations);
        diag.iterations += out.iterations;
        if (out.converged) ++diag.converged;
        if (!have_best || out.value < best.value) {
            best = out;
            have_best = true;
        }
        worst_value = std::max(worst_value, out.value);
    }
    diag.objective_evals = evals;
    diag.spread_rel = (worst_value - best.value) / std::max(std::abs(best.value), 1e-300);

    SolveResult result = finish_result(unscale(best.x), prob, "local");
    result.diag.local = diag;
    result.diag.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return result;
}

SolveResult solve(const DesignProblem& prob, const SolveConfig& config) {
    prob.validate();
    if (const std::string name = box_infeasibility(prob); !name.empty()) {
        throw std::runtime_error("solve: design box infeasible, violated constraint: " +
                                 name);
    }

    SolveResult local = local_solve(prob, config.local);
    if (!config.use_grid) {
        local.diag.method = "local(uncrosschecked)";
        return local;
    }

    SolveResult grid = grid_search(prob, config.grid);
    CrossCheck cc;
    cc.performed = true;
    cc.objective_rel_gap = std::abs(local.delta_e - grid.delta_e) /
                           std::max(std::abs(grid.delta_e), 1e-300);
    cc.cell_distance = {
        std::abs(local.design.p_rated - grid.design.p_rated) / grid.diag.grid.cell_size[0],
        std::abs(local.design.lambda - grid.design.lambda) / grid.diag.grid.cell_size[1],
        std::abs(local.design.gamma_fgt - grid.design.gamma_fgt) /
            grid.diag.grid.cell_size[2]};

    const LocalDiagnostics local_diag = local.diag.local;
    const GridDiagnostics grid_diag = grid.diag.grid;
    SolveResult result =
        (grid.delta_e < local.delta_e) ? std::move(grid) : std::move(local);
    result.diag.method = "local+grid";
    result.diag.local = local_diag;
    result.diag.grid = grid_diag;
    result.diag.crosscheck = cc;
    return result;
}

}  // namespace ptd
