#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "ptd/battery.hpp"
#include "ptd/cycle.hpp"
#include "ptd/surrogate.hpp"
#include "ptd/vehicle.hpp"

namespace ptd {

/// Box bounds of the three design variables.
struct DesignBox {
    double p_min = 70e3;
    double p_max = 150e3;
    double lambda_min = 1.0;
    double lambda_max = 4.0;
    double gamma_min = 1.0;
    double gamma_max = 10.0;

    void validate() const;
    bool contains(double p, double lambda, double gamma) const;
};

/// Full decision vector: motor rated power, relative length, gear ratio.
struct DesignVector {
    double p_rated = 0.0;
    double lambda = 0.0;
    double gamma_fgt = 0.0;

    MotorDesign motor() const { return {p_rated, lambda}; }
};

/// Everything needed to evaluate one candidate design over the mission.
struct DesignProblem {
    DriveCycle cycle;
    VehicleParams vehicle;
    MotorTechSpec motor;
    LossSurrogate surrogate;
    BatteryModel battery;
    double v_max = 160.0 / 3.6;       // [m/s]
    double alpha_max = 20.0 * kPi / 180.0;   // [rad]
    DesignBox box;

    void validate() const;
};

struct MotorSpeedResult {
    std::vector<double> omega;   // [rad/s]
    bool overspeed = false;
};

/// omega_m = gamma_fgt * gamma_fd * v / r_w, flagged (not thrown) when any
/// sample exceeds omega_max.
MotorSpeedResult motor_speed(const DriveCycle& cycle, const VehicleParams& vp,
                             double gamma_fgt,
                             double omega_max = std::numeric_limits<double>::infinity());

struct ConstraintMargin {
    std::string name;
    double margin = 0.0;    // raw units, >= 0 when satisfied
    double scaled = 0.0;    // margin over a characteristic positive scale
    bool satisfied = true;
};

struct FeasibilityReport {
    std::vector<ConstraintMargin> constraints;

    bool feasible() const;
    double violation() const;   // sum of scaled violations
    const ConstraintMargin* find(const std::string& name) const;
};

/// Evaluate gear, top-speed, gradeability, power-adequacy, per-sample torque
/// and SOC-window constraints at one design.
FeasibilityReport check_feasible(const DesignVector& p, const DesignProblem& prob);

/// Per-step operating sequences of one evaluated design.
struct Trajectories {
    std::vector<double> omega;    // [rad/s]
    std::vector<double> p_m;      // [W]
    std::vector<double> p_loss;   // [W]
    std::vector<double> p_dc;     // [W]
    std::vector<double> p_i;      // [W]
    SoeTrajectory soe;
};

struct DesignEvaluation {
    FeasibilityReport report;
    double delta_e = 0.0;    // [J], meaningful when feasible
    double value = 0.0;      // delta_e, or a large penalty when infeasible
    Trajectories traj;
};

/// Chain cycle -> motor power -> surrogate loss -> battery SOE and return the
/// consumed battery energy with all per-step sequences. Deterministic; an
/// infeasible design yields a penalty value and the feasibility report.
DesignEvaluation objective(const DesignVector& p, const DesignProblem& prob,
                           bool want_traj = true);

struct GridDiagnostics {
    int n_p = 0, n_lambda = 0, n_gamma = 0;
    long evaluated = 0;
    long feasible_cells = 0;
    bool refined = false;
    double coarse_best = 0.0;
    std::array<int, 3> best_index{0, 0, 0};
    std::array<double, 3> cell_size{0.0, 0.0, 0.0};
};

struct LocalDiagnostics {
    int starts = 0;
    int converged = 0;
    long iterations = 0;
    long objective_evals = 0;
    double spread_rel = 0.0;    // (worst-best)/|best| over completed starts
};

struct CrossCheck {
    bool performed = false;
    double objective_rel_gap = 0.0;
    std::array<double, 3> cell_distance{0.0, 0.0, 0.0};   // |local-grid| in cells
};

struct SolverDiagnostics {
    std::string method;
    LocalDiagnostics local;
    GridDiagnostics grid;
    CrossCheck crosscheck;
    double wall_time_s = 0.0;   // in-memory only, never persisted
};

struct SolveResult {
    DesignVector design;
    double delta_e = 0.0;
    Trajectories traj;
    FeasibilityReport report;
    SolverDiagnostics diag;
};

struct GridOptions {
    int n_p = 21;
    int n_lambda = 21;
    int n_gamma = 21;
    bool refine = true;   // one level of 3x refinement around the incumbent
};

/// Exhaustive search over the feasible design grid, lexicographic
/// tie-breaking on (P, lambda, gamma) indices. Throws when the whole grid is
/// infeasible.
SolveResult grid_search(const DesignProblem& prob, const GridOptions& opt);

struct LocalOptions {
    int starts = 8;
    std::uint64_t seed = 1;
    int max_iterations = 200;
};

/// Multi-start projected quasi-Newton with central finite differences
/// (step 1e-4 of each axis width), Armijo backtracking and box projection.
SolveResult local_solve(const DesignProblem& prob, const LocalOptions& opt);

struct SolveConfig {
    LocalOptions local;
    GridOptions grid;
    bool use_grid = true;
};

/// Local solve cross-checked against the grid oracle; returns whichever found
/// the better objective, with diagnostics of both.
SolveResult solve(const DesignProblem& prob, const SolveConfig& config);

/// Structural screen: constraints that rule out the entire box, by name.
/// Returns an empty string when the box passes.
std::string box_infeasibility(const DesignProblem& prob);

}  // namespace ptd
