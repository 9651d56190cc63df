#pragma once

#include <vector>

#include "ptd/designopt.hpp"
#include "ptd/motor_oracle.hpp"

namespace ptd {

/// Side-by-side comparison of the solved trajectories against an oracle
/// re-simulation of the same design.
struct ValidationReport {
    std::vector<double> loss_surrogate;   // [W]
    std::vector<double> loss_oracle;      // [W]
    std::vector<double> e_b;              // solution SOE [J]
    std::vector<double> e_b_val;          // oracle SOE [J]
    std::vector<double> drift;            // e_b - e_b_val [J], starts at 0
    double final_drift_j = 0.0;           // |drift.back()|
    double final_rel_drift = 0.0;         // vs oracle-consumed energy
    double consumed_j = 0.0;              // e_b.front() - e_b_val.back()
    int clamped = 0;
    double loss_nrmse = 0.0;
};

/// Re-simulate the solution's (omega, P_m) trajectory through the oracle and
/// quantify the surrogate-induced SOE drift.
ValidationReport validate_design(const SolveResult& result, const DesignProblem& prob,
                                 const MotorTechSpec& oracle_spec);

/// Same comparison against an externally supplied validation loss sequence
/// (e.g. the surrogate itself, which must produce an all-zero drift).
ValidationReport validate_against_losses(const SolveResult& result,
                                         const DesignProblem& prob,
                                         std::span<const double> loss_val, int clamped);

/// Surrogate-predicted and oracle loss maps on one grid, plus their signed
/// difference (surrogate - oracle, zero where infeasible).
struct PairedMaps {
    EfficiencyMap surrogate;
    EfficiencyMap oracle;
    Eigen::MatrixXd diff;
};

PairedMaps map_comparison(const MotorDesign& d, const DesignProblem& prob,
                          const MotorTechSpec& oracle_spec, int n_omega, int n_torque);

/// NRMSE of electrical power P_dc = P_m + P_loss between the paired maps over
/// feasible cells with omega >= omega_min and P_m <= pm_max.
double pdc_nrmse(const PairedMaps& maps, double omega_min, double pm_max);

}  // namespace ptd
