#include "ptd/validate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ptd {

ValidationReport validate_design(const SolveResult& result, const DesignProblem& prob,
                                 const MotorTechSpec& oracle_spec) {
    const std::size_t n = prob.cycle.size();
    if (result.traj.omega.size() != n || result.traj.p_m.size() != n) {
        throw std::invalid_argument("validate: trajectory/cycle length mismatch");
    }
    const TrajectoryLosses oracle = evaluate_trajectory(
        oracle_spec, result.design.motor(), result.traj.omega, result.traj.p_m);
    return validate_against_losses(result, prob, oracle.loss, oracle.clamped);
}

ValidationReport validate_against_losses(const SolveResult& result,
                                         const DesignProblem& prob,
                                         std::span<const double> loss_val, int clamped) {
    const std::size_t n = prob.cycle.size();
    if (result.traj.omega.size() != n || result.traj.p_m.size() != n ||
        result.traj.p_loss.size() != n || result.traj.soe.e_b.size() != n + 1 ||
        loss_val.size() != n) {
        throw std::invalid_argument("validate: trajectory/cycle length mismatch");
    }

    ValidationReport report;
    report.loss_surrogate = result.traj.p_loss;
    report.e_b = result.traj.soe.e_b;
    report.loss_oracle.assign(loss_val.begin(), loss_val.end());
    report.clamped = clamped;

    std::vector<double> p_dc_val(n);
    for (std::size_t k = 0; k < n; ++k) p_dc_val[k] = result.traj.p_m[k] + loss_val[k];
    const SoeTrajectory soe_val = integrate_soe(prob.battery, p_dc_val,
                                                prob.vehicle.aux_power, prob.cycle.dt,
                                                prob.battery.zeta_max);
    report.e_b_val = soe_val.e_b;

    report.drift.resize(n + 1);
    for (std::size_t k = 0; k <= n; ++k) {
        report.drift[k] = report.e_b[k] - report.e_b_val[k];
    }

    report.final_drift_j = std::abs(report.drift.back());
    report.consumed_j = report.e_b.front() - report.e_b_val.back();
    report.final_rel_drift =
        (report.consumed_j > 0.0) ? report.final_drift_j / report.consumed_j : 0.0;
    double lo = report.loss_oracle[0], hi = report.loss_oracle[0];
    for (double x : report.loss_oracle) {
        lo = std::min(lo, x);
        hi = std::max(hi, x);
    }
    report.loss_nrmse = (hi > lo) ? nrmse(report.loss_surrogate, report.loss_oracle) : 0.0;
    return report;
}

PairedMaps map_comparison(const MotorDesign& d, const DesignProblem& prob,
                          const MotorTechSpec& oracle_spec, int n_omega, int n_torque) {
    if (!prob.surrogate.space.contains(d)) {
        throw std::invalid_argument("validate: design outside the surrogate space");
    }
    PairedMaps maps;
    maps.oracle = generate_map(oracle_spec, d, n_omega, n_torque);

    maps.surrogate = maps.oracle;
    maps.surrogate.loss.setZero();
    for (int i = 0; i < n_omega; ++i) {
        const double omega = maps.oracle.omega_grid[i];
        for (int j = 0; j < n_torque; ++j) {
            if (!maps.oracle.feasible(i, j)) continue;
            const double p_m = omega * maps.oracle.torque_grid[j];
            maps.surrogate.loss(i, j) = predict_loss(prob.surrogate, omega, d, p_m);
        }
    }
    maps.diff = maps.surrogate.loss - maps.oracle.loss;
    for (int i = 0; i < n_omega; ++i) {
        for (int j = 0; j < n_torque; ++j) {
            if (!maps.oracle.feasible(i, j)) maps.diff(i, j) = 0.0;
        }
    }
    return maps;
}

double pdc_nrmse(const PairedMaps& maps, double omega_min, double pm_max) {
    std::vector<double> pred, ref;
    const auto& oracle = maps.oracle;
    for (int i = 0; i < oracle.omega_grid.size(); ++i) {
        const double omega = oracle.omega_grid[i];
        if (omega < omega_min) continue;
        for (int j = 0; j < oracle.torque_grid.size(); ++j) {
            if (!oracle.feasible(i, j)) continue;
            const double p_m = omega * oracle.torque_grid[j];
            if (p_m > pm_max) continue;
            pred.push_back(p_m + maps.surrogate.loss(i, j));
            ref.push_back(p_m + oracle.loss(i, j));
        }
    }
    if (pred.size() < 2) {
        throw std::invalid_argument("validate: comparison window selects too few cells");
    }
    return nrmse(pred, ref);
}

}  // namespace ptd
