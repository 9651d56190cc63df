#include "ptd/motor_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "ptd/csv.hpp"

namespace ptd {

void MotorTechSpec::validate() const {
    if (!(voltage > 0.0)) throw std::invalid_argument("motor: voltage must be positive");
    if (!(omega_rated > 0.0 && omega_rated < omega_max)) {
        throw std::invalid_argument("motor: need 0 < omega_rated < omega_max");
    }
    if (pole_pairs < 1) throw std::invalid_argument("motor: pole_pairs must be >= 1");
}

double torque_limit(const MotorTechSpec& spec, double p_rated, double omega) {
    const double t_rated = rated_torque(spec, p_rated);
    if (omega <= spec.omega_rated) return t_rated;
    return p_rated / omega;
}

double oracle_loss(const MotorTechSpec& spec, const MotorDesign& d, double omega,
                   double torque) {
    if (!(d.p_rated > 0.0) || !(d.lambda > 0.0)) {
        throw std::invalid_argument("oracle: design must have positive power and lambda");
    }
    if (omega < 0.0 || omega > spec.omega_max) {
        throw std::domain_error("oracle: speed outside envelope");
    }
    if (std::abs(torque) > torque_limit(spec, d.p_rated, omega) * (1.0 + 1e-12)) {
        throw std::domain_error("oracle: torque outside envelope");
    }

    const double tau = std::abs(torque) / rated_torque(spec, d.p_rated);
    const double w_bar = omega / spec.omega_rated;

    const double copper = 0.025 * (1.0 + 0.45 / d.lambda) * d.p_rated * tau * tau;
    const double iron =
        0.012 * (1.0 + 0.05 * d.lambda) * d.p_rated * std::pow(w_bar, 1.6);
    const double windage = 0.004 * d.p_rated * std::pow(omega / spec.omega_max, 3);
    const double constant = 0.002 * d.p_rated;
    return copper + iron + windage + constant;
}

EfficiencyMap generate_map(const MotorTechSpec& spec, const MotorDesign& d,
                           int n_omega, int n_torque) {
    if (n_omega < 2 || n_torque < 2) {
        throw std::invalid_argument("oracle: map needs at least a 2x2 grid");
    }
    spec.validate();

    EfficiencyMap map;
    map.design = d;
    map.omega_grid = Eigen::VectorXd::LinSpaced(n_omega, spec.omega_eps(), spec.omega_max);
    map.torque_grid = Eigen::VectorXd::LinSpaced(n_torque, 0.0, rated_torque(spec, d.p_rated));
    map.loss.setZero(n_omega, n_torque);
    map.feasible.setConstant(n_omega, n_torque, false);
    map.torque_limit.resize(n_omega);

    for (int i = 0; i < n_omega; ++i) {
        const double omega = map.omega_grid[i];
        const double limit = torque_limit(spec, d.p_rated, omega);
        map.torque_limit[i] = limit;
        for (int j = 0; j < n_torque; ++j) {
            const double torque = map.torque_grid[j];
            if (torque <= limit * (1.0 + 1e-12)) {
                map.loss(i, j) = oracle_loss(spec, d, omega, std::min(torque, limit));
                map.feasible(i, j) = true;
            }
        }
    }
    return map;
}

TrajectoryLosses evaluate_trajectory(const MotorTechSpec& spec, const MotorDesign& d,
                                     std::span<const double> omega,
                                     std::span<const double> p_m) {
    if (omega.size() != p_m.size()) {
        throw std::invalid_argument("oracle: omega and p_m must have equal length");
    }
    TrajectoryLosses result;
    result.loss.resize(omega.size());
    const double w_eps = spec.omega_eps();
    for (std::size_t k = 0; k < omega.size(); ++k) {
        double w = omega[k];
        bool clamped = false;
        if (w > spec.omega_max) {
            w = spec.omega_max;
            clamped = true;
        }
        if (w < w_eps && p_m[k] != 0.0) clamped = true;   // speed floor engaged
        double torque = p_m[k] / std::max(w, w_eps);
        const double limit = torque_limit(spec, d.p_rated, w);
        if (std::abs(torque) > limit) {
            torque = std::copysign(limit, torque);
            clamped = true;
        }
        result.loss[k] = oracle_loss(spec, d, w, torque);
        if (clamped) ++result.clamped;
    }
    return result;
}

void write_map_csv(const EfficiencyMap& map, const std::string& path) {
    std::vector<std::vector<std::string>> rows;
    rows.reserve(static_cast<std::size_t>(map.loss.size()));
    for (int i = 0; i < map.omega_grid.size(); ++i) {
        for (int j = 0; j < map.torque_grid.size(); ++j) {
            rows.push_back({csv::format(map.omega_grid[i]), csv::format(map.torque_grid[j]),
                            csv::format(map.loss(i, j)), map.feasible(i, j) ? "1" : "0"});
        }
    }
    csv::write_file(path, {"omega_radps", "torque_Nm", "loss_W", "feasible"}, rows);
}

void write_map_sidecar(const EfficiencyMap& map, const MotorTechSpec& spec,
                       const std::string& path) {
    nlohmann::json j;
    j["spec"] = {{"voltage_v", spec.voltage},
                 {"omega_rated_radps", spec.omega_rated},
                 {"omega_max_radps", spec.omega_max},
                 {"pole_pairs", spec.pole_pairs}};
    j["design"] = {{"p_rated_w", map.design.p_rated}, {"lambda", map.design.lambda}};
    j["omega_grid_radps"] = std::vector<double>(map.omega_grid.begin(), map.omega_grid.end());
    j["torque_grid_nm"] = std::vector<double>(map.torque_grid.begin(), map.torque_grid.end());
    j["torque_limit_nm"] =
        std::vector<double>(map.torque_limit.begin(), map.torque_limit.end());

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("oracle: cannot write " + path);
    out << j.dump(2) << '\n';
}

}  // namespace ptd
