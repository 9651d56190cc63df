#pragma once

#include <Eigen/Core>
#include <span>
#include <string>
#include <vector>

namespace ptd {

inline constexpr double kPi = 3.14159265358979323846;

inline double rpm_to_radps(double rpm) { return rpm * kPi / 30.0; }

/// Fixed electrical technology of the motor family: everything that is not a
/// design variable.
struct MotorTechSpec {
    double voltage = 700.0;                       // [V]
    double omega_rated = rpm_to_radps(3500.0);    // [rad/s]
    double omega_max = rpm_to_radps(10000.0);     // [rad/s]
    int pole_pairs = 3;

    /// Lowest speed used when converting power to torque.
    double omega_eps() const { return 0.02 * omega_max; }

    void validate() const;
};

/// Design variables of one motor: rated power and relative length.
struct MotorDesign {
    double p_rated = 0.0;   // [W]
    double lambda = 0.0;    // length-to-radius ratio [-]
};

/// Rated torque (constant-torque plateau value).
inline double rated_torque(const MotorTechSpec& spec, double p_rated) {
    return p_rated / spec.omega_rated;
}

/// Constant torque up to rated speed, constant power hyperbola above.
double torque_limit(const MotorTechSpec& spec, double p_rated, double omega);

/// Analytic loss model of a surface-mounted PMSM, playing the role of the
/// expensive design tool. Deterministic, symmetric in torque sign, and
/// positively homogeneous in rated power at fixed (tau, omega/omega_rated,
/// lambda). Throws outside the torque/speed envelope.
double oracle_loss(const MotorTechSpec& spec, const MotorDesign& d,
                   double omega, double torque);

/// Loss samples on a speed x torque grid, with the per-cell feasibility mask
/// of the torque envelope.
struct EfficiencyMap {
    Eigen::VectorXd omega_grid;                            // [rad/s]
    Eigen::VectorXd torque_grid;                           // [Nm]
    Eigen::MatrixXd loss;                                  // [W], omega x torque
    Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> feasible;
    Eigen::VectorXd torque_limit;                          // [Nm] per omega
    MotorDesign design;
};

/// Evaluate the oracle on the tensor grid [omega_eps, omega_max] x [0, T_rated].
EfficiencyMap generate_map(const MotorTechSpec& spec, const MotorDesign& d,
                           int n_omega, int n_torque);

struct TrajectoryLosses {
    std::vector<double> loss;   // [W]
    int clamped = 0;            // points pushed back inside the envelope
};

/// Oracle losses along an operating trajectory. Torque is recovered as
/// p_m / max(omega, omega_eps) and clamped to the envelope; clamped points
/// (including speed-floor hits) are counted, never fatal.
TrajectoryLosses evaluate_trajectory(const MotorTechSpec& spec, const MotorDesign& d,
                                     std::span<const double> omega,
                                     std::span<const double> p_m);

/// CSV export `omega_radps,torque_Nm,loss_W,feasible` plus a JSON sidecar
/// with the spec, design and grids.
void write_map_csv(const EfficiencyMap& map, const std::string& path);
void write_map_sidecar(const EfficiencyMap& map, const MotorTechSpec& spec,
                       const std::string& path);

}  // namespace ptd
