#pragma once

#include <span>
#include <vector>

#include "ptd/cycle.hpp"

namespace ptd {

/// Quasi-static vehicle and driveline parameters. Defaults describe a
/// compact family car.
struct VehicleParams {
    double air_density = 1.2041;        // [kg/m^3]
    double drag_coeff = 0.29;           // [-]
    double frontal_area = 2.38;         // [m^2]
    double mass = 1850.0;               // [kg]
    double gravity = 9.81;              // [m/s^2]
    double rolling_coeff = 0.0174;      // [-]
    double wheel_radius = 0.35;         // [m]
    double regen_fraction = 0.6;        // recoverable share of braking power [-]
    double driveline_eff = 0.96;        // gearbox * final drive efficiency (0,1]
    double final_drive_ratio = 1.0;     // [-]
    double aux_power = 2000.0;          // [W]

    void validate() const;
};

/// Power requested at the wheels per sample:
/// v * (0.5*rho*cd*Af*v^2 + m*(g*cr*cos(alpha) + g*sin(alpha) + a)).
/// The rolling term is suppressed at standstill.
std::vector<double> wheel_power(const DriveCycle& cycle, const VehicleParams& vp);

/// Mechanical motor power: requested power scaled by driveline efficiency
/// when motoring, regen-fraction recovery clipped at -p_rated when braking.
std::vector<double> motor_mech_power(std::span<const double> p_req,
                                     const VehicleParams& vp, double p_rated);

}  // namespace ptd
