#include "ptd/vehicle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ptd {

void VehicleParams::validate() const {
    auto positive = [](double value, const char* name) {
        if (!std::isfinite(value) || value <= 0.0) {
            throw std::invalid_argument(std::string("vehicle: ") + name +
                                        " must be positive and finite");
        }
    };
    positive(air_density, "air_density");
    positive(drag_coeff, "drag_coeff");
    positive(frontal_area, "frontal_area");
    positive(mass, "mass");
    positive(gravity, "gravity");
    positive(rolling_coeff, "rolling_coeff");
    positive(wheel_radius, "wheel_radius");
    positive(final_drive_ratio, "final_drive_ratio");
    positive(aux_power, "aux_power");
    if (!(regen_fraction >= 0.0 && regen_fraction <= 1.0)) {
        throw std::invalid_argument("vehicle: regen_fraction must be in [0, 1]");
    }
    if (!(driveline_eff > 0.0 && driveline_eff <= 1.0)) {
        throw std::invalid_argument("vehicle: driveline_eff must be in (0, 1]");
    }
}

std::vector<double> wheel_power(const DriveCycle& cycle, const VehicleParams& vp) {
    cycle.validate();
    vp.validate();

    const double aero = 0.5 * vp.air_density * vp.drag_coeff * vp.frontal_area;
    std::vector<double> p_req(cycle.size());
    for (std::size_t k = 0; k < cycle.size(); ++k) {
        const double v = cycle.v[k];
        const double rolling =
            (v > 0.0) ? vp.gravity * vp.rolling_coeff * std::cos(cycle.alpha[k]) : 0.0;
        const double grade = vp.gravity * std::sin(cycle.alpha[k]);
        p_req[k] = v * (aero * v * v + vp.mass * (rolling + grade + cycle.a[k]));
    }
    return p_req;
}

std::vector<double> motor_mech_power(std::span<const double> p_req,
                                     const VehicleParams& vp, double p_rated) {
    if (!(p_rated > 0.0)) throw std::invalid_argument("vehicle: p_rated must be positive");
    std::vector<double> p_m(p_req.size());
    for (std::size_t k = 0; k < p_req.size(); ++k) {
        if (p_req[k] >= 0.0) {
            p_m[k] = p_req[k] / vp.driveline_eff;
        } else {
            p_m[k] = std::max(-p_rated, vp.driveline_eff * vp.regen_fraction * p_req[k]);
        }
    }
    return p_m;
}

}  // namespace ptd
