#pragma once

#include <span>
#include <string>
#include <vector>

namespace ptd {

/// Quadratic internal-power battery model with a state-of-charge window.
struct BatteryModel {
    double b0 = 0.0;                 // [W]
    double b1 = 1.0;                 // [-]
    double b2 = 0.0;                 // [1/W]
    double e_max = 58.0 * 3.6e6;     // capacity [J]
    double zeta_min = 0.2;           // SOC window [-]
    double zeta_max = 0.8;
    double p_b_min = -150e3;         // fitted terminal-power range [W]
    double p_b_max = 150e3;
    double fit_nrmse = 0.0;

    void validate() const;
};

struct BatterySample {
    double p_b = 0.0;   // terminal power [W]
    double p_i = 0.0;   // internal power [W]
};

/// Frozen cell-stack law used to generate fit data: terminal power P_b drawn
/// from the open-circuit voltage and series resistance, internal power
/// P_i = P_b + I^2 R with U*I - I^2 R = P_b.
struct CellStackParams {
    double open_circuit_voltage = 700.0;   // [V]
    double internal_resistance = 0.08;     // [Ohm]
    double p_b_min = -150e3;               // [W]
    double p_b_max = 150e3;                // [W]
};

double cell_stack_internal_power(const CellStackParams& cp, double p_b);
std::vector<BatterySample> cell_stack_samples(const CellStackParams& cp, int n);

struct BatteryCoeffs {
    double b0 = 0.0;
    double b1 = 0.0;
    double b2 = 0.0;
    double nrmse = 0.0;
};

/// Ordinary least squares for (b0, b1, b2); refits with b2 = 0 when the
/// quadratic coefficient comes out negative and convexity is requested.
BatteryCoeffs fit_battery(std::span<const BatterySample> samples,
                          bool enforce_convex = true);

/// b0 + b1*P_b + b2*P_b^2. Throws outside the fitted terminal-power range.
double internal_power(const BatteryModel& bm, double p_b);

/// Forward-Euler state-of-energy trajectory (one more point than the input).
struct SoeTrajectory {
    std::vector<double> e_b;          // [J], size = steps + 1
    double dt = 1.0;
    double delta_e = 0.0;             // e_b.front() - e_b.back()
    bool window_violation = false;    // dipped below zeta_min * e_max
};

/// Integrate dE/dt = -P_i(P_dc + P_aux) from E(0) = e0_fraction * e_max.
/// A window violation is flagged, not thrown. The internal-power quadratic is
/// evaluated as-is beyond the fitted range.
SoeTrajectory integrate_soe(const BatteryModel& bm, std::span<const double> p_dc,
                            double p_aux, double dt, double e0_fraction);

/// CSV `P_b_W,P_i_W`.
void write_battery_samples_csv(std::span<const BatterySample> samples,
                               const std::string& path);
std::vector<BatterySample> load_battery_samples_csv(const std::string& path);

}  // namespace ptd
