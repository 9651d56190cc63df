#include "ptd/battery.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "ptd/csv.hpp"

namespace ptd {

void BatteryModel::validate() const {
    if (b2 < 0.0) throw std::invalid_argument("battery: b2 must be >= 0");
    if (!(e_max > 0.0)) throw std::invalid_argument("battery: capacity must be positive");
    if (!(zeta_min >= 0.0 && zeta_min < zeta_max && zeta_max <= 1.0)) {
        throw std::invalid_argument("battery: need 0 <= zeta_min < zeta_max <= 1");
    }
    if (!(p_b_min < p_b_max)) {
        throw std::invalid_argument("battery: invalid terminal-power range");
    }
    // internal power must stay monotone over the fitted range
    if (b1 + 2.0 * b2 * p_b_min <= 0.0) {
        throw std::invalid_argument("battery: internal power not increasing at p_b_min");
    }
}

double cell_stack_internal_power(const CellStackParams& cp, double p_b) {
    const double u = cp.open_circuit_voltage;
    const double r = cp.internal_resistance;
    const double disc = u * u - 4.0 * r * p_b;
    if (disc < 0.0) {
        throw std::domain_error("battery: terminal power beyond cell-stack capability");
    }
    const double current = (u - std::sqrt(disc)) / (2.0 * r);
    return p_b + current * current * r;
}

std::vector<BatterySample> cell_stack_samples(const CellStackParams& cp, int n) {
    if (n < 3) throw std::invalid_argument("battery: need at least 3 samples");
    std::vector<BatterySample> samples(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double p_b = cp.p_b_min + (cp.p_b_max - cp.p_b_min) * i /
                                            static_cast<double>(n - 1);
        samples[static_cast<std::size_t>(i)] = {p_b, cell_stack_internal_power(cp, p_b)};
    }
    return samples;
}

BatteryCoeffs fit_battery(std::span<const BatterySample> samples, bool enforce_convex) {
    if (samples.size() < 3) {
        throw std::invalid_argument("battery: fit needs at least 3 samples");
    }
    bool charge = false, discharge = false;
    for (const auto& s : samples) {
        charge = charge || s.p_b < 0.0;
        discharge = discharge || s.p_b > 0.0;
    }
    if (!charge || !discharge) {
        throw std::invalid_argument("battery: samples must span charge and discharge");
    }

    const auto m = static_cast<Eigen::Index>(samples.size());
    // scale terminal power to keep the Vandermonde columns comparable
    double p_scale = 0.0;
    for (const auto& s : samples) p_scale = std::max(p_scale, std::abs(s.p_b));

    auto solve = [&](int terms) -> Eigen::VectorXd {
        Eigen::MatrixXd a(m, terms);
        Eigen::VectorXd y(m);
        for (Eigen::Index k = 0; k < m; ++k) {
            const double p = samples[static_cast<std::size_t>(k)].p_b / p_scale;
            a(k, 0) = 1.0;
            a(k, 1) = p;
            if (terms > 2) a(k, 2) = p * p;
            y[k] = samples[static_cast<std::size_t>(k)].p_i;
        }
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
        qr.setThreshold(1e-10);
        if (qr.rank() < terms) {
            throw std::invalid_argument("battery: collinear samples, fit is singular");
        }
        return qr.solve(y);
    };

    Eigen::VectorXd c = solve(3);
    BatteryCoeffs coeffs;
    coeffs.b0 = c[0];
    coeffs.b1 = c[1] / p_scale;
    coeffs.b2 = c[2] / (p_scale * p_scale);
    if (coeffs.b2 < 0.0 && enforce_convex) {
        c = solve(2);
        coeffs.b0 = c[0];
        coeffs.b1 = c[1] / p_scale;
        coeffs.b2 = 0.0;
    }

    std::vector<double> pred(samples.size()), ref(samples.size());
    for (std::size_t k = 0; k < samples.size(); ++k) {
        const double p = samples[k].p_b;
        pred[k] = coeffs.b0 + coeffs.b1 * p + coeffs.b2 * p * p;
        ref[k] = samples[k].p_i;
    }
    double lo = ref[0], hi = ref[0], sq = 0.0;
    for (std::size_t k = 0; k < ref.size(); ++k) {
        lo = std::min(lo, ref[k]);
        hi = std::max(hi, ref[k]);
        sq += (pred[k] - ref[k]) * (pred[k] - ref[k]);
    }
    coeffs.nrmse = (hi > lo) ? std::sqrt(sq / static_cast<double>(ref.size())) / (hi - lo)
                             : 0.0;
    return coeffs;
}

double internal_power(const BatteryModel& bm, double p_b) {
    if (p_b < bm.p_b_min || p_b > bm.p_b_max) {
        throw std::domain_error("battery: terminal power outside fitted range");
    }
    return bm.b0 + bm.b1 * p_b + bm.b2 * p_b * p_b;
}

SoeTrajectory integrate_soe(const BatteryModel& bm, std::span<const double> p_dc,
                            double p_aux, double dt, double e0_fraction) {
    if (!(dt > 0.0)) throw std::invalid_argument("battery: dt must be positive");

    SoeTrajectory traj;
    traj.dt = dt;
    traj.e_b.resize(p_dc.size() + 1);
    traj.e_b[0] = e0_fraction * bm.e_max;
    const double floor = bm.zeta_min * bm.e_max;
    for (std::size_t k = 0; k < p_dc.size(); ++k) {
        const double p_b = p_dc[k] + p_aux;
        const double p_i = bm.b0 + bm.b1 * p_b + bm.b2 * p_b * p_b;
        traj.e_b[k + 1] = traj.e_b[k] - p_i * dt;
        if (traj.e_b[k + 1] < floor) traj.window_violation = true;
    }
    traj.delta_e = traj.e_b.front() - traj.e_b.back();
    return traj;
}

void write_battery_samples_csv(std::span<const BatterySample> samples,
                               const std::string& path) {
    std::vector<std::vector<std::string>> rows;
    rows.reserve(samples.size());
    for (const auto& s : samples) {
        rows.push_back({csv::format(s.p_b), csv::format(s.p_i)});
    }
    csv::write_file(path, {"P_b_W", "P_i_W"}, rows);
}

std::vector<BatterySample> load_battery_samples_csv(const std::string& path) {
    const csv::Table table = csv::read_file(path);
    const int col_pb = table.column("P_b_W");
    const int col_pi = table.column("P_i_W");
    if (col_pb < 0 || col_pi < 0) {
        throw std::runtime_error("battery: samples file missing P_b_W/P_i_W columns: " + path);
    }
    std::vector<BatterySample> samples;
    samples.reserve(table.rows.size());
    for (std::size_t k = 0; k < table.rows.size(); ++k) {
        samples.push_back({table.number(k, col_pb), table.number(k, col_pi)});
    }
    return samples;
}

}  // namespace ptd
