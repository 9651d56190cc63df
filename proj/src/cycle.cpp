#include "ptd/cycle.hpp"

#include <cmath>
#include <stdexcept>

#include "ptd/csv.hpp"

namespace ptd {

void DriveCycle::validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw std::invalid_argument("cycle: dt must be positive");
    }
    if (v.size() < 2) throw std::invalid_argument("cycle: needs at least 2 samples");
    if (a.size() != v.size() || alpha.size() != v.size()) {
        throw std::invalid_argument("cycle: v, a, alpha must have equal length");
    }
    for (std::size_t k = 0; k < v.size(); ++k) {
        if (!std::isfinite(v[k]) || v[k] < 0.0) {
            throw std::invalid_argument("cycle: negative velocity at sample " +
                                        std::to_string(k));
        }
        if (!std::isfinite(a[k]) || !std::isfinite(alpha[k])) {
            throw std::invalid_argument("cycle: non-finite sample " + std::to_string(k));
        }
    }
}

namespace {

std::vector<double> forward_difference(const std::vector<double>& v, double dt) {
    std::vector<double> a(v.size(), 0.0);
    for (std::size_t k = 0; k + 1 < v.size(); ++k) a[k] = (v[k + 1] - v[k]) / dt;
    return a;
}

}  // namespace

DriveCycle cycle_from_velocity(double dt, std::vector<double> v,
                               std::vector<double> alpha) {
    DriveCycle cycle;
    cycle.dt = dt;
    cycle.a = forward_difference(v, dt);
    cycle.v = std::move(v);
    cycle.alpha = alpha.empty() ? std::vector<double>(cycle.v.size(), 0.0)
                                : std::move(alpha);
    cycle.validate();
    return cycle;
}

DriveCycle load_cycle(const std::string& path, const CycleCsvSchema& schema) {
    const csv::Table table = csv::read_file(path);

    const int col_t = table.column(schema.t);
    const int col_v = table.column(schema.v);
    if (col_t < 0) throw std::runtime_error("cycle: missing column '" + schema.t + "' in " + path);
    if (col_v < 0) throw std::runtime_error("cycle: missing column '" + schema.v + "' in " + path);
    const int col_a = table.column(schema.a);
    const int col_alpha = table.column(schema.alpha);

    const std::size_t n = table.rows.size();
    if (n < 2) throw std::runtime_error("cycle: " + path + " has fewer than 2 samples");

    std::vector<double> t(n), v(n);
    for (std::size_t k = 0; k < n; ++k) {
        t[k] = table.number(k, col_t);
        v[k] = table.number(k, col_v);
        if (v[k] < 0.0) {
            throw std::runtime_error("cycle: negative velocity at row " +
                                     std::to_string(k + 2) + " of " + path);
        }
    }

    const double dt = t[1] - t[0];
    if (!(dt > 0.0)) throw std::runtime_error("cycle: time column not increasing in " + path);
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (std::abs((t[k + 1] - t[k]) - dt) > 1e-6 * dt) {
            throw std::runtime_error("cycle: non-uniform time grid at row " +
                                     std::to_string(k + 3) + " of " + path);
        }
    }

    DriveCycle cycle;
    cycle.dt = dt;
    cycle.v = std::move(v);
    if (col_a >= 0) {
        cycle.a.resize(n);
        for (std::size_t k = 0; k < n; ++k) cycle.a[k] = table.number(k, col_a);
    } else {
        cycle.a = forward_difference(cycle.v, dt);
    }
    cycle.alpha.assign(n, 0.0);
    if (col_alpha >= 0) {
        for (std::size_t k = 0; k < n; ++k) cycle.alpha[k] = table.number(k, col_alpha);
    }
    cycle.validate();
    return cycle;
}

DriveCycle synthesize_cycle(std::span<const SpeedSegment> segments, double dt) {
    if (segments.empty()) throw std::invalid_argument("cycle: empty segment list");
    if (!(dt > 0.0)) throw std::invalid_argument("cycle: dt must be positive");
    for (const auto& seg : segments) {
        if (seg.target_mps < 0.0) {
            throw std::invalid_argument("cycle: segment target speed must be >= 0");
        }
        if (seg.ramp_s < dt || seg.hold_s < dt) {
            throw std::invalid_argument("cycle: segment ramp/hold must be >= dt");
        }
    }

    std::vector<double> v{0.0};
    auto ramp_to = [&](double target, double ramp_s) {
        const auto steps = static_cast<std::size_t>(std::llround(ramp_s / dt));
        const double start = v.back();
        for (std::size_t i = 1; i <= steps; ++i) {
            v.push_back(start + (target - start) * static_cast<double>(i) /
                                    static_cast<double>(steps));
        }
    };
    auto hold = [&](double hold_s) {
        const auto steps = static_cast<std::size_t>(std::llround(hold_s / dt));
        v.insert(v.end(), steps, v.back());
    };

    for (const auto& seg : segments) {
        ramp_to(seg.target_mps, seg.ramp_s);
        hold(seg.hold_s);
    }
    ramp_to(0.0, segments.back().ramp_s);

    return cycle_from_velocity(dt, std::move(v));
}

}  // namespace ptd
