#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace ptd {

/// Uniformly sampled drive cycle. Velocity, acceleration and road grade share
/// one time grid with step dt; acceleration is the forward difference of the
/// velocity trace so that cumulative sums of `a` reproduce `v`.
struct DriveCycle {
    double dt = 1.0;              // [s]
    std::vector<double> v;        // [m/s]
    std::vector<double> a;        // [m/s^2]
    std::vector<double> alpha;    // road grade [rad]

    std::size_t size() const { return v.size(); }
    double duration() const { return static_cast<double>(v.size()) * dt; }

    void validate() const;
};

/// Column names of a cycle CSV file. `a` and `alpha` are optional columns.
struct CycleCsvSchema {
    std::string t = "t";
    std::string v = "v";
    std::string a = "a";
    std::string alpha = "alpha";
};

/// One leg of a synthetic speed profile: ramp to `target_mps` over `ramp_s`,
/// then hold for `hold_s`.
struct SpeedSegment {
    double target_mps = 0.0;
    double ramp_s = 0.0;
    double hold_s = 0.0;
};

/// Build a cycle from a velocity trace: derives a[k] = (v[k+1]-v[k])/dt with
/// a.back() = 0. Grade defaults to zero when omitted.
DriveCycle cycle_from_velocity(double dt, std::vector<double> v,
                               std::vector<double> alpha = {});

/// Load a cycle from CSV. Requires columns t and v, with t strictly
/// increasing and uniform within 1e-6 relative tolerance; accepts optional
/// a and alpha columns.
DriveCycle load_cycle(const std::string& path, const CycleCsvSchema& schema = {});

/// Trapezoidal speed profile through the given segments, starting from
/// standstill and ramping back to zero after the last hold (over the last
/// segment's ramp time).
DriveCycle synthesize_cycle(std::span<const SpeedSegment> segments, double dt);

}  // namespace ptd
