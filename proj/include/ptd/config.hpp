#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "ptd/battery.hpp"
#include "ptd/cycle.hpp"
#include "ptd/doe.hpp"
#include "ptd/motor_oracle.hpp"
#include "ptd/vehicle.hpp"

namespace ptd {

/// Configuration problem: bad value, unknown key, unreadable file. Carries
/// the offending key path in the message.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DoeConfig {
    PlanKind plan = PlanKind::full_factorial;
    int levels = 3;          // full factorial
    int n = 9;               // latin hypercube
    std::uint64_t seed = 1;
};

struct SurrogateConfig {
    int power_levels = 8;
    int speed_samples = 25;
    int map_points = 60;   // per axis of exported efficiency maps
};

struct SolverConfig {
    int starts = 8;
    int grid_resolution = 21;
    std::uint64_t seed = 1;
    bool cross_check = true;
    bool refine = true;
};

struct BatteryConfig {
    double capacity_kwh = 58.0;
    double soc_min = 0.2;
    double soc_max = 0.8;
    CellStackParams cell;       // frozen generator for fit samples
    int fit_samples = 200;
    std::string samples_file;   // optional external P_b/P_i table
};

struct CycleConfig {
    double dt = 1.0;
    std::vector<SpeedSegment> segments;   // defaults to the built-in mission
};

struct PathsConfig {
    std::string cycle_file;         // CSV; empty -> synthesize from segments
    std::string output_dir = "out";
};

struct ToolkitConfig {
    VehicleParams vehicle;
    MotorTechSpec motor;
    DesignSpace space;
    double gamma_min = 1.0;
    double gamma_max = 10.0;
    double v_max = 160.0 / 3.6;              // [m/s]
    double alpha_max = 20.0 * kPi / 180.0;   // [rad]
    BatteryConfig battery;
    DoeConfig doe;
    SurrogateConfig surrogate;
    SolverConfig solver;
    CycleConfig cycle;
    PathsConfig paths;

    /// The built-in compact-car case study.
    static ToolkitConfig defaults();

    /// Strict parse: every key must be known and well-typed, otherwise the
    /// error names the offending key path. Unset keys keep their defaults.
    static ToolkitConfig load(const std::string& path);

    DriveCycle make_cycle() const;
    SamplePlan make_plan() const;
    BatteryModel make_battery_model() const;   // fits the cell-stack samples
};

/// The ~1800 s mixed urban/highway speed profile used by default.
std::vector<SpeedSegment> default_mission_segments();

}  // namespace ptd
