#include "ptd/config.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

namespace ptd {

std::vector<SpeedSegment> default_mission_segments() {
    // (target speed [m/s], ramp [s], hold [s]); four phases of rising speed
    // with durations 589/433/455/~320 s, stop-and-go in the first two,
    // sustained cruising in the last.
    return {
        // low, 589 s
        {8.0, 12, 25},  {0.0, 10, 12},  {12.5, 16, 28}, {0.0, 12, 18},
        {15.3, 20, 35}, {6.0, 12, 15},  {0.0, 9, 25},   {10.0, 14, 24},
        {0.0, 11, 20},  {13.0, 17, 30}, {5.0, 11, 14},  {0.0, 8, 28},
        {11.5, 15, 26}, {0.0, 10, 22},  {14.0, 18, 40}, {0.0, 13, 19},
        // medium, 433 s
        {17.5, 22, 70}, {9.0, 13, 20},  {21.4, 22, 80}, {14.0, 12, 25},
        {19.0, 14, 55}, {0.0, 16, 15},  {12.0, 15, 30}, {0.0, 9, 15},
        // high, 455 s
        {22.5, 24, 90}, {16.0, 13, 25}, {26.5, 26, 110}, {20.0, 14, 35},
        {24.5, 12, 60}, {0.0, 20, 26},
        // extra-high, 322 s including the closing ramp
        {28.0, 34, 59}, {33.0, 20, 60}, {36.5, 18, 45}, {30.0, 12, 18},
        {0.0, 26, 4},
    };
}

ToolkitConfig ToolkitConfig::defaults() {
    ToolkitConfig config;
    config.cycle.segments = default_mission_segments();
    return config;
}

DriveCycle ToolkitConfig::make_cycle() const {
    if (!paths.cycle_file.empty()) return load_cycle(paths.cycle_file);
    return synthesize_cycle(cycle.segments, cycle.dt);
}

SamplePlan ToolkitConfig::make_plan() const {
    if (doe.plan == PlanKind::full_factorial) return full_factorial(space, doe.levels);
    return latin_hypercube(space, doe.n, doe.seed);
}

BatteryModel ToolkitConfig::make_battery_model() const {
    const std::vector<BatterySample> samples =
        battery.samples_file.empty() ? cell_stack_samples(battery.cell, battery.fit_samples)
                                     : load_battery_samples_csv(battery.samples_file);
    const BatteryCoeffs coeffs = fit_battery(samples, true);
    BatteryModel bm;
    bm.b0 = coeffs.b0;
    bm.b1 = coeffs.b1;
    bm.b2 = coeffs.b2;
    bm.fit_nrmse = coeffs.nrmse;
    bm.e_max = battery.capacity_kwh * 3.6e6;
    bm.zeta_min = battery.soc_min;
    bm.zeta_max = battery.soc_max;
    double lo = samples.front().p_b, hi = samples.front().p_b;
    for (const auto& s : samples) {
        lo = std::min(lo, s.p_b);
        hi = std::max(hi, s.p_b);
    }
    bm.p_b_min = lo;
    bm.p_b_max = hi;
    bm.validate();
    return bm;
}

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw ConfigError("config: " + path + ": " + what);
}

double num(const json& j, const std::string& path) {
    if (!j.is_number()) fail(path, "expected a number");
    return j.get<double>();
}

int integer(const json& j, const std::string& path) {
    if (!j.is_number_integer()) fail(path, "expected an integer");
    return j.get<int>();
}

bool boolean(const json& j, const std::string& path) {
    if (!j.is_boolean()) fail(path, "expected a boolean");
    return j.get<bool>();
}

std::string text(const json& j, const std::string& path) {
    if (!j.is_string()) fail(path, "expected a string");
    return j.get<std::string>();
}

// Walks an object section and dispatches each key through `handle`, which
// returns false for keys it does not know.
template <typename Handler>
void walk(const json& j, const std::string& path, Handler&& handle) {
    if (!j.is_object()) fail(path, "expected an object");
    for (const auto& [key, value] : j.items()) {
        if (!handle(key, value, path + "." + key)) fail(path + "." + key, "unknown key");
    }
}

void parse_vehicle(const json& j, VehicleParams& vp) {
    walk(j, "vehicle", [&](const std::string& k, const json& v, const std::string& p) {
        if (k == "air_density") vp.air_density = num(v, p);
        else if (k == "drag_coeff") vp.drag_coeff = num(v, p);
        else if (k == "frontal_area") vp.frontal_area = num(v, p);
        else if (k == "mass") vp.mass = num(v, p);
        else if (k == "gravity") vp.gravity = num(v, p);
        else if (k == "rolling_coeff") vp.rolling_coeff = num(v, p);
        else if (k == "wheel_radius") vp.wheel_radius = num(v, p);
        else if (k == "regen_fraction") vp.regen_fraction = num(v, p);
        else if (k == "driveline_efficiency") vp.driveline_eff = num(v, p);
        else if (k == "final_drive_ratio") vp.final_drive_ratio = num(v, p);
        else if (k == "aux_power_kw") vp.aux_power = num(v, p) * 1e3;
        else return false;
        return true;
    });
}

void parse_motor(const json& j, ToolkitConfig& config) {
    walk(j, "motor", [&](const std::string& k, const json& v, const std::string& p) {
        if (k == "voltage") config.motor.voltage = num(v, p);
        else if (k == "rated_speed_rpm") config.motor.omega_rated = rpm_to_radps(num(v, p));
        else if (k == "max_speed_rpm") config.motor.omega_max = rpm_to_radps(num(v, p));
        else if (k == "pole_pairs") config.motor.pole_pairs = integer(v, p);
        else if (k == "p_rated_min_kw") config.space.p_min = num(v, p) * 1e3;
        else if (k == "p_rated_max_kw") config.space.p_max = num(v, p) * 1e3;
        else if (k == "lambda_min") config.space.lambda_min = num(v, p);
        else if (k == "lambda_max") config.space.lambda_max = num(v, p);
        else return false;
        return true;
    });
    if (!(config.space.p_min < config.space.p_max)) {
        fail("motor.p_rated_min_kw", "bounds need min < max");
    }
    if (!(config.space.lambda_min < config.space.lambda_max)) {
        fail("motor.lambda_min", "bounds need min < max");
    }
}

void parse_transmission(const json& j, ToolkitConfig& config) {
    walk(j, "transmission", [&](const std::string& k, const json& v, const std::string& p) {
        if (k == "gamma_min") config.gamma_min = num(v, p);
        else if (k == "gamma_max") config.gamma_max = num(v, p);
        else if (k == "v_max_kmh") config.v_max = num(v, p) / 3.6;
        else if (k == "alpha_max_deg") config.alpha_max = num(v, p) * kPi / 180.0;
        else return false;
        return true;
    });
    if (!(config.gamma_min < config.gamma_max)) fail("transmission.gamma_min", "bounds need min < max");
}

void parse_battery(const json& j, BatteryConfig& bc) {
    walk(j, "battery", [&](const std::string& k, const json& v, const std::string& p) {
        if (k == "capacity_kwh") bc.capacity_kwh = num(v, p);
        else if (k == "soc_min") bc.soc_min = num(v, p);
        else if (k == "soc_max") bc.soc_max = num(v, p);
        else if (k == "open_circuit_voltage") bc.cell.open_circuit_voltage = num(v, p);
        else if (k == "internal_resistance") bc.cell.internal_resistance = num(v, p);
        else if (k == "fit_p_min_kw") bc.cell.p_b_min = num(v, p) * 1e3;
        else if (k == "fit_p_max_kw") bc.cell.p_b_max = num(v, p) * 1e3;
        else if (k == "fit_samples") bc.fit_samples = integer(v, p);
        else if (k == "samples_file") bc.samples_file = text(v, p);
        else return false;
        return true;
    });
}

void parse_doe(const json& j, DoeConfig& dc) {
    walk(j, "doe", [&](const std::string& k, const json& v, const std::string& p) {
        if (k == "plan") {
            const std::string kind = text(v, p);
            if (kind == "full_factorial") dc.plan = PlanKind::full_factorial;
            else if (kind == "latin_hypercube") dc.plan = PlanKind::latin_hypercube;
            else fail(p, "expected 'full_factorial' or 'latin_hypercube'");
        } else if (k == "levels") dc.levels = integer(v, p);
        else if (k == "n") dc.n = integer(v, p);
        else if (k == "seed") dc.seed = static_cast<std::uint64_t>(integer(v, p));
        else return false;
        return true;
    });
}

void parse_surrogate(const json& j, SurrogateConfig& sc) {
    walk(j, "surrogate", [&](const std::string& k, const json& v, const std::string& p) {
        if (k == "power_levels") sc.power_levels = integer(v, p);
        else if (k == "speed_samples") sc.speed_samples = integer(v, p);
        else if (k == "map_points") sc.map_points = integer(v, p);
        else return false;
        return true;
    });
}

void parse_solver(const json& j, SolverConfig& sc) {
    walk(j, "solver", [&](const std::string& k, const json& v, const std::string& p) {
        if (k == "starts") sc.starts = integer(v, p);
        else if (k == "grid_resolution") sc.grid_resolution = integer(v, p);
        else if (k == "seed") sc.seed = static_cast<std::uint64_t>(integer(v, p));
        else if (k == "cross_check") sc.cross_check = boolean(v, p);
        else if (k == "refine") sc.refine = boolean(v, p);
        else return false;
        return true;
    });
}

void parse_cycle(const json& j, CycleConfig& cc) {
    walk(j, "cycle", [&](const std::string& k, const json& v, const std::string& p) {
        if (k == "dt") {
            cc.dt = num(v, p);
        } else if (k == "segments") {
            if (!v.is_array()) fail(p, "expected an array of [target,ramp,hold] triples");
            cc.segments.clear();
            for (std::size_t i = 0; i < v.size(); ++i) {
                const auto& seg = v[i];
                const std::string sp = p + "[" + std::to_string(i) + "]";
                if (!seg.is_array() || seg.size() != 3) fail(sp, "expected [target,ramp,hold]");
                cc.segments.push_back(
                    {num(seg[0], sp), num(seg[1], sp), num(seg[2], sp)});
            }
        } else {
            return false;
        }
        return true;
    });
}

void parse_paths(const json& j, PathsConfig& pc) {
    walk(j, "paths", [&](const std::string& k, const json& v, const std::string& p) {
        if (k == "cycle_file") pc.cycle_file = text(v, p);
        else if (k == "output_dir") pc.output_dir = text(v, p);
        else return false;
        return true;
    });
}

}  // namespace

ToolkitConfig ToolkitConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ConfigError("config: " + path + ": " + e.what());
    }

    ToolkitConfig config = defaults();
    walk(j, "config", [&](const std::string& k, const json& v, const std::string&) {
        if (k == "vehicle") parse_vehicle(v, config.vehicle);
        else if (k == "motor") parse_motor(v, config);
        else if (k == "transmission") parse_transmission(v, config);
        else if (k == "battery") parse_battery(v, config.battery);
        else if (k == "doe") parse_doe(v, config.doe);
        else if (k == "surrogate") parse_surrogate(v, config.surrogate);
        else if (k == "solver") parse_solver(v, config.solver);
        else if (k == "cycle") parse_cycle(v, config.cycle);
        else if (k == "paths") parse_paths(v, config.paths);
        else return false;
        return true;
    });

    try {
        config.vehicle.validate();
        config.motor.validate();
        config.space.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return config;
}

}  // namespace ptd
