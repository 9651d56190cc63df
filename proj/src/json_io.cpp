#include "ptd/json_io.hpp"

#include <fstream>
#include <stdexcept>
#include <vector>

namespace ptd {

namespace {

using nlohmann::json;

double need_number(const json& j, const char* key, const std::string& ctx) {
    if (!j.contains(key) || !j.at(key).is_number()) {
        throw std::runtime_error("bundle: missing or non-numeric '" + ctx + key + "'");
    }
    return j.at(key).get<double>();
}

}  // namespace

json surrogate_to_json(const LossSurrogate& m) {
    json j;
    j["scaling"] = {{"omega", m.scaling.omega},
                    {"p_rated", m.scaling.p_rated},
                    {"lambda", m.scaling.lambda}};
    j["design_space"] = {{"p_min", m.space.p_min},
                         {"p_max", m.space.p_max},
                         {"lambda_min", m.space.lambda_min},
                         {"lambda_max", m.space.lambda_max}};
    j["motor_spec"] = {{"voltage", m.spec.voltage},
                       {"omega_rated", m.spec.omega_rated},
                       {"omega_max", m.spec.omega_max},
                       {"pole_pairs", m.spec.pole_pairs}};
    j["p_levels"] = m.p_levels;
    json qs = json::array();
    for (const auto& q : m.q) {
        std::vector<double> row_major(kNumFeatures * kNumFeatures);
        for (int r = 0; r < kNumFeatures; ++r) {
            for (int c = 0; c < kNumFeatures; ++c) {
                row_major[static_cast<std::size_t>(r * kNumFeatures + c)] = q(r, c);
            }
        }
        qs.push_back(row_major);
    }
    j["q_matrices"] = std::move(qs);
    return j;
}

LossSurrogate surrogate_from_json(const json& j) {
    LossSurrogate m;
    const auto& sc = j.at("scaling");
    m.scaling.omega = need_number(sc, "omega", "scaling.");
    m.scaling.p_rated = need_number(sc, "p_rated", "scaling.");
    m.scaling.lambda = need_number(sc, "lambda", "scaling.");

    const auto& ds = j.at("design_space");
    m.space.p_min = need_number(ds, "p_min", "design_space.");
    m.space.p_max = need_number(ds, "p_max", "design_space.");
    m.space.lambda_min = need_number(ds, "lambda_min", "design_space.");
    m.space.lambda_max = need_number(ds, "lambda_max", "design_space.");

    const auto& ms = j.at("motor_spec");
    m.spec.voltage = need_number(ms, "voltage", "motor_spec.");
    m.spec.omega_rated = need_number(ms, "omega_rated", "motor_spec.");
    m.spec.omega_max = need_number(ms, "omega_max", "motor_spec.");
    m.spec.pole_pairs = ms.at("pole_pairs").get<int>();

    m.p_levels = j.at("p_levels").get<std::vector<double>>();
    for (const auto& flat_json : j.at("q_matrices")) {
        const auto flat = flat_json.get<std::vector<double>>();
        if (flat.size() != kNumFeatures * kNumFeatures) {
            throw std::runtime_error("bundle: q matrix must have 100 entries");
        }
        Mat10 q;
        for (int r = 0; r < kNumFeatures; ++r) {
            for (int c = 0; c < kNumFeatures; ++c) {
                q(r, c) = flat[static_cast<std::size_t>(r * kNumFeatures + c)];
            }
        }
        m.q.push_back(q);
    }
    m.validate();
    return m;
}

json battery_to_json(const BatteryModel& bm) {
    return json{{"b0", bm.b0},
                {"b1", bm.b1},
                {"b2", bm.b2},
                {"e_max", bm.e_max},
                {"zeta_min", bm.zeta_min},
                {"zeta_max", bm.zeta_max},
                {"p_b_min", bm.p_b_min},
                {"p_b_max", bm.p_b_max},
                {"fit_nrmse", bm.fit_nrmse}};
}

BatteryModel battery_from_json(const json& j) {
    BatteryModel bm;
    bm.b0 = need_number(j, "b0", "battery.");
    bm.b1 = need_number(j, "b1", "battery.");
    bm.b2 = need_number(j, "b2", "battery.");
    bm.e_max = need_number(j, "e_max", "battery.");
    bm.zeta_min = need_number(j, "zeta_min", "battery.");
    bm.zeta_max = need_number(j, "zeta_max", "battery.");
    bm.p_b_min = need_number(j, "p_b_min", "battery.");
    bm.p_b_max = need_number(j, "p_b_max", "battery.");
    bm.fit_nrmse = need_number(j, "fit_nrmse", "battery.");
    bm.validate();
    return bm;
}

void save_bundle(const LossSurrogate& m, const BatteryModel& bm, const std::string& path) {
    json j;
    j["surrogate"] = surrogate_to_json(m);
    j["battery"] = battery_to_json(bm);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("bundle: cannot write " + path);
    out << j.dump(2) << '\n';
    if (!out) throw std::runtime_error("bundle: write failed: " + path);
}

std::pair<LossSurrogate, BatteryModel> load_bundle(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("bundle: cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw std::runtime_error("bundle: parse error in " + path + ": " + e.what());
    }
    return {surrogate_from_json(j.at("surrogate")), battery_from_json(j.at("battery"))};
}

}  // namespace ptd
