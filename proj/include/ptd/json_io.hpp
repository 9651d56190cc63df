#pragma once

#include <string>
#include <utility>

#include <nlohmann/json.hpp>

#include "ptd/battery.hpp"
#include "ptd/surrogate.hpp"

namespace ptd {

nlohmann::json surrogate_to_json(const LossSurrogate& m);
LossSurrogate surrogate_from_json(const nlohmann::json& j);

nlohmann::json battery_to_json(const BatteryModel& bm);
BatteryModel battery_from_json(const nlohmann::json& j);

/// Persist/load the fitted models as one bundle file. Round-tripping
/// reproduces predictions bit-for-bit.
void save_bundle(const LossSurrogate& m, const BatteryModel& bm, const std::string& path);
std::pair<LossSurrogate, BatteryModel> load_bundle(const std::string& path);

}  // namespace ptd
