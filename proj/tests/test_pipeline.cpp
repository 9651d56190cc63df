#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include "ptd/config.hpp"
#include "ptd/csv.hpp"
#include "ptd/pipeline.hpp"
#include "test_util.hpp"

using namespace ptd;
using ptd_test::contains;
using ptd_test::read_bytes;
using ptd_test::TempDir;
using ptd_test::thrown_message;
using ptd_test::write_text;

namespace {

ToolkitConfig mini_config() {
    ToolkitConfig config = ToolkitConfig::defaults();
    config.surrogate.power_levels = 3;
    config.surrogate.speed_samples = 12;
    config.surrogate.map_points = 12;
    config.solver.starts = 2;
    config.solver.grid_resolution = 7;
    config.solver.seed = 3;
    config.cycle.segments = {{12.0, 10, 30}, {24.0, 20, 50}, {0.0, 15, 10}};
    return config;
}

void run_all(const ToolkitConfig& config, const std::string& out) {
    pipeline::cmd_sample(config, out);
    pipeline::cmd_fit(config, out);
    pipeline::cmd_optimize(config, out);
    pipeline::cmd_validate(config, out);
    pipeline::cmd_report(config, out);
}

std::vector<std::string> dir_files(const std::string& dir) {
    std::vector<std::string> names;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        names.push_back(entry.path().filename().string());
    }
    std::sort(names.begin(), names.end());
    return names;
}

}  // namespace

TEST_CASE("defaults describe the built-in case study") {
    const ToolkitConfig config = ToolkitConfig::defaults();
    CHECK(config.vehicle.aux_power == 2000.0);
    CHECK(config.vehicle.mass == 1850.0);
    CHECK(config.space.p_min == 70e3);
    CHECK(config.gamma_max == 10.0);
    CHECK(config.v_max == doctest::Approx(44.4444).epsilon(1e-4));

    const DriveCycle cycle = config.make_cycle();
    CHECK(cycle.size() == 1800);
    CHECK(cycle.v.front() == 0.0);
    CHECK(cycle.v.back() == 0.0);
    double vmax = 0.0;
    for (double v : cycle.v) vmax = std::max(vmax, v);
    CHECK(vmax == doctest::Approx(36.5));
}

TEST_CASE("config load applies overrides and keeps defaults") {
    TempDir dir("config");
    write_text(dir.file("config.json"),
               R"({"vehicle": {"mass": 1900.0}, "solver": {"grid_resolution": 11}})");
    const ToolkitConfig config = ToolkitConfig::load(dir.file("config.json"));
    CHECK(config.vehicle.mass == 1900.0);
    CHECK(config.solver.grid_resolution == 11);
    CHECK(config.vehicle.drag_coeff == 0.29);   // untouched default
}

TEST_CASE("config errors carry the offending key path") {
    TempDir dir("config");

    write_text(dir.file("unknown.json"), R"({"solver": {"startz": 3}})");
    CHECK(contains(thrown_message([&] { ToolkitConfig::load(dir.file("unknown.json")); }),
                   "solver.startz"));

    write_text(dir.file("type.json"), R"({"vehicle": {"mass": "heavy"}})");
    CHECK(contains(thrown_message([&] { ToolkitConfig::load(dir.file("type.json")); }),
                   "vehicle.mass"));

    write_text(dir.file("bounds.json"),
               R"({"motor": {"p_rated_min_kw": 200.0, "p_rated_max_kw": 100.0}})");
    CHECK(contains(thrown_message([&] { ToolkitConfig::load(dir.file("bounds.json")); }),
                   "motor.p_rated_min_kw"));

    CHECK(contains(thrown_message([&] { ToolkitConfig::load(dir.file("absent.json")); }),
                   "cannot open"));
}

TEST_CASE("config ToolkitConfig::load round-trips cycle segments") {
    TempDir dir("config");
    write_text(dir.file("config.json"),
               R"({"cycle": {"dt": 0.5, "segments": [[8, 4, 6], [0, 3, 2]]}})");
    const ToolkitConfig config = ToolkitConfig::load(dir.file("config.json"));
    CHECK(config.cycle.dt == 0.5);
    REQUIRE(config.cycle.segments.size() == 2);
    CHECK(config.cycle.segments[0].target_mps == 8.0);
    CHECK(config.cycle.segments[1].hold_s == 2.0);
}

TEST_CASE("pipeline stages produce the expected artifacts") {
    TempDir out("pipeline");
    const ToolkitConfig config = mini_config();

    pipeline::cmd_sample(config, out.str());
    const csv::Table plan = csv::read_file(out.file("plan.csv"));
    CHECK(plan.rows.size() == 9);
    for (int i = 0; i < 9; ++i) {
        char name[16];
        std::snprintf(name, sizeof(name), "map_%02d.csv", i);
        CHECK(std::filesystem::exists(out.file(name)));
    }

    pipeline::cmd_fit(config, out.str());
    CHECK(std::filesystem::exists(out.file("bundle.json")));
    CHECK(std::filesystem::exists(out.file("fit_report.json")));
    CHECK(std::filesystem::exists(out.file("battery_samples.csv")));

    const SolveResult result = pipeline::cmd_optimize(config, out.str());
    CHECK(std::filesystem::exists(out.file("solution.json")));
    CHECK(std::filesystem::exists(out.file("trajectories.csv")));
    const auto& box = config.space;
    CHECK(result.design.p_rated >= box.p_min);
    CHECK(result.design.p_rated <= box.p_max);
    CHECK(result.design.lambda >= box.lambda_min);
    CHECK(result.design.lambda <= box.lambda_max);
    CHECK(result.design.gamma_fgt >= config.gamma_min);
    CHECK(result.design.gamma_fgt <= config.gamma_max);

    const ValidationReport report = pipeline::cmd_validate(config, out.str());
    CHECK(std::filesystem::exists(out.file("validation.json")));
    CHECK(std::filesystem::exists(out.file("validation_trajectories.csv")));
    CHECK(report.final_rel_drift < 0.05);

    pipeline::cmd_report(config, out.str());
    CHECK(std::filesystem::exists(out.file("report_maps.csv")));
    CHECK(std::filesystem::exists(out.file("report_trajectories.csv")));

    // trajectory CSV carries the full schema
    const csv::Table traj = csv::read_file(out.file("trajectories.csv"));
    const std::vector<std::string> expected{"t_s",      "v_mps",  "omega_radps",
                                            "P_m_W",    "P_loss_W", "P_dc_W",
                                            "P_i_W",    "E_b_J"};
    CHECK(traj.header == expected);
    CHECK(traj.rows.size() == config.make_cycle().size());
}

TEST_CASE("pipeline reruns are byte-identical") {
    TempDir a("pipeline_a");
    TempDir b("pipeline_b");
    const ToolkitConfig config = mini_config();
    run_all(config, a.str());
    run_all(config, b.str());

    const auto names = dir_files(a.str());
    CHECK(names == dir_files(b.str()));
    for (const auto& name : names) {
        INFO("file: ", name);
        CHECK(read_bytes(a.file(name)) == read_bytes(b.file(name)));
    }

    // report regeneration in place is idempotent
    const std::string before = read_bytes(a.file("report_maps.csv"));
    pipeline::cmd_report(config, a.str());
    CHECK(read_bytes(a.file("report_maps.csv")) == before);
}

TEST_CASE("optimizer seed only perturbs within the solver tolerance") {
    TempDir a("seed_a");
    TempDir b("seed_b");
    ToolkitConfig config = mini_config();
    pipeline::cmd_sample(config, a.str());
    pipeline::cmd_fit(config, a.str());
    std::filesystem::copy(a.str(), b.str(), std::filesystem::copy_options::recursive |
                                                std::filesystem::copy_options::overwrite_existing);

    const SolveResult first = pipeline::cmd_optimize(config, a.str());
    config.solver.seed = 99;
    const SolveResult second = pipeline::cmd_optimize(config, b.str());
    CHECK(std::abs(first.delta_e - second.delta_e) / first.delta_e < 0.01);
}

TEST_CASE("missing upstream artifacts point to the producing command") {
    TempDir out("missing");
    const ToolkitConfig config = mini_config();
    CHECK(contains(thrown_message([&] { pipeline::cmd_fit(config, out.str()); }),
                   "sample"));
    CHECK(contains(thrown_message([&] { pipeline::cmd_optimize(config, out.str()); }),
                   "fit"));
    CHECK(contains(thrown_message([&] { pipeline::cmd_validate(config, out.str()); }),
                   "fit"));
}

TEST_CASE("corrupted bundle JSON names the file") {
    TempDir out("corrupt");
    const ToolkitConfig config = mini_config();
    write_text(out.file("bundle.json"), "{not json");
    const std::string msg =
        thrown_message([&] { pipeline::cmd_optimize(config, out.str()); });
    CHECK(contains(msg, "bundle.json"));
}

#ifdef PTDESIGN_BIN
namespace {

int run_cli(const std::string& args) {
    const int status = std::system((std::string(PTDESIGN_BIN) + " " + args +
                                    " >/dev/null 2>&1")
                                       .c_str());
    return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("CLI exit codes: 0 success, 1 pipeline failure, 2 usage/config") {
    TempDir out("cli");

    CHECK(run_cli("") == 2);                 // missing subcommand
    CHECK(run_cli("frobnicate") == 2);       // unknown subcommand
    CHECK(run_cli("fit --config /nonexistent.json --out " + out.str()) == 2);

    write_text(out.file("bad.json"), R"({"solver": {"startz": 1}})");
    CHECK(run_cli("sample --config " + out.file("bad.json") + " --out " + out.str()) == 2);

    CHECK(run_cli("fit --out " + out.str()) == 1);   // plan.csv missing

    write_text(out.file("small.json"),
               R"({"surrogate": {"map_points": 8}, "doe": {"levels": 2}})");
    CHECK(run_cli("sample --config " + out.file("small.json") + " --out " + out.str()) == 0);
    CHECK(std::filesystem::exists(out.file("plan.csv")));
}
#endif
