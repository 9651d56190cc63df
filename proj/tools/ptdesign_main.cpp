#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "ptd/pipeline.hpp"

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out_dir;
};

ptd::ToolkitConfig load_config(const CommonArgs& args) {
    return args.config_path.empty() ? ptd::ToolkitConfig::defaults()
                                    : ptd::ToolkitConfig::load(args.config_path);
}

std::string output_dir(const CommonArgs& args, const ptd::ToolkitConfig& config) {
    return args.out_dir.empty() ? config.paths.output_dir : args.out_dir;
}

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path,
                    "Configuration file (built-in case study when omitted)");
    cmd->add_option("--out", args.out_dir, "Output directory (overrides config)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Powertrain design optimization: sample, fit, optimize, validate, report"};
    app.require_subcommand(1);

    CommonArgs args;
    long long seed_override = -1;
    bool grid_on = false, grid_off = false;

    CLI::App* sample = app.add_subcommand("sample", "Write the sampling plan and oracle maps");
    CLI::App* fit = app.add_subcommand("fit", "Fit the loss surrogate and battery model");
    CLI::App* optimize = app.add_subcommand("optimize", "Solve the minimum-energy design");
    CLI::App* validate = app.add_subcommand("validate", "Re-simulate the optimum through the oracle");
    CLI::App* report = app.add_subcommand("report", "Emit plot-ready map/trajectory tables");
    for (CLI::App* cmd : {sample, fit, optimize, validate, report}) add_common(cmd, args);
    optimize->add_option("--seed", seed_override, "Override the solver seed");
    optimize->add_flag("--grid", grid_on, "Force the grid cross-check on");
    optimize->add_flag("--no-grid", grid_off, "Disable the grid cross-check");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        ptd::ToolkitConfig config = load_config(args);
        const std::string out = output_dir(args, config);
        if (sample->parsed()) {
            ptd::pipeline::cmd_sample(config, out);
        } else if (fit->parsed()) {
            ptd::pipeline::cmd_fit(config, out);
        } else if (optimize->parsed()) {
            if (seed_override >= 0) {
                config.solver.seed = static_cast<std::uint64_t>(seed_override);
            }
            if (grid_on) config.solver.cross_check = true;
            if (grid_off) config.solver.cross_check = false;
            ptd::pipeline::cmd_optimize(config, out);
        } else if (validate->parsed()) {
            ptd::pipeline::cmd_validate(config, out);
        } else if (report->parsed()) {
            ptd::pipeline::cmd_report(config, out);
        }
    } catch (const ptd::ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
