// End-to-end acceptance suite for the default case study. Each criterion
// prints one PASS/FAIL line; the binary exits nonzero if any fail.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ptd/json_io.hpp"
#include "ptd/pipeline.hpp"
#include "ptd/validate.hpp"

using namespace ptd;

namespace {

struct Outcome {
    int id;
    std::string name;
    bool pass;
    std::string detail;
    double seconds;
};

std::vector<Outcome> g_outcomes;

class Timer {
public:
    Timer() : t0_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
    }

private:
    std::chrono::steady_clock::time_point t0_;
};

void record(int id, const std::string& name, bool pass, const std::string& detail,
            double seconds) {
    g_outcomes.push_back({id, name, pass, detail, seconds});
    std::printf("%s  %d. %s: %s (%.1f s)\n", pass ? "PASS" : "FAIL", id, name.c_str(),
                detail.c_str(), seconds);
    std::fflush(stdout);
}

std::string fmt(const char* format, ...) {
    char buf[512];
    va_list args;
    va_start(args, format);
    std::vsnprintf(buf, sizeof(buf), format, args);
    va_end(args);
    return buf;
}

// shared default case study, built once
struct CaseStudy {
    ToolkitConfig config = ToolkitConfig::defaults();
    SamplePlan plan;
    LossSurrogate surrogate;
    BatteryModel battery;
    DesignProblem problem;
    double fit_seconds = 0.0;
};

CaseStudy build_case_study() {
    CaseStudy cs;
    const Timer t;
    cs.plan = full_factorial(cs.config.space, 3);
    cs.surrogate = fit_surrogate(cs.config.motor, cs.config.space, cs.plan,
                                 cs.config.surrogate.power_levels,
                                 cs.config.surrogate.speed_samples);
    cs.fit_seconds = t.seconds();
    cs.battery = cs.config.make_battery_model();
    cs.problem = pipeline::make_problem(cs.config, cs.surrogate, cs.battery);
    return cs;
}

double sample_pdc_nrmse(const CaseStudy& cs, const MotorDesign& d) {
    const PairedMaps maps = map_comparison(d, cs.problem, cs.config.motor, 60, 45);
    return pdc_nrmse(maps, 0.1 * cs.config.motor.omega_max, cs.config.space.p_min);
}

void criterion_1_surrogate_fidelity(const CaseStudy& cs) {
    const Timer t;
    double mean = 0.0, worst = 0.0;
    for (const auto& d : cs.plan.points) {
        const double err = sample_pdc_nrmse(cs, d);
        mean += err;
        worst = std::max(worst, err);
    }
    mean /= static_cast<double>(cs.plan.points.size());
    const double elapsed = t.seconds() + cs.fit_seconds;
    const bool pass = mean <= 0.05 && elapsed <= 60.0;
    record(1, "surrogate fidelity",
           pass, fmt("mean P_dc NRMSE %.3f%% (worst %.3f%%) <= 5%%", 100 * mean, 100 * worst),
           elapsed);
}

void criterion_2_psd_invariants(const CaseStudy& cs) {
    const Timer t;
    double min_eig = 0.0;
    for (const auto& q : cs.surrogate.q) {
        Eigen::SelfAdjointEigenSolver<Mat10> eig(q, Eigen::EigenvaluesOnly);
        min_eig = std::min(min_eig, eig.eigenvalues().minCoeff());
    }
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> up(0.0, cs.surrogate.max_level());
    for (int k = 0; k < 200; ++k) {
        const Mat10 q = interpolate_q(cs.surrogate, up(rng));
        Eigen::SelfAdjointEigenSolver<Mat10> eig(q, Eigen::EigenvaluesOnly);
        min_eig = std::min(min_eig, eig.eigenvalues().minCoeff());
    }

    std::uniform_real_distribution<double> uw(0.0, cs.config.motor.omega_max);
    std::uniform_real_distribution<double> upr(cs.config.space.p_min, cs.config.space.p_max);
    std::uniform_real_distribution<double> ul(cs.config.space.lambda_min,
                                              cs.config.space.lambda_max);
    std::uniform_real_distribution<double> upm(-150e3, 150e3);
    double min_pred = 0.0;
    for (int k = 0; k < 10000; ++k) {
        const double loss =
            predict_loss(cs.surrogate, uw(rng), {upr(rng), ul(rng)}, upm(rng));
        min_pred = std::min(min_pred, loss);
    }

    const double elapsed = t.seconds();
    const bool pass = min_eig >= -1e-9 && min_pred >= 0.0 && elapsed <= 10.0;
    record(2, "PSD invariant suite", pass,
           fmt("min eigenvalue %.2e >= -1e-9, min prediction %.2e >= 0", min_eig, min_pred),
           elapsed);
}

void criterion_3_roundtrip_fit() {
    const Timer t;
    const MotorTechSpec spec;
    const DesignSpace space;
    const FeatureScaling scaling{spec.omega_max, space.p_max, space.lambda_max};

    std::mt19937_64 rng(3);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Mat10 a;
    for (int i = 0; i < kNumFeatures; ++i) {
        for (int j = 0; j < kNumFeatures; ++j) a(i, j) = gauss(rng);
    }
    const Mat10 q_true = 250.0 * (a * a.transpose());

    std::uniform_real_distribution<double> uw(0.0, spec.omega_max);
    std::uniform_real_distribution<double> up(space.p_min, space.p_max);
    std::uniform_real_distribution<double> ul(space.lambda_min, space.lambda_max);
    std::vector<LossSample> samples;
    for (int k = 0; k < 200; ++k) {
        const MotorDesign d{up(rng), ul(rng)};
        const double w = uw(rng);
        const Vec10 x = features(w, d, scaling);
        samples.push_back({w, d, x.dot(q_true * x)});
    }
    const Mat10 q = fit_level(samples, scaling);

    std::vector<double> pred(samples.size()), ref(samples.size());
    for (std::size_t k = 0; k < samples.size(); ++k) {
        const Vec10 x = features(samples[k].omega, samples[k].design, scaling);
        pred[k] = x.dot(q * x);
        ref[k] = samples[k].loss;
    }
    const double err = nrmse(pred, ref);
    const double elapsed = t.seconds();
    const bool pass = err < 1e-6 && elapsed <= 10.0;
    record(3, "round-trip fit oracle", pass, fmt("prediction NRMSE %.2e < 1e-6", err),
           elapsed);
}

void criterion_4_battery_fit() {
    const Timer t;
    const BatteryCoeffs coeffs = fit_battery(cell_stack_samples(CellStackParams{}, 200));
    const double elapsed = t.seconds();
    const bool pass = coeffs.nrmse <= 0.02 && elapsed <= 1.0;
    record(4, "battery fit", pass, fmt("NRMSE %.4f%% <= 2%%", 100 * coeffs.nrmse), elapsed);
}

struct SolveOutcome {
    SolveResult local;
    SolveResult grid;
    SolveResult best;
};

SolveOutcome g_solved;

void criterion_5_global_crosscheck(const CaseStudy& cs) {
    const Timer t;
    LocalOptions local_opt;
    local_opt.starts = 8;
    local_opt.seed = cs.config.solver.seed;
    g_solved.local = local_solve(cs.problem, local_opt);

    GridOptions grid_opt;   // 21x21x21 with one refinement level
    g_solved.grid = grid_search(cs.problem, grid_opt);

    const SolveResult& local = g_solved.local;
    const SolveResult& grid = g_solved.grid;
    g_solved.best = (grid.delta_e < local.delta_e) ? grid : local;

    const double gap = std::abs(local.delta_e - grid.delta_e) / grid.delta_e;
    const double spread = local.diag.local.spread_rel;
    double cell_dist = 0.0;
    const std::array<double, 3> local_x{local.design.p_rated, local.design.lambda,
                                        local.design.gamma_fgt};
    const std::array<double, 3> grid_x{grid.design.p_rated, grid.design.lambda,
                                       grid.design.gamma_fgt};
    for (int axis = 0; axis < 3; ++axis) {
        const auto a = static_cast<std::size_t>(axis);
        cell_dist = std::max(cell_dist, std::abs(local_x[a] - grid_x[a]) /
                                            grid.diag.grid.cell_size[a]);
    }

    const double elapsed = t.seconds();
    const bool pass =
        gap <= 0.001 && spread <= 0.001 && cell_dist <= 1.0 + 1e-9 && elapsed <= 120.0;
    record(5, "global-optimality cross-check", pass,
           fmt("objective gap %.4f%%, spread %.4f%%, axis distance %.2f cells "
               "(local %.1f kW/%.3f/%.3f, grid %.1f kW/%.3f/%.3f)",
               100 * gap, 100 * spread, cell_dist, local.design.p_rated / 1e3,
               local.design.lambda, local.design.gamma_fgt, grid.design.p_rated / 1e3,
               grid.design.lambda, grid.design.gamma_fgt),
           elapsed);
}

void criterion_6_validation_drift(const CaseStudy& cs) {
    const Timer t;
    const ValidationReport report =
        validate_design(g_solved.best, cs.problem, cs.config.motor);
    const double elapsed = t.seconds();
    const bool pass = report.final_rel_drift <= 0.01 && elapsed <= 30.0;
    record(6, "validation drift", pass,
           fmt("final drift %.1f kJ = %.4f%% of consumed <= 1%% (clamped %d)",
               report.final_drift_j / 1e3, 100 * report.final_rel_drift, report.clamped),
           elapsed);
}

void criterion_7_constraint_activation(const CaseStudy& cs) {
    const Timer t;
    const FeasibilityReport at_paper = check_feasible({145e3, 3.49, 6.0}, cs.problem);
    const auto* grade = at_paper.find("gradeability");
    const auto* top = at_paper.find("top_speed");
    const double gamma_required = 6.0 - grade->margin;
    const double gamma_cap = 6.0 + top->margin;

    double worst_scaled = 0.0;
    for (const auto& c : g_solved.best.report.constraints) {
        worst_scaled = std::min(worst_scaled, c.scaled);
    }

    const double elapsed = t.seconds();
    const bool pass = std::abs(gamma_required - 5.7203) <= 0.01 &&
                      std::abs(gamma_cap - 8.2467) <= 0.01 && worst_scaled >= -1e-6;
    record(7, "constraint activation sanity", pass,
           fmt("gamma >= %.4f (ref 5.72), gamma <= %.4f (ref 8.25), worst scaled margin "
               "%.2e at the optimum (gamma* = %.4f)",
               gamma_required, gamma_cap, worst_scaled, g_solved.best.design.gamma_fgt),
           elapsed);
}

void criterion_8_exact_identities(const CaseStudy& cs) {
    const Timer t;
    bool pass = true;
    std::string detail;

    // telescoping of the SOE integration
    const Trajectories& traj = g_solved.best.traj;
    double sum = 0.0;
    for (std::size_t k = 0; k < traj.p_i.size(); ++k) sum += traj.p_i[k] * cs.problem.cycle.dt;
    const double tele_err = std::abs(traj.soe.delta_e - sum) / std::abs(sum);
    if (tele_err > 1e-9) {
        pass = false;
        detail += fmt("telescoping error %.2e; ", tele_err);
    }

    // randomized motor power properties
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> upow(-500e3, 500e3);
    const double p_rated = 110e3;
    std::vector<double> p_req(2000);
    for (auto& p : p_req) p = upow(rng);
    p_req[0] = 0.0;
    const auto p_m = motor_mech_power(p_req, cs.config.vehicle, p_rated);
    for (std::size_t k = 0; k < p_req.size(); ++k) {
        const bool sign_ok = (p_req[k] > 0 && p_m[k] > 0) || (p_req[k] < 0 && p_m[k] < 0) ||
                             (p_req[k] == 0 && p_m[k] == 0);
        if (!sign_ok || p_m[k] < -p_rated) {
            pass = false;
            detail += fmt("motor power property broken at %zu; ", k);
            break;
        }
    }

    // drift must vanish when the surrogate validates itself
    const ValidationReport self = validate_against_losses(
        g_solved.best, cs.problem, g_solved.best.traj.p_loss, 0);
    double max_drift = 0.0;
    for (double d : self.drift) max_drift = std::max(max_drift, std::abs(d));
    if (max_drift != 0.0) {
        pass = false;
        detail += fmt("self-validation drift %.2e != 0; ", max_drift);
    }

    if (pass) {
        detail = fmt("telescoping %.1e, sign/clip on 2000 draws, self-drift exactly 0",
                     tele_err);
    }
    record(8, "exact identities", pass, detail, t.seconds());
}

void criterion_9_determinism() {
    const Timer t;
    const ToolkitConfig config = ToolkitConfig::defaults();

    namespace fs = std::filesystem;
    const fs::path base = fs::temp_directory_path() / "ptdesign_acceptance";
    const fs::path dir_a = base / "run_a";
    const fs::path dir_b = base / "run_b";
    fs::remove_all(base);

    auto run_all = [&config](const std::string& out) {
        pipeline::cmd_sample(config, out);
        pipeline::cmd_fit(config, out);
        pipeline::cmd_optimize(config, out);
        pipeline::cmd_validate(config, out);
        pipeline::cmd_report(config, out);
    };
    run_all(dir_a.string());
    run_all(dir_b.string());

    auto read_bytes = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        return std::string{std::istreambuf_iterator<char>(in),
                           std::istreambuf_iterator<char>()};
    };

    bool pass = true;
    std::string mismatch;
    int files = 0;
    for (const auto& entry : fs::directory_iterator(dir_a)) {
        ++files;
        const fs::path other = dir_b / entry.path().filename();
        if (!fs::exists(other) || read_bytes(entry.path()) != read_bytes(other)) {
            pass = false;
            mismatch = entry.path().filename().string();
            break;
        }
    }
    fs::remove_all(base);

    record(9, "pipeline determinism", pass,
           pass ? fmt("two full runs byte-identical across %d files", files)
                : fmt("mismatch in %s", mismatch.c_str()),
           t.seconds());
}

}  // namespace

int main() {
    std::printf("acceptance: default case study, full pipeline\n");
    const CaseStudy cs = build_case_study();

    criterion_1_surrogate_fidelity(cs);
    criterion_2_psd_invariants(cs);
    criterion_3_roundtrip_fit();
    criterion_4_battery_fit();
    criterion_5_global_crosscheck(cs);
    criterion_6_validation_drift(cs);
    criterion_7_constraint_activation(cs);
    criterion_8_exact_identities(cs);
    criterion_9_determinism();

    int failed = 0;
    for (const auto& outcome : g_outcomes) failed += outcome.pass ? 0 : 1;
    std::printf("acceptance: %zu criteria, %d failed\n", g_outcomes.size(), failed);
    return failed == 0 ? 0 : 1;
}
