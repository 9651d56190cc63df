// temporary diagnostic: objective profile along the gradeability wall and
// per-start local solver behavior
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

#include "ptd/optim.hpp"
#include "ptd/pipeline.hpp"

using namespace ptd;

int main() {
    ToolkitConfig config = ToolkitConfig::defaults();
    const SamplePlan plan = full_factorial(config.space, 3);
    const LossSurrogate surrogate = fit_surrogate(config.motor, config.space, plan, 8, 25);
    const BatteryModel battery = config.make_battery_model();
    const DesignProblem prob = pipeline::make_problem(config, surrogate, battery);

    const double grade_const = prob.vehicle.mass * prob.vehicle.gravity *
                               prob.vehicle.wheel_radius * std::sin(prob.alpha_max) /
                               prob.vehicle.driveline_eff * prob.motor.omega_rated;

    std::printf("objective along the wall (lambda = 1):\n");
    for (double p = 133e3; p <= 150e3; p += 1e3) {
        const double gamma = grade_const / p;
        const DesignVector cand{p, 1.0, gamma};
        const auto eval = objective(cand, prob, false);
        std::printf("  P=%6.1f kW gamma=%.4f  deltaE=%.6f MJ  feasible=%d\n", p / 1e3,
                    gamma, eval.delta_e / 1e6, eval.report.feasible() ? 1 : 0);
    }

    std::printf("\nlambda profile at P=143.3k on the wall:\n");
    for (double l : {1.0, 1.1, 1.25, 1.5, 2.0, 3.0, 4.0}) {
        const DesignVector cand{143.3e3, l, grade_const / 143.3e3};
        const auto eval = objective(cand, prob, false);
        std::printf("  lambda=%.2f  deltaE=%.6f MJ\n", l, eval.delta_e / 1e6);
    }

    // mimic local_solve per start
    const optim::Vector3d lo(prob.box.p_min, prob.box.lambda_min, prob.box.gamma_min);
    const optim::Vector3d width(prob.box.p_max - prob.box.p_min,
                                prob.box.lambda_max - prob.box.lambda_min,
                                prob.box.gamma_max - prob.box.gamma_min);
    const double gamma_cap = std::clamp(
        prob.motor.omega_max * prob.vehicle.wheel_radius / prob.v_max,
        prob.box.gamma_min, prob.box.gamma_max);
    auto unscale = [&](const optim::Vector3d& x) {
        DesignVector p{lo[0] + width[0] * x[0], lo[1] + width[1] * x[1],
                       lo[2] + width[2] * x[2]};
        const double floor = std::clamp(grade_const / p.p_rated, prob.box.gamma_min, gamma_cap);
        p.gamma_fgt = std::clamp(p.gamma_fgt, floor, gamma_cap);
        return p;
    };
    auto value = [&](const optim::Vector3d& x) {
        return objective(unscale(x), prob, false).value;
    };

    std::mt19937_64 rng(1);
    auto draw = [&rng]() { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
    std::printf("\nper-start outcomes:\n");
    for (int s = 0; s < 8; ++s) {
        optim::Vector3d x0;
        do {
            x0 = optim::Vector3d(draw(), draw(), draw());
        } while (!objective(unscale(x0), prob, false).report.feasible());
        const auto out = optim::projected_bfgs(value, x0, 200);
        const DesignVector p = unscale(out.x);
        std::printf(
            "  start (%.3f %.3f %.3f) -> P=%7.2f kW l=%.4f g=%.4f  f=%.6f MJ  "
            "iters=%d conv=%d\n",
            x0[0], x0[1], x0[2], p.p_rated / 1e3, p.lambda, p.gamma_fgt, out.value / 1e6,
            out.iterations, out.converged ? 1 : 0);
    }
    return 0;
}
