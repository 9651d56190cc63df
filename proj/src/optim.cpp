#include "ptd/optim.hpp"

#include <cmath>

namespace ptd::optim {

namespace {

using Eigen::Matrix3d;

Eigen::VectorXd axis_points(double lo, double hi, int n) {
    return Eigen::VectorXd::LinSpaced(n, lo, hi);
}

Vector3d project_unit_box(const Vector3d& x) {
    return x.cwiseMax(0.0).cwiseMin(1.0);
}

constexpr double kFdStep = 1e-4;
constexpr double kArmijo = 1e-4;
constexpr double kPgTol = 1e-6;

}  // namespace

GridOutcome grid_minimize(const GridObjective& f, const GridSpec& spec) {
    const Eigen::VectorXd xs = axis_points(spec.lo[0], spec.hi[0], spec.n[0]);
    const Eigen::VectorXd ys = axis_points(spec.lo[1], spec.hi[1], spec.n[1]);
    const Eigen::VectorXd zs = axis_points(spec.lo[2], spec.hi[2], spec.n[2]);

    GridOutcome out;
    for (int i = 0; i < spec.n[0]; ++i) {
        for (int j = 0; j < spec.n[1]; ++j) {
            for (int k = 0; k < spec.n[2]; ++k) {
                const Vector3d x(xs[i], ys[j], zs[k]);
                const GridSample sample = f(x);
                ++out.evaluated;
                if (!sample.feasible) continue;
                ++out.feasible;
                if (!out.found || sample.value < out.value) {
                    out.found = true;
                    out.value = sample.value;
                    out.x = x;
                    out.index = {i, j, k};
                }
            }
        }
    }
    return out;
}

BfgsOutcome projected_bfgs(const std::function<double(const Vector3d&)>& f, Vector3d x,
                           int max_iterations) {
    x = project_unit_box(x);
    const double f_scale = std::max(std::abs(f(x)), 1.0);
    auto fn = [&](const Vector3d& p) { return f(p) / f_scale; };
    auto gradient = [&](const Vector3d& p) {
        Vector3d g;
        for (int i = 0; i < 3; ++i) {
            Vector3d hi = p, lo = p;
            hi[i] = std::min(1.0, p[i] + kFdStep);
            lo[i] = std::max(0.0, p[i] - kFdStep);
            g[i] = (fn(hi) - fn(lo)) / (hi[i] - lo[i]);
        }
        return g;
    };

    BfgsOutcome out;
    double value = fn(x);
    Vector3d g = gradient(x);
    Matrix3d h = Matrix3d::Identity();

    for (int iter = 0; iter < max_iterations; ++iter) {
        out.iterations = iter;
        if ((x - project_unit_box(x - g)).norm() < kPgTol * std::max(1.0, std::abs(value))) {
            out.converged = true;
            break;
        }

        Vector3d dir = -h * g;
        bool steepest = false;
        if (dir.dot(g) >= -1e-12 * dir.norm() * g.norm()) {
            dir = -g;
            steepest = true;
            h = Matrix3d::Identity();
        }

        bool accepted = false;
        Vector3d x_new = x;
        double value_new = value;
        auto line_search = [&](const Vector3d& d) {
            for (double alpha = 1.0; alpha >= 1e-14; alpha *= 0.5) {
                const Vector3d cand = project_unit_box(x + alpha * d);
                if ((cand - x).norm() == 0.0) return false;
                const double fc = fn(cand);
                // the projection can bend the step, so require strict descent too
                if (fc < value && fc <= value + kArmijo * g.dot(cand - x)) {
                    x_new = cand;
                    value_new = fc;
                    return true;
                }
            }
            return false;
        };
        accepted = line_search(dir);
        if (!accepted && !steepest) {
            // quasi-Newton direction blocked (stale curvature near a kink)
            h = Matrix3d::Identity();
            accepted = line_search(-g);
        }
        if (!accepted) break;   // stalled against a bound or a kink

        const Vector3d g_new = gradient(x_new);
        const Vector3d s = x_new - x;
        const Vector3d y = g_new - g;
        const double sy = s.dot(y);
        if (sy > 1e-10 * s.norm() * y.norm()) {
            const Vector3d hy = h * y;
            h += (sy + y.dot(hy)) / (sy * sy) * (s * s.transpose()) -
                 (hy * s.transpose() + s * hy.transpose()) / sy;
        }
        x = x_new;
        value = value_new;
        g = g_new;
    }
    out.x = x;
    out.value = value * f_scale;
    return out;
}

}  // namespace ptd::optim
