#include "ptd/surrogate.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

namespace ptd {

void FeatureScaling::validate() const {
    if (!(omega > 0.0) || !(p_rated > 0.0) || !(lambda > 0.0)) {
        throw std::invalid_argument("surrogate: feature scales must be positive");
    }
}

Vec10 features(double omega, const MotorDesign& d, const FeatureScaling& s) {
    if (omega < 0.0) throw std::invalid_argument("surrogate: omega must be >= 0");
    const double w = omega / s.omega;
    const double p = d.p_rated / s.p_rated;
    const double l = d.lambda / s.lambda;
    Vec10 x;
    x << 1.0, w, p, l, w * p, w * l, p * l, w * w, p * p, l * l;
    return x;
}

Eigen::MatrixXd project_psd(const Eigen::MatrixXd& m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("project_psd: matrix not square");
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    if (((m - m.transpose()).cwiseAbs().maxCoeff()) > 1e-12 * scale) {
        throw std::invalid_argument("project_psd: matrix not symmetric");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m);
    if (eig.info() != Eigen::Success) {
        throw std::runtime_error("project_psd: eigensolver failed to converge");
    }
    const Eigen::VectorXd clamped = eig.eigenvalues().cwiseMax(0.0);
    Eigen::MatrixXd result =
        eig.eigenvectors() * clamped.asDiagonal() * eig.eigenvectors().transpose();
    result = 0.5 * (result + result.transpose());
    return result;
}

namespace {

// Index of entry (i, j), i >= j, inside the packed lower triangle.
constexpr int kTriSize = kNumFeatures * (kNumFeatures + 1) / 2;

int tri_index(int i, int j) { return i * (i + 1) / 2 + j; }

// Lower-triangular factor with L*L' == q, valid for singular PSD input.
Mat10 psd_triangular_factor(const Mat10& q) {
    Eigen::SelfAdjointEigenSolver<Mat10> eig(q);
    const Vec10 sqrt_vals = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    const Mat10 b = eig.eigenvectors() * sqrt_vals.asDiagonal();
    // b*b' == q; rotate b into lower-triangular form via QR of b'.
    Eigen::HouseholderQR<Mat10> qr(b.transpose());
    Mat10 r = qr.matrixQR().triangularView<Eigen::Upper>();
    return r.transpose();
}

double quad_cost(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const Mat10& l,
                 Eigen::VectorXd* residual = nullptr) {
    const Eigen::MatrixXd u = x * l;
    Eigen::VectorXd r = u.rowwise().squaredNorm();
    r -= y;
    if (residual) *residual = r;
    return r.squaredNorm();
}

}  // namespace

Mat10 fit_level(std::span<const LossSample> samples, const FeatureScaling& s,
                FitLevelDiagnostics* diag) {
    s.validate();
    const auto m = static_cast<Eigen::Index>(samples.size());
    if (m < kTriSize) {
        throw std::invalid_argument("fit_level: needs at least " +
                                    std::to_string(kTriSize) + " samples, got " +
                                    std::to_string(m));
    }
    std::set<double> omegas, powers, lambdas;
    for (const auto& sample : samples) {
        omegas.insert(sample.omega);
        powers.insert(sample.design.p_rated);
        lambdas.insert(sample.design.lambda);
    }
    if (omegas.size() < 2 || powers.size() < 2 || lambdas.size() < 2) {
        throw std::invalid_argument(
            "fit_level: rank-deficient sample design (need >= 2 distinct values per axis)");
    }

    Eigen::MatrixXd x(m, kNumFeatures);
    Eigen::VectorXd y(m);
    for (Eigen::Index k = 0; k < m; ++k) {
        x.row(k) = features(samples[k].omega, samples[k].design, s).transpose();
        y[k] = samples[k].loss;
    }

    // Unconstrained start: minimum-norm least squares over the packed
    // symmetric coefficients. The monomial products repeat across entries
    // (the feature vector already contains squares), so the system always
    // has a null space and the pivoted solve handles it.
    Eigen::MatrixXd z(m, kTriSize);
    for (Eigen::Index k = 0; k < m; ++k) {
        for (int i = 0; i < kNumFeatures; ++i) {
            for (int j = 0; j <= i; ++j) {
                z(k, tri_index(i, j)) =
                    (i == j) ? x(k, i) * x(k, i) : 2.0 * x(k, i) * x(k, j);
            }
        }
    }
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(z);
    cod.setThreshold(1e-10);
    const Eigen::VectorXd q_packed = cod.solve(y);

    Mat10 q0;
    for (int i = 0; i < kNumFeatures; ++i) {
        for (int j = 0; j <= i; ++j) {
            q0(i, j) = q0(j, i) = q_packed[tri_index(i, j)];
        }
    }

    Mat10 l = psd_triangular_factor(project_psd(q0));

    // Damped Gauss-Newton on the factor entries; only improving steps are
    // accepted so the cost is non-increasing.
    Eigen::VectorXd residual;
    double cost = quad_cost(x, y, l, &residual);
    const double initial_cost = cost;

    constexpr int kMaxIterations = 500;
    constexpr double kRelTol = 1e-10;
    double mu_rel = 1e-6;
    int iterations = 0;
    bool converged = false;

    while (iterations < kMaxIterations && !converged) {
        const Eigen::MatrixXd u = x * l;
        Eigen::MatrixXd jac(m, kTriSize);
        for (Eigen::Index k = 0; k < m; ++k) {
            for (int i = 0; i < kNumFeatures; ++i) {
                for (int j = 0; j <= i; ++j) {
                    jac(k, tri_index(i, j)) = 2.0 * x(k, i) * u(k, j);
                }
            }
        }
        const Eigen::MatrixXd jtj = jac.transpose() * jac;
        const Eigen::VectorXd grad = jac.transpose() * residual;
        if (grad.cwiseAbs().maxCoeff() <= 0.0) break;

        const double damping_scale = jtj.trace() / kTriSize + 1e-300;
        bool accepted = false;
        for (int attempt = 0; attempt < 25; ++attempt) {
            Eigen::MatrixXd damped = jtj;
            damped.diagonal().array() += mu_rel * damping_scale;
            const Eigen::VectorXd delta = damped.ldlt().solve(-grad);

            Mat10 l_new = l;
            for (int i = 0; i < kNumFeatures; ++i) {
                for (int j = 0; j <= i; ++j) {
                    l_new(i, j) += delta[tri_index(i, j)];
                }
            }
            Eigen::VectorXd residual_new;
            const double cost_new = quad_cost(x, y, l_new, &residual_new);
            if (cost_new < cost) {
                const double decrease = (cost - cost_new) / std::max(cost, 1e-300);
                l = l_new;
                cost = cost_new;
                residual = std::move(residual_new);
                mu_rel = std::max(mu_rel * 0.3, 1e-14);
                accepted = true;
                if (decrease < kRelTol) converged = true;
                break;
            }
            mu_rel *= 10.0;
        }
        ++iterations;
        if (!accepted) break;   // no improving step exists at any damping
    }

    if (diag) {
        diag->iterations = iterations;
        diag->initial_cost = initial_cost;
        diag->final_cost = cost;
    }
    return project_psd(Mat10(l * l.transpose()));
}

void LossSurrogate::validate() const {
    scaling.validate();
    space.validate();
    spec.validate();
    if (p_levels.size() < 2 || p_levels.size() != q.size()) {
        throw std::invalid_argument("surrogate: needs >= 2 power levels with matching Q");
    }
    if (p_levels.front() != 0.0) {
        throw std::invalid_argument("surrogate: power levels must start at 0");
    }
    for (std::size_t i = 0; i + 1 < p_levels.size(); ++i) {
        if (!(p_levels[i] < p_levels[i + 1])) {
            throw std::invalid_argument("surrogate: power levels must be strictly increasing");
        }
    }
    for (const auto& qi : q) {
        Eigen::SelfAdjointEigenSolver<Mat10> eig(qi, Eigen::EigenvaluesOnly);
        if (eig.eigenvalues().minCoeff() < -1e-9) {
            throw std::invalid_argument("surrogate: coefficient matrix not PSD");
        }
    }
}

LossSurrogate fit_surrogate(const MotorTechSpec& spec, const DesignSpace& space,
                            const SamplePlan& plan, int n_levels, int n_speed,
                            SurrogateFitReport* report) {
    spec.validate();
    space.validate();
    if (n_levels < 2) throw std::invalid_argument("fit_surrogate: needs >= 2 power levels");
    if (n_speed < 10) throw std::invalid_argument("fit_surrogate: needs >= 10 speed samples");
    for (const auto& d : plan.points) {
        if (!space.contains(d)) {
            throw std::invalid_argument("fit_surrogate: plan point outside design space");
        }
    }

    LossSurrogate model;
    model.scaling = {spec.omega_max, space.p_max, space.lambda_max};
    model.space = space;
    model.spec = spec;
    model.p_levels.resize(static_cast<std::size_t>(n_levels));
    for (int i = 0; i < n_levels; ++i) {
        model.p_levels[static_cast<std::size_t>(i)] =
            space.p_min * i / static_cast<double>(n_levels - 1);
    }

    const double w_eps = spec.omega_eps();
    const Eigen::VectorXd speeds =
        Eigen::VectorXd::LinSpaced(n_speed, w_eps, spec.omega_max);

    model.q.reserve(model.p_levels.size());
    for (double level : model.p_levels) {
        std::vector<LossSample> samples;
        samples.reserve(plan.points.size() * static_cast<std::size_t>(n_speed));
        int clamped = 0;
        for (const auto& d : plan.points) {
            for (Eigen::Index si = 0; si < speeds.size(); ++si) {
                const double w = speeds[si];
                double torque = level / std::max(w, w_eps);
                const double limit = torque_limit(spec, d.p_rated, w);
                if (torque > limit) {
                    torque = limit;
                    ++clamped;
                }
                samples.push_back({w, d, oracle_loss(spec, d, w, torque)});
            }
        }
        FitLevelDiagnostics diag;
        model.q.push_back(fit_level(samples, model.scaling, &diag));
        if (report) {
            report->levels.push_back(diag);
            report->clamped_per_level.push_back(clamped);
        }
    }
    model.validate();
    return model;
}

namespace {

// Bracket [i, i+1] and weight for linear interpolation at pm.
struct LevelBracket {
    std::size_t lo;
    std::size_t hi;
    double w;
};

LevelBracket level_bracket(const std::vector<double>& levels, double pm) {
    if (pm <= levels.front()) return {0, 0, 0.0};
    if (pm >= levels.back()) return {levels.size() - 1, levels.size() - 1, 0.0};
    const auto it = std::upper_bound(levels.begin(), levels.end(), pm);
    const auto hi = static_cast<std::size_t>(it - levels.begin());
    const std::size_t lo = hi - 1;
    return {lo, hi, (pm - levels[lo]) / (levels[hi] - levels[lo])};
}

}  // namespace

Mat10 interpolate_q(const LossSurrogate& m, double p_m) {
    const LevelBracket b = level_bracket(m.p_levels, std::abs(p_m));
    if (b.lo == b.hi) return m.q[b.lo];
    return (1.0 - b.w) * m.q[b.lo] + b.w * m.q[b.hi];
}

double predict_loss(const LossSurrogate& m, double omega, const MotorDesign& d,
                    double p_m) {
    if (omega < 0.0 || omega > m.spec.omega_max * (1.0 + 1e-12)) {
        throw std::domain_error("predict_loss: omega outside [0, omega_max]");
    }
    if (!m.space.contains(d)) {
        throw std::domain_error("predict_loss: design outside the trained space");
    }
    const Vec10 x = features(omega, d, m.scaling);
    const LevelBracket b = level_bracket(m.p_levels, std::abs(p_m));
    const double lo = x.dot(m.q[b.lo] * x);
    if (b.lo == b.hi) return lo;
    const double hi = x.dot(m.q[b.hi] * x);
    return (1.0 - b.w) * lo + b.w * hi;
}

double nrmse(std::span<const double> pred, std::span<const double> ref) {
    if (pred.size() != ref.size() || ref.empty()) {
        throw std::invalid_argument("nrmse: sequences must have equal nonzero length");
    }
    double lo = ref[0], hi = ref[0], sq = 0.0;
    for (std::size_t k = 0; k < ref.size(); ++k) {
        lo = std::min(lo, ref[k]);
        hi = std::max(hi, ref[k]);
        const double e = pred[k] - ref[k];
        sq += e * e;
    }
    if (!(hi > lo)) throw std::invalid_argument("nrmse: constant reference sequence");
    return std::sqrt(sq / static_cast<double>(ref.size())) / (hi - lo);
}

}  // namespace ptd
