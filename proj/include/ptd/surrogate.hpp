#pragma once

#include <Eigen/Core>
#include <span>
#include <vector>

#include "ptd/doe.hpp"
#include "ptd/motor_oracle.hpp"

namespace ptd {

inline constexpr int kNumFeatures = 10;

using Vec10 = Eigen::Matrix<double, kNumFeatures, 1>;
using Mat10 = Eigen::Matrix<double, kNumFeatures, kNumFeatures>;

/// Reference magnitudes used to bring speed, rated power and relative length
/// to comparable scale before forming features.
struct FeatureScaling {
    double omega = 1.0;
    double p_rated = 1.0;
    double lambda = 1.0;

    void validate() const;
};

/// Quadratic-regression feature vector
/// [1, w, p, l, w*p, w*l, p*l, w^2, p^2, l^2] in scaled variables.
Vec10 features(double omega, const MotorDesign& d, const FeatureScaling& s);

/// Frobenius-nearest positive semidefinite matrix: eigendecompose and clamp
/// negative eigenvalues to zero. Input must be symmetric within 1e-12.
Eigen::MatrixXd project_psd(const Eigen::MatrixXd& m);

/// One training point for a loss level fit.
struct LossSample {
    double omega = 0.0;       // [rad/s]
    MotorDesign design;
    double loss = 0.0;        // [W]
};

struct FitLevelDiagnostics {
    int iterations = 0;
    double initial_cost = 0.0;
    double final_cost = 0.0;
};

/// Least-squares fit of a PSD quadratic form x'Qx to loss targets.
/// Starts from the PSD projection of the minimum-norm linear solution and
/// polishes with damped Gauss-Newton on a Cholesky factor; the cost is
/// non-increasing across iterations.
Mat10 fit_level(std::span<const LossSample> samples, const FeatureScaling& s,
                FitLevelDiagnostics* diag = nullptr);

/// Convex motor-loss model: one PSD coefficient matrix per mechanical power
/// level, linearly interpolated in |P_m| between levels.
struct LossSurrogate {
    std::vector<double> p_levels;   // ascending, starting at 0 [W]
    std::vector<Mat10> q;           // one PSD matrix per level
    FeatureScaling scaling;
    DesignSpace space;
    MotorTechSpec spec;

    double max_level() const { return p_levels.empty() ? 0.0 : p_levels.back(); }
    void validate() const;
};

struct SurrogateFitReport {
    std::vector<FitLevelDiagnostics> levels;
    std::vector<int> clamped_per_level;   // training points pushed onto the envelope
};

/// Train the surrogate against the oracle: n_levels uniform power levels over
/// [0, space.p_min], each fitted on every plan design x n_speed uniform
/// speeds in [omega_eps, omega_max].
LossSurrogate fit_surrogate(const MotorTechSpec& spec, const DesignSpace& space,
                            const SamplePlan& plan, int n_levels, int n_speed,
                            SurrogateFitReport* report = nullptr);

/// Coefficient matrix at |p_m|, clamped to the trained level span.
Mat10 interpolate_q(const LossSurrogate& m, double p_m);

/// Predicted motor loss x'Q(|p_m|)x. Symmetric in the sign of p_m and
/// non-negative by construction.
double predict_loss(const LossSurrogate& m, double omega, const MotorDesign& d,
                    double p_m);

/// Root-mean-square error normalized by the reference range.
double nrmse(std::span<const double> pred, std::span<const double> ref);

}  // namespace ptd
