#pragma once

#include <Eigen/Core>
#include <array>
#include <functional>

namespace ptd::optim {

using Eigen::Vector3d;

struct GridSample {
    double value = 0.0;
    bool feasible = false;
};

using GridObjective = std::function<GridSample(const Vector3d&)>;

struct GridSpec {
    Vector3d lo = Vector3d::Zero();
    Vector3d hi = Vector3d::Ones();
    std::array<int, 3> n{2, 2, 2};
};

struct GridOutcome {
    bool found = false;
    Vector3d x = Vector3d::Zero();
    double value = 0.0;
    std::array<int, 3> index{0, 0, 0};
    long evaluated = 0;
    long feasible = 0;
};

/// Exhaustive minimization over the tensor grid. Only strict improvements
/// replace the incumbent, so ties keep the lexicographically first index
/// triple regardless of values elsewhere.
GridOutcome grid_minimize(const GridObjective& f, const GridSpec& spec);

struct BfgsOutcome {
    Vector3d x = Vector3d::Zero();
    double value = 0.0;
    bool converged = false;
    int iterations = 0;
};

/// Projected quasi-Newton on the unit box: central finite differences with
/// step 1e-4, BFGS inverse-Hessian updates, Armijo backtracking (1e-4) on the
/// projected step, stopping when the projected gradient falls below 1e-6 of
/// the scaled objective. The objective is normalized internally by its value
/// at the start point.
BfgsOutcome projected_bfgs(const std::function<double(const Vector3d&)>& f, Vector3d x0,
                           int max_iterations);

}  // namespace ptd::optim
