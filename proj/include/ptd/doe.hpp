#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ptd/motor_oracle.hpp"

namespace ptd {

/// Rectangular motor design space.
struct DesignSpace {
    double p_min = 70e3;      // [W]
    double p_max = 150e3;     // [W]
    double lambda_min = 1.0;
    double lambda_max = 4.0;

    void validate() const;
    bool contains(const MotorDesign& d) const;
};

enum class PlanKind { full_factorial, latin_hypercube };

/// Sampling plan over the design space: distinct in-bounds design points.
struct SamplePlan {
    std::vector<MotorDesign> points;
    PlanKind kind = PlanKind::full_factorial;
    std::uint64_t seed = 0;
};

/// Tensor grid of `levels` equally spaced values per axis (levels^2 points).
SamplePlan full_factorial(const DesignSpace& space, int levels);

/// Stratum-midpoint Latin Hypercube: each axis split into n strata, midpoints
/// paired through a seeded permutation. Fully determined by the seed.
SamplePlan latin_hypercube(const DesignSpace& space, int n, std::uint64_t seed);

/// CSV export `P_rated_W,lambda`.
void write_plan_csv(const SamplePlan& plan, const std::string& path);
SamplePlan load_plan_csv(const std::string& path);

}  // namespace ptd
