#include "ptd/doe.hpp"

#include <random>
#include <stdexcept>

#include "ptd/csv.hpp"

namespace ptd {

void DesignSpace::validate() const {
    if (!(p_min < p_max) || !(lambda_min < lambda_max)) {
        throw std::invalid_argument("doe: design-space bounds need min < max on both axes");
    }
    if (!(p_min > 0.0) || !(lambda_min > 0.0)) {
        throw std::invalid_argument("doe: design-space bounds must be positive");
    }
}

bool DesignSpace::contains(const MotorDesign& d) const {
    return d.p_rated >= p_min && d.p_rated <= p_max && d.lambda >= lambda_min &&
           d.lambda <= lambda_max;
}

SamplePlan full_factorial(const DesignSpace& space, int levels) {
    space.validate();
    if (levels < 2) throw std::invalid_argument("doe: full factorial needs >= 2 levels");

    SamplePlan plan;
    plan.kind = PlanKind::full_factorial;
    plan.points.reserve(static_cast<std::size_t>(levels) * levels);
    for (int i = 0; i < levels; ++i) {
        const double p = space.p_min +
                         (space.p_max - space.p_min) * i / static_cast<double>(levels - 1);
        for (int j = 0; j < levels; ++j) {
            const double l = space.lambda_min + (space.lambda_max - space.lambda_min) * j /
                                                    static_cast<double>(levels - 1);
            plan.points.push_back({p, l});
        }
    }
    return plan;
}

namespace {

// Fisher-Yates with explicit draws so the seed alone pins the permutation.
std::vector<int> seeded_permutation(int n, std::mt19937_64& rng) {
    std::vector<int> perm(n);
    for (int i = 0; i < n; ++i) perm[i] = i;
    for (int i = n - 1; i > 0; --i) {
        const auto j = static_cast<int>(rng() % static_cast<std::uint64_t>(i + 1));
        std::swap(perm[i], perm[j]);
    }
    return perm;
}

}  // namespace

SamplePlan latin_hypercube(const DesignSpace& space, int n, std::uint64_t seed) {
    space.validate();
    if (n < 2) throw std::invalid_argument("doe: latin hypercube needs n >= 2");

    std::mt19937_64 rng(seed);
    const std::vector<int> perm_p = seeded_permutation(n, rng);
    const std::vector<int> perm_l = seeded_permutation(n, rng);

    SamplePlan plan;
    plan.kind = PlanKind::latin_hypercube;
    plan.seed = seed;
    plan.points.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double u_p = (perm_p[i] + 0.5) / static_cast<double>(n);
        const double u_l = (perm_l[i] + 0.5) / static_cast<double>(n);
        plan.points.push_back({space.p_min + (space.p_max - space.p_min) * u_p,
                               space.lambda_min + (space.lambda_max - space.lambda_min) * u_l});
    }
    return plan;
}

void write_plan_csv(const SamplePlan& plan, const std::string& path) {
    std::vector<std::vector<std::string>> rows;
    rows.reserve(plan.points.size());
    for (const auto& d : plan.points) {
        rows.push_back({csv::format(d.p_rated), csv::format(d.lambda)});
    }
    csv::write_file(path, {"P_rated_W", "lambda"}, rows);
}

SamplePlan load_plan_csv(const std::string& path) {
    const csv::Table table = csv::read_file(path);
    const int col_p = table.column("P_rated_W");
    const int col_l = table.column("lambda");
    if (col_p < 0 || col_l < 0) {
        throw std::runtime_error("doe: plan file missing P_rated_W/lambda columns: " + path);
    }
    SamplePlan plan;
    for (std::size_t k = 0; k < table.rows.size(); ++k) {
        plan.points.push_back({table.number(k, col_p), table.number(k, col_l)});
    }
    return plan;
}

}  // namespace ptd
