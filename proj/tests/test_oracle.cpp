#include <doctest.h>

#include <cmath>
#include <vector>

#include "ptd/motor_oracle.hpp"
#include "test_util.hpp"

using namespace ptd;
using ptd_test::contains;
using ptd_test::thrown_message;

namespace {

const MotorTechSpec kSpec{};   // 700 V, 3500/10000 rpm, 3 pole pairs

}  // namespace

TEST_CASE("oracle loss at standstill is the constant term") {
    CHECK(oracle_loss(kSpec, {100e3, 3.0}, 0.0, 0.0) == doctest::Approx(200.0));
}

TEST_CASE("oracle loss at the rated point") {
    // tau = 1, w_bar = 1, omega/omega_max = 0.35:
    // 0.025*1.15*1e5 + 0.012*1.15*1e5 + 0.004*1e5*0.042875 + 200 = 4472.15 W
    const MotorDesign d{100e3, 3.0};
    const double t_rated = rated_torque(kSpec, d.p_rated);
    const double loss = oracle_loss(kSpec, d, kSpec.omega_rated, t_rated);
    CHECK(loss == doctest::Approx(4472.15).epsilon(1e-6));

    const double eta = d.p_rated / (d.p_rated + loss);
    CHECK(eta == doctest::Approx(0.957).epsilon(1e-3));

    // half torque quarters the copper term: 718.75+1380+17.15+200
    CHECK(oracle_loss(kSpec, d, kSpec.omega_rated, t_rated / 2.0) ==
          doctest::Approx(2315.90).epsilon(1e-6));
}

TEST_CASE("oracle loss symmetry and monotonicity") {
    const MotorDesign d{120e3, 2.2};
    const double t_rated = rated_torque(kSpec, d.p_rated);

    for (double frac : {0.1, 0.4, 0.9}) {
        CHECK(oracle_loss(kSpec, d, 200.0, frac * t_rated) ==
              oracle_loss(kSpec, d, 200.0, -frac * t_rated));
    }

    double prev = oracle_loss(kSpec, d, 150.0, 0.0);
    for (double frac : {0.2, 0.5, 0.8, 1.0}) {
        const double loss = oracle_loss(kSpec, d, 150.0, frac * t_rated);
        CHECK(loss > prev);
        prev = loss;
    }

    prev = oracle_loss(kSpec, d, 0.0, 50.0);
    for (double w : {100.0, 300.0, 600.0, 1000.0}) {
        const double loss = oracle_loss(kSpec, d, w, 50.0);
        CHECK(loss > prev);
        prev = loss;
    }
}

TEST_CASE("oracle loss scales with rated power at fixed normalized point") {
    const MotorDesign d{80e3, 1.7};
    const double t_rated = rated_torque(kSpec, d.p_rated);
    const double base = oracle_loss(kSpec, d, 0.6 * kSpec.omega_rated, 0.7 * t_rated);

    const double s = 1.75;
    const MotorDesign scaled{s * d.p_rated, d.lambda};
    const double scaled_loss =
        oracle_loss(kSpec, scaled, 0.6 * kSpec.omega_rated, s * 0.7 * t_rated);
    CHECK(scaled_loss == doctest::Approx(s * base).epsilon(1e-12));
}

TEST_CASE("oracle rejects points outside the envelope") {
    const MotorDesign d{100e3, 3.0};
    CHECK(contains(thrown_message([&] {
                       oracle_loss(kSpec, d, kSpec.omega_max * 1.01, 0.0);
                   }),
                   "speed"));
    CHECK(contains(thrown_message([&] {
                       oracle_loss(kSpec, d, kSpec.omega_rated,
                                   1.01 * rated_torque(kSpec, d.p_rated));
                   }),
                   "torque"));
}

TEST_CASE("torque limit is a constant-power hyperbola above rated speed") {
    const double t_rated = rated_torque(kSpec, 100e3);
    CHECK(torque_limit(kSpec, 100e3, 0.5 * kSpec.omega_rated) == t_rated);
    CHECK(torque_limit(kSpec, 100e3, 2.0 * kSpec.omega_rated) ==
          doctest::Approx(t_rated / 2.0).epsilon(1e-12));
}

TEST_CASE("generate_map covers the envelope corners") {
    const MotorDesign d{100e3, 3.0};
    const EfficiencyMap map = generate_map(kSpec, d, 2, 2);

    CHECK(map.omega_grid[0] == doctest::Approx(kSpec.omega_eps()));
    CHECK(map.omega_grid[1] == doctest::Approx(kSpec.omega_max));
    CHECK(map.torque_grid[1] == doctest::Approx(rated_torque(kSpec, d.p_rated)));
    CHECK(map.feasible(0, 0));
    CHECK(map.feasible(0, 1));          // rated torque at low speed
    CHECK_FALSE(map.feasible(1, 1));    // rated torque at max speed is beyond the hyperbola
    CHECK(map.loss.minCoeff() >= 0.0);
}

TEST_CASE("dense map of the case-study design has sane peak efficiency") {
    const MotorDesign d{145e3, 3.49};
    const EfficiencyMap map = generate_map(kSpec, d, 60, 60);

    double best = 0.0;
    for (int i = 0; i < 60; ++i) {
        for (int j = 0; j < 60; ++j) {
            if (!map.feasible(i, j)) continue;
            const double p_m = map.omega_grid[i] * map.torque_grid[j];
            if (p_m <= 0.0) continue;
            best = std::max(best, p_m / (p_m + map.loss(i, j)));
        }
    }
    CHECK(best > 0.90);
    CHECK(best < 0.98);
}

TEST_CASE("evaluate_trajectory basics") {
    const MotorDesign d{100e3, 3.0};

    const std::vector<double> zeros(5, 0.0);
    const auto idle = evaluate_trajectory(kSpec, d, zeros, zeros);
    for (double loss : idle.loss) CHECK(loss == doctest::Approx(200.0));
    CHECK(idle.clamped == 0);

    // single consistent point at rated speed and power
    const std::vector<double> w{kSpec.omega_rated};
    const std::vector<double> p{100e3};
    const auto rated = evaluate_trajectory(kSpec, d, w, p);
    CHECK(rated.loss[0] ==
          doctest::Approx(oracle_loss(kSpec, d, kSpec.omega_rated,
                                      rated_torque(kSpec, d.p_rated))));

    // standstill with nonzero power engages the speed floor
    const std::vector<double> w0{0.0};
    const std::vector<double> p0{5e3};
    const auto floored = evaluate_trajectory(kSpec, d, w0, p0);
    CHECK(floored.clamped == 1);
    CHECK(floored.loss[0] ==
          doctest::Approx(oracle_loss(kSpec, d, 0.0, 5e3 / kSpec.omega_eps())));
}

TEST_CASE("evaluate_trajectory clamps excess torque") {
    const MotorDesign d{100e3, 3.0};
    // rated power demanded at 10% of rated speed exceeds the torque plateau
    const std::vector<double> w{0.1 * kSpec.omega_rated};
    const std::vector<double> p{100e3};
    const auto out = evaluate_trajectory(kSpec, d, w, p);
    CHECK(out.clamped == 1);
    CHECK(out.loss[0] ==
          doctest::Approx(oracle_loss(kSpec, d, w[0], rated_torque(kSpec, d.p_rated))));
}

TEST_CASE("map export round-trips through CSV") {
    ptd_test::TempDir dir("oracle");
    const EfficiencyMap map = generate_map(kSpec, {100e3, 3.0}, 4, 3);
    write_map_csv(map, dir.file("map.csv"));
    write_map_sidecar(map, kSpec, dir.file("map.json"));

    const std::string body = ptd_test::read_bytes(dir.file("map.csv"));
    CHECK(contains(body, "omega_radps,torque_Nm,loss_W,feasible"));
    CHECK(contains(ptd_test::read_bytes(dir.file("map.json")), "omega_rated_radps"));
}
