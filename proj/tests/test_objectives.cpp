#include "pdtune/objectives.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

using namespace pdtune;

namespace {

Trajectory constant_trajectory(const DroneState& s, double dt, std::size_t samples) {
    Trajectory traj;
    traj.dt = dt;
    traj.stable = true;
    for (std::size_t k = 0; k < samples; ++k) {
        traj.times.push_back(static_cast<double>(k) * dt);
        traj.states.push_back(s);
        traj.inputs.emplace_back();
    }
    return traj;
}

} // namespace

TEST_CASE("a trajectory pinned to the reference costs nothing") {
    const Trajectory traj = constant_trajectory(DroneState{}, 0.01, 101);
    REQUIRE(evaluate_objectives(traj, Reference{}) == ObjectiveVector{0.0, 0.0, 0.0, 0.0});
}

TEST_CASE("constant errors integrate exactly under the rectangle rule") {
    // dt = 2^-6 for two seconds: 128 rectangles, exact in binary.
    const double dt = 0.015625;
    DroneState s;
    s.eps[2] = -1.0;
    s.eta = Eigen::Vector3d(0.5, 0.25, 0.0);
    const Trajectory traj = constant_trajectory(s, dt, 129);
    const ObjectiveVector f = evaluate_objectives(traj, Reference{});
    REQUIRE(f[0] == 1.0);
    REQUIRE(f[1] == 0.5);
    REQUIRE(f[2] == 0.0);
    REQUIRE(f[3] == 2.0);
}

TEST_CASE("rectangle sums match an independent accumulation") {
    const double dt = 0.01;
    Trajectory traj;
    traj.dt = dt;
    traj.stable = true;
    double expected_phi = 0.0;
    double expected_z = 0.0;
    for (std::size_t k = 0; k <= 200; ++k) {
        DroneState s;
        s.eta[0] = std::sin(0.05 * static_cast<double>(k));
        s.eps[2] = -1.0 + 0.004 * static_cast<double>(k);
        traj.times.push_back(static_cast<double>(k) * dt);
        traj.states.push_back(s);
        traj.inputs.emplace_back();
        if (k < 200) {
            expected_phi += std::abs(s.eta[0]) * dt;
            expected_z += std::abs(s.eps[2]) * dt;
        }
    }
    const ObjectiveVector f = evaluate_objectives(traj, Reference{});
    REQUIRE(f[0] == expected_phi);
    REQUIRE(f[3] == expected_z);
}

TEST_CASE("aborted rollouts earn the instability penalty") {
    Trajectory traj = constant_trajectory(DroneState{}, 0.01, 50);
    traj.stable = false;
    REQUIRE(evaluate_objectives(traj, Reference{}) ==
            ObjectiveVector(4, kInstabilityPenalty));

    const Trajectory empty;
    REQUIRE(evaluate_objectives(empty, Reference{}) ==
            ObjectiveVector(4, kInstabilityPenalty));
}

TEST_CASE("widening any pointwise error never shrinks an objective") {
    Trajectory traj;
    traj.dt = 0.1;
    traj.stable = true;
    for (std::size_t k = 0; k < 20; ++k) {
        DroneState s;
        s.eta = Eigen::Vector3d(std::sin(0.3 * k), std::cos(0.4 * k), 0.1 * k - 1.0);
        s.eps[2] = 0.2 * k - 2.0;
        traj.times.push_back(0.1 * static_cast<double>(k));
        traj.states.push_back(s);
        traj.inputs.emplace_back();
    }
    const ObjectiveVector base = evaluate_objectives(traj, Reference{});
    for (std::size_t k = 0; k < 19; ++k) {
        Trajectory bumped = traj;
        DroneState& s = bumped.states[k];
        for (int i = 0; i < 3; ++i) {
            s.eta[i] += (s.eta[i] >= 0.0 ? 0.5 : -0.5);
        }
        s.eps[2] += (s.eps[2] >= 0.0 ? 0.5 : -0.5);
        const ObjectiveVector widened = evaluate_objectives(bumped, Reference{});
        for (std::size_t i = 0; i < 4; ++i) {
            REQUIRE(widened[i] >= base[i]);
        }
    }
}

TEST_CASE("aggregate computes the weighted sum") {
    REQUIRE(aggregate({1.0, 2.0, 3.0, 4.0}, Weights{}) == 10.0);
    REQUIRE(aggregate({1.0, 2.0, 3.0, 4.0}, Weights{{0.0, 0.0, 0.0, 1.0}}) == 4.0);
    REQUIRE(aggregate({0.0, 0.0, 0.0, 0.0}, Weights{{0.3, 0.2, 0.4, 2.0}}) == 0.0);
}

TEST_CASE("aggregate is linear in both arguments") {
    const ObjectiveVector a = {0.5, 1.25, 2.0, 0.125};
    const ObjectiveVector b = {1.0, 0.25, 0.5, 4.0};
    const Weights w{{1.0, 2.0, 0.5, 0.25}};
    ObjectiveVector sum(4);
    for (std::size_t i = 0; i < 4; ++i) {
        sum[i] = a[i] + b[i];
    }
    REQUIRE(aggregate(sum, w) == Catch::Approx(aggregate(a, w) + aggregate(b, w)).epsilon(1e-14));
    Weights doubled = w;
    for (double& v : doubled.values) {
        v *= 2.0;
    }
    REQUIRE(aggregate(a, doubled) == Catch::Approx(2.0 * aggregate(a, w)).epsilon(1e-14));
}

TEST_CASE("aggregate rejects bad input") {
    REQUIRE_THROWS_AS(aggregate({1.0, 2.0}, Weights{}), std::invalid_argument);
    REQUIRE_THROWS_AS(aggregate({1.0, 2.0, 3.0, 4.0}, Weights{{0.0, 0.0, 0.0, 0.0}}),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(aggregate({1.0}, Weights{{-1.0}}), std::invalid_argument);
}

TEST_CASE("objective integrals converge as dt shrinks") {
    DroneParams p;
    const auto objectives_at = [&](double dt) {
        const Trajectory traj = simulate(conventional_pd_gains(), Reference{},
                                         default_initial_state(), p, dt, 10.0);
        REQUIRE(traj.stable);
        return evaluate_objectives(traj, Reference{});
    };
    const ObjectiveVector coarse = objectives_at(0.01);
    const ObjectiveVector fine = objectives_at(0.005);
    for (std::size_t i = 0; i < 4; ++i) {
        REQUIRE(std::abs(coarse[i] - fine[i]) < 0.01 * fine[i]);
    }
}
