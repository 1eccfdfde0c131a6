#pragma once

#include "pdtune/control.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace pdtune {

/// Objective values, smaller is better. The drone problem uses four
/// components ordered [phi, theta, psi, z]; the Pareto utilities accept any
/// dimension.
using ObjectiveVector = std::vector<double>;

/// Objective value assigned to every component of an aborted rollout. Finite
/// so dominance and sorting stay well defined, large enough to lose every
/// comparison against a stable candidate.
inline constexpr double kInstabilityPenalty = 1e6;

/// Non-negative aggregation weights, defaulting to equal emphasis.
struct Weights {
    std::vector<double> values = {1.0, 1.0, 1.0, 1.0};

    void validate() const {
        double total = 0.0;
        for (double w : values) {
            if (!(w >= 0.0) || !std::isfinite(w)) {
                throw std::invalid_argument("Weights: entries must be finite and >= 0");
            }
            total += w;
        }
        if (!(total > 0.0)) {
            throw std::invalid_argument("Weights: at least one entry must be positive");
        }
    }
};

/// Integrated absolute tracking errors of phi, theta, psi and z against the
/// reference, left-endpoint rectangle rule over the sample grid. Aborted or
/// empty trajectories map to the instability penalty on every component.
inline ObjectiveVector evaluate_objectives(const Trajectory& traj, const Reference& ref) {
    if (!traj.stable || traj.size() < 2) {
        return ObjectiveVector(4, kInstabilityPenalty);
    }
    double f_phi = 0.0, f_theta = 0.0, f_psi = 0.0, f_z = 0.0;
    // Left endpoints: the final sample carries no rectangle.
    for (std::size_t k = 0; k + 1 < traj.size(); ++k) {
        const DroneState& s = traj.states[k];
        f_phi += std::abs(s.eta[0] - ref.phi) * traj.dt;
        f_theta += std::abs(s.eta[1] - ref.theta) * traj.dt;
        f_psi += std::abs(s.eta[2] - ref.psi) * traj.dt;
        f_z += std::abs(s.eps[2] - ref.z) * traj.dt;
    }
    return {f_phi, f_theta, f_psi, f_z};
}

/// Weighted sum of the objective components.
inline double aggregate(const ObjectiveVector& obj, const Weights& w) {
    w.validate();
    if (obj.size() != w.values.size()) {
        throw std::invalid_argument("aggregate: objective/weight dimension mismatch");
    }
    double total = 0.0;
    for (std::size_t i = 0; i < obj.size(); ++i) {
        total += w.values[i] * obj[i];
    }
    return total;
}

} // namespace pdtune
