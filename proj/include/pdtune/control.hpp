#pragma once

#include "pdtune/dynamics.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <vector>

namespace pdtune {

/// pd_law rejects attitudes where the thrust projection collapses.
inline constexpr double kTiltCosineGuard = 1e-6;

/// Proportional and derivative gains for roll, pitch, yaw and altitude.
struct PdGains {
    double kp_phi = 0.0;
    double kd_phi = 0.0;
    double kp_theta = 0.0;
    double kd_theta = 0.0;
    double kp_psi = 0.0;
    double kd_psi = 0.0;
    double kp_z = 0.0;
    double kd_z = 0.0;

    std::array<double, 8> as_array() const {
        return {kp_phi, kd_phi, kp_theta, kd_theta, kp_psi, kd_psi, kp_z, kd_z};
    }

    static PdGains from(const std::vector<double>& genes) {
        if (genes.size() != 8) {
            throw std::invalid_argument("PdGains: expected 8 values");
        }
        return {genes[0], genes[1], genes[2], genes[3],
                genes[4], genes[5], genes[6], genes[7]};
    }

    std::vector<double> to_vector() const {
        const auto a = as_array();
        return std::vector<double>(a.begin(), a.end());
    }
};

/// Canonical column and CSV order of the eight gains.
inline const std::array<const char*, 8>& gain_names() {
    static const std::array<const char*, 8> names = {
        "kp_phi", "kd_phi", "kp_theta", "kd_theta",
        "kp_psi", "kd_psi", "kp_z",     "kd_z"};
    return names;
}

/// Hand-tuned conventional PD gains used as the seeded starting point and as
/// the comparison baseline.
inline PdGains conventional_pd_gains() {
    return {6.0, 1.75, 6.0, 1.75, 6.0, 1.75, 1.5, 2.5};
}

/// Constant setpoints; all derivative references are zero (regulation).
struct Reference {
    double z = 0.0;
    double phi = 0.0;
    double theta = 0.0;
    double psi = 0.0;
};

/// Perturbed starting condition used by all tuning experiments:
/// one meter below the setpoint with -0.7 rad on every Euler angle.
inline DroneState default_initial_state() {
    DroneState s;
    s.eps = Eigen::Vector3d(0.0, 0.0, -1.0);
    s.eta = Eigen::Vector3d(-0.7, -0.7, -0.7);
    return s;
}

/// Thrust saturation: a generous rotor-capacity proxy of 4 m g.
inline double thrust_limit(const DroneParams& p) {
    return 4.0 * p.m * p.g;
}

/// PD feedback law.
///
/// Thrust compensates gravity plus the altitude PD term, divided by
/// cos(phi) cos(theta) to project the body-z force onto inertial z, then
/// clamped to [0, thrust_limit]. Torques are inertia-scaled PD terms on the
/// Euler angles, so gains act directly on angular acceleration.
inline ControlInput pd_law(const DroneState& s, const Reference& ref, const PdGains& g,
                           const DroneParams& p) {
    const double tilt = std::cos(s.eta[0]) * std::cos(s.eta[1]);
    if (std::abs(tilt) < kTiltCosineGuard) {
        throw SingularAttitudeError("pd_law: |cos(phi) cos(theta)| < 1e-6");
    }

    ControlInput u;
    const double vertical = p.g + g.kp_z * (ref.z - s.eps[2]) + g.kd_z * (0.0 - s.eps_dot[2]);
    u.thrust = std::clamp(p.m * vertical / tilt, 0.0, thrust_limit(p));
    u.tau[0] = p.ixx * (g.kp_phi * (ref.phi - s.eta[0]) + g.kd_phi * (0.0 - s.eta_dot[0]));
    u.tau[1] = p.iyy * (g.kp_theta * (ref.theta - s.eta[1]) + g.kd_theta * (0.0 - s.eta_dot[1]));
    u.tau[2] = p.izz * (g.kp_psi * (ref.psi - s.eta[2]) + g.kd_psi * (0.0 - s.eta_dot[2]));
    return u;
}

/// Uniformly sampled closed-loop rollout. `stable == false` means the run was
/// truncated by the divergence guards; the samples up to the abort instant
/// remain valid.
struct Trajectory {
    std::vector<double> times;
    std::vector<DroneState> states;
    std::vector<ControlInput> inputs;
    double dt = 0.0;
    bool stable = true;

    std::size_t size() const { return times.size(); }
};

namespace detail {

inline bool state_admissible(const DroneState& s) {
    if (!s.all_finite() || s.max_abs() > kStateAbortMagnitude) {
        return false;
    }
    constexpr double half_pi = 1.57079632679489661923;
    if (std::abs(s.eta[0]) >= half_pi || std::abs(s.eta[1]) >= half_pi) {
        return false;
    }
    return std::abs(std::cos(s.eta[0]) * std::cos(s.eta[1])) >= kTiltCosineGuard;
}

} // namespace detail

/// Closed-loop simulation of pd_law against the rigid-body model with a
/// zero-order hold on the control input. Divergence is reported through the
/// stable flag rather than an exception, so hopeless gain candidates stay
/// comparable.
inline Trajectory simulate(const PdGains& gains, const Reference& ref,
                           const DroneState& init, const DroneParams& p, double dt,
                           double t_final) {
    if (!(dt > 0.0)) {
        throw std::invalid_argument("simulate: dt must be positive");
    }
    if (!(t_final >= dt)) {
        throw std::invalid_argument("simulate: t_final must be at least dt");
    }
    p.validate();

    const auto steps = static_cast<std::size_t>(std::llround(t_final / dt));
    Trajectory traj;
    traj.dt = dt;
    traj.times.reserve(steps + 1);
    traj.states.reserve(steps + 1);
    traj.inputs.reserve(steps + 1);

    DroneState state = init;
    for (std::size_t k = 0; k <= steps; ++k) {
        if (!detail::state_admissible(state)) {
            traj.stable = false;
            break;
        }
        const ControlInput u = pd_law(state, ref, gains, p);
        traj.times.push_back(static_cast<double>(k) * dt);
        traj.states.push_back(state);
        traj.inputs.push_back(u);
        if (k == steps) {
            break;
        }
        try {
            state = step(state, u, p, dt);
        } catch (const std::domain_error&) {
            traj.stable = false;
            break;
        }
    }
    return traj;
}

/// Writes the rollout as CSV: time, the 12 state components, thrust and the
/// three torques, full double precision.
inline void write_trajectory_csv(const Trajectory& traj, std::ostream& out) {
    out << "t,x,y,z,phi,theta,psi,xdot,ydot,zdot,phidot,thetadot,psidot,"
           "T,tau_phi,tau_theta,tau_psi\n";
    char buf[32];
    auto put = [&](double v, char sep) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        out << buf << sep;
    };
    for (std::size_t k = 0; k < traj.size(); ++k) {
        const DroneState& s = traj.states[k];
        const ControlInput& u = traj.inputs[k];
        put(traj.times[k], ',');
        put(s.eps[0], ',');
        put(s.eps[1], ',');
        put(s.eps[2], ',');
        put(s.eta[0], ',');
        put(s.eta[1], ',');
        put(s.eta[2], ',');
        put(s.eps_dot[0], ',');
        put(s.eps_dot[1], ',');
        put(s.eps_dot[2], ',');
        put(s.eta_dot[0], ',');
        put(s.eta_dot[1], ',');
        put(s.eta_dot[2], ',');
        put(u.thrust, ',');
        put(u.tau[0], ',');
        put(u.tau[1], ',');
        put(u.tau[2], '\n');
    }
}

} // namespace pdtune
