#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>

namespace pdtune {

/// Jacobian of the angular subsystem is singular where cos(theta) vanishes.
inline constexpr double kGimbalCosineGuard = 1e-9;

/// Closed-loop rollouts abort once any state component exceeds this magnitude.
inline constexpr double kStateAbortMagnitude = 1e6;

struct SingularAttitudeError : std::domain_error {
    using std::domain_error::domain_error;
};

struct NonFiniteStateError : std::domain_error {
    using std::domain_error::domain_error;
};

/// Rigid-body constants of the vehicle: mass, gravity, arm length, the
/// diagonal inertia tensor and linear drag coefficients.
struct DroneParams {
    double m = 0.468;      // kg
    double g = 9.81;       // m/s^2
    double l = 0.225;      // m
    double ixx = 4.856e-3; // kg m^2
    double iyy = 4.856e-3; // kg m^2
    double izz = 8.801e-3; // kg m^2
    double ax = 0.25;      // kg/s
    double ay = 0.25;      // kg/s
    double az = 0.25;      // kg/s

    Eigen::Matrix3d inertia() const {
        return Eigen::Vector3d(ixx, iyy, izz).asDiagonal();
    }

    void validate() const {
        auto positive = [](double v, const char* name) {
            if (!(v > 0.0) || !std::isfinite(v)) {
                throw std::invalid_argument(std::string("DroneParams: ") + name +
                                            " must be strictly positive");
            }
        };
        positive(m, "m");
        positive(g, "g");
        positive(l, "l");
        positive(ixx, "ixx");
        positive(iyy, "iyy");
        positive(izz, "izz");
        positive(ax, "ax");
        positive(ay, "ay");
        positive(az, "az");
    }
};

/// Full 12-dimensional rigid-body state. Linear quantities live in the
/// inertial frame; eta = [phi, theta, psi] are roll/pitch/yaw Euler angles.
struct DroneState {
    Eigen::Vector3d eps = Eigen::Vector3d::Zero();     // position [x, y, z]
    Eigen::Vector3d eps_dot = Eigen::Vector3d::Zero(); // linear velocity
    Eigen::Vector3d eta = Eigen::Vector3d::Zero();     // Euler angles
    Eigen::Vector3d eta_dot = Eigen::Vector3d::Zero(); // Euler-angle rates

    bool all_finite() const {
        return eps.allFinite() && eps_dot.allFinite() && eta.allFinite() &&
               eta_dot.allFinite();
    }

    double max_abs() const {
        return std::max(std::max(eps.cwiseAbs().maxCoeff(), eps_dot.cwiseAbs().maxCoeff()),
                        std::max(eta.cwiseAbs().maxCoeff(), eta_dot.cwiseAbs().maxCoeff()));
    }
};

/// Total thrust along body z plus body-frame torques [tau_phi, tau_theta, tau_psi].
struct ControlInput {
    double thrust = 0.0;
    Eigen::Vector3d tau = Eigen::Vector3d::Zero();
};

/// Body-to-inertial rotation, ZYX convention: Rz(psi) * Ry(theta) * Rx(phi).
inline Eigen::Matrix3d rotation_matrix(const Eigen::Vector3d& eta) {
    const double cp = std::cos(eta[0]), sp = std::sin(eta[0]);
    const double ct = std::cos(eta[1]), st = std::sin(eta[1]);
    const double cs = std::cos(eta[2]), ss = std::sin(eta[2]);
    Eigen::Matrix3d r;
    r << cs * ct, cs * st * sp - ss * cp, cs * st * cp + ss * sp,
         ss * ct, ss * st * sp + cs * cp, ss * st * cp - cs * sp,
         -st,     ct * sp,                ct * cp;
    return r;
}

/// Map from Euler-angle rates to body rates: nu = W * eta_dot.
inline Eigen::Matrix3d euler_rate_map(const Eigen::Vector3d& eta) {
    const double cp = std::cos(eta[0]), sp = std::sin(eta[0]);
    const double ct = std::cos(eta[1]), st = std::sin(eta[1]);
    Eigen::Matrix3d w;
    w << 1.0, 0.0, -st,
         0.0, cp,  ct * sp,
         0.0, -sp, ct * cp;
    return w;
}

/// Angular-subsystem Jacobian J(eta) = W^T I W. Symmetric positive definite
/// while |cos(theta)| > 0.
inline Eigen::Matrix3d angular_jacobian(const Eigen::Vector3d& eta, const DroneParams& p) {
    const Eigen::Matrix3d w = euler_rate_map(eta);
    return w.transpose() * p.inertia() * w;
}

/// Coriolis matrix of the angular subsystem in Christoffel form, so that
/// C(eta, eta_dot) * eta_dot == d/dt(J) * eta_dot - 1/2 * d/d_eta(eta_dot^T J eta_dot).
///
/// Expanded entries, with sp = sin(phi), cp = cos(phi), st = sin(theta),
/// ct = cos(theta), d = Iyy - Izz, s2p = sin(2 phi), c2p = cos(2 phi),
/// A = Ixx - Iyy sp^2 - Izz cp^2, B = Ixx + d c2p:
///   C11 = 0
///   C12 = -(ct/2) B psi' + (d/2) s2p theta'
///   C13 = -(ct/2) (B theta' + d s2p ct psi')
///   C21 = -C12
///   C22 = -(d/2) s2p phi'
///   C23 =  (ct/2) B phi' - A st ct psi'
///   C31 =  (ct/2) ((d c2p - Ixx) theta' + d s2p ct psi')
///   C32 =  (ct/2) (d c2p - Ixx) phi' - (d/2) s2p st theta' + A st ct psi'
///   C33 =  (d/2) s2p ct^2 phi' + A st ct theta'
inline Eigen::Matrix3d coriolis_matrix(const Eigen::Vector3d& eta,
                                       const Eigen::Vector3d& eta_dot,
                                       const DroneParams& p) {
    const double sp = std::sin(eta[0]), cp = std::cos(eta[0]);
    const double st = std::sin(eta[1]), ct = std::cos(eta[1]);
    const double dphi = eta_dot[0], dtheta = eta_dot[1], dpsi = eta_dot[2];

    const double d = p.iyy - p.izz;
    const double s2p = 2.0 * sp * cp;
    const double c2p = cp * cp - sp * sp;
    const double a = p.ixx - p.iyy * sp * sp - p.izz * cp * cp;
    const double b = p.ixx + d * c2p;

    Eigen::Matrix3d c;
    c(0, 0) = 0.0;
    c(0, 1) = -(ct / 2.0) * b * dpsi + (d / 2.0) * s2p * dtheta;
    c(0, 2) = -(ct / 2.0) * (b * dtheta + d * s2p * ct * dpsi);
    c(1, 0) = -c(0, 1);
    c(1, 1) = -(d / 2.0) * s2p * dphi;
    c(1, 2) = (ct / 2.0) * b * dphi - a * st * ct * dpsi;
    c(2, 0) = (ct / 2.0) * ((d * c2p - p.ixx) * dtheta + d * s2p * ct * dpsi);
    c(2, 1) = (ct / 2.0) * (d * c2p - p.ixx) * dphi - (d / 2.0) * s2p * st * dtheta +
              a * st * ct * dpsi;
    c(2, 2) = (d / 2.0) * s2p * ct * ct * dphi + a * st * ct * dtheta;
    return c;
}

/// Linear acceleration in the inertial frame: gravity plus rotated body
/// thrust minus linear drag acting on the inertial velocity.
inline Eigen::Vector3d linear_accel(const DroneState& s, const ControlInput& u,
                                    const DroneParams& p) {
    const Eigen::Vector3d gravity(0.0, 0.0, -p.g);
    const Eigen::Vector3d body_thrust(0.0, 0.0, u.thrust / p.m);
    const Eigen::Vector3d drag(p.ax * s.eps_dot[0] / p.m,
                               p.ay * s.eps_dot[1] / p.m,
                               p.az * s.eps_dot[2] / p.m);
    return gravity + rotation_matrix(s.eta) * body_thrust - drag;
}

/// Euler-angle acceleration: eta'' = J^-1 (tau - C(eta, eta') eta').
/// Throws SingularAttitudeError near the gimbal singularity.
inline Eigen::Vector3d angular_accel(const DroneState& s, const ControlInput& u,
                                     const DroneParams& p) {
    if (std::abs(std::cos(s.eta[1])) < kGimbalCosineGuard) {
        throw SingularAttitudeError("angular_accel: Jacobian singular, |cos(theta)| < 1e-9");
    }
    const Eigen::Matrix3d j = angular_jacobian(s.eta, p);
    const Eigen::Matrix3d c = coriolis_matrix(s.eta, s.eta_dot, p);
    return j.inverse() * (u.tau - c * s.eta_dot);
}

namespace detail {

struct StateDeriv {
    Eigen::Vector3d deps;
    Eigen::Vector3d ddeps;
    Eigen::Vector3d deta;
    Eigen::Vector3d ddeta;
};

inline StateDeriv state_deriv(const DroneState& s, const ControlInput& u,
                              const DroneParams& p) {
    return {s.eps_dot, linear_accel(s, u, p), s.eta_dot, angular_accel(s, u, p)};
}

inline DroneState advance(const DroneState& s, const StateDeriv& d, double h) {
    DroneState out;
    out.eps = s.eps + h * d.deps;
    out.eps_dot = s.eps_dot + h * d.ddeps;
    out.eta = s.eta + h * d.deta;
    out.eta_dot = s.eta_dot + h * d.ddeta;
    return out;
}

} // namespace detail

/// One classic fourth-order Runge-Kutta step with the control input held
/// constant over the interval. Pure function of its inputs.
inline DroneState step(const DroneState& s, const ControlInput& u, const DroneParams& p,
                       double dt) {
    if (!(dt > 0.0)) {
        throw std::invalid_argument("step: dt must be positive");
    }
    using detail::advance;
    using detail::state_deriv;

    const auto k1 = state_deriv(s, u, p);
    const auto k2 = state_deriv(advance(s, k1, 0.5 * dt), u, p);
    const auto k3 = state_deriv(advance(s, k2, 0.5 * dt), u, p);
    const auto k4 = state_deriv(advance(s, k3, dt), u, p);

    const double h = dt / 6.0;
    DroneState out;
    out.eps = s.eps + h * (k1.deps + 2.0 * k2.deps + 2.0 * k3.deps + k4.deps);
    out.eps_dot = s.eps_dot + h * (k1.ddeps + 2.0 * k2.ddeps + 2.0 * k3.ddeps + k4.ddeps);
    out.eta = s.eta + h * (k1.deta + 2.0 * k2.deta + 2.0 * k3.deta + k4.deta);
    out.eta_dot = s.eta_dot + h * (k1.ddeta + 2.0 * k2.ddeta + 2.0 * k3.ddeta + k4.ddeta);

    if (!out.all_finite()) {
        throw NonFiniteStateError("step: state left the finite range");
    }
    return out;
}

} // namespace pdtune
