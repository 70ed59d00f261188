#pragma once

#include <array>
#include <stdexcept>

#include "safer/linalg.hpp"

namespace safer {

struct BodyParams {
  double mass = 150.0;            // kg
  Vec3 inertia{20.0, 25.0, 15.0};  // kg m^2, principal moments
};

// Empty string when mass and inertia are positive and the moments satisfy
// the triangle inequalities.
std::string body_params_problem(const BodyParams& p);

// z-x-z convention: fixed_to_body = D3(psi) D1(theta) D3(phi).
struct EulerAngles {
  double phi = 0.0;
  double theta = 0.0;
  double psi = 0.0;
  friend bool operator==(const EulerAngles&, const EulerAngles&) = default;
};

// (phi_dot, theta_dot, psi_dot)
using AngleRates = Vec3;

struct KinematicState {
  Vec3 position;  // m, fixed frame
  Vec3 velocity;  // m/s, fixed frame
  EulerAngles angles;
  Vec3 omega;  // rad/s, body frame
  friend bool operator==(const KinematicState&, const KinematicState&) = default;
};

bool is_finite(const KinematicState& s);

// Flat form: x, y, z, vx, vy, vz, phi, theta, psi, omega1, omega2, omega3.
using PositionData = std::array<double, 12>;
PositionData to_position_data(const KinematicState& s);
KinematicState from_position_data(const PositionData& p);

Mat3 d1(double theta);
Mat3 d3(double psi);
Mat3 fixed_to_body(const EulerAngles& a);
Mat3 body_to_fixed(const EulerAngles& a);

// Angles reproducing fixed_to_body matrix `a`, chosen to lie closest to
// `hint` (each angle unwrapped to the nearest turn of the hint). Near
// theta = 0 or pi only phi + psi (resp. phi - psi) is defined; the hint's
// phi is kept.
EulerAngles angles_from_fixed_to_body(const Mat3& a, const EulerAngles& hint);

// Euler's equations: I omega_dot + omega x I omega = Q.
Vec3 euler_rotation_rhs(const Vec3& omega, const Vec3& torque, const Vec3& inertia);

Vec3 omega_from_angle_rates(const EulerAngles& a, const AngleRates& rates);

class GimbalLockError : public std::runtime_error {
 public:
  explicit GimbalLockError(double theta);
  double theta() const { return theta_; }

 private:
  double theta_;
};

// Throws GimbalLockError when |sin theta| < epsilon.
AngleRates angle_rates_from_omega(const EulerAngles& a, const Vec3& omega, double epsilon = 1e-6);

// m v_dot = body_to_fixed(a) F
Vec3 newton_rhs(const EulerAngles& a, const Vec3& force_body, double mass);

struct IntegratorOptions {
  double gimbal_epsilon = 1e-6;
  // Below this |sin theta| the attitude is advanced as a rotation matrix and
  // the angles re-extracted, instead of integrating the angle rates.
  double gimbal_band = 0.05;
  Vec3 gravity;  // extra fixed-frame acceleration, m/s^2
};

// Advances one control cycle of length `step` with `substeps` fourth-order
// substeps. Force and torque are body frame and held for the whole cycle.
// Each substep runs the stages in order: angular velocity, angles, velocity,
// position.
KinematicState integrate_cycle(const KinematicState& s, const Vec3& force_body,
                               const Vec3& torque_body, const BodyParams& params, double step,
                               int substeps, const IntegratorOptions& options = {});

}  // namespace safer
