#include "safer/dynamics.hpp"

#include <fmt/format.h>

#include <cmath>
#include <numbers>

namespace safer {

std::string body_params_problem(const BodyParams& p) {
  const Vec3& i = p.inertia;
  if (!(p.mass > 0.0) || !std::isfinite(p.mass)) return "mass must be positive";
  if (!(i.x > 0.0 && i.y > 0.0 && i.z > 0.0) || !is_finite(i)) return "inertia must be positive";
  if (i.x + i.y < i.z || i.y + i.z < i.x || i.z + i.x < i.y)
    return "inertia violates the triangle inequality";
  return {};
}

bool is_finite(const KinematicState& s) {
  return is_finite(s.position) && is_finite(s.velocity) && is_finite(s.omega) &&
         std::isfinite(s.angles.phi) && std::isfinite(s.angles.theta) &&
         std::isfinite(s.angles.psi);
}

PositionData to_position_data(const KinematicState& s) {
  return {s.position.x, s.position.y, s.position.z, s.velocity.x,     s.velocity.y,
          s.velocity.z, s.angles.phi, s.angles.theta, s.angles.psi, s.omega.x,
          s.omega.y,    s.omega.z};
}

KinematicState from_position_data(const PositionData& p) {
  return {{p[0], p[1], p[2]}, {p[3], p[4], p[5]}, {p[6], p[7], p[8]}, {p[9], p[10], p[11]}};
}

Mat3 d1(double theta) {
  const double c = std::cos(theta), s = std::sin(theta);
  return Mat3{{1, 0, 0, 0, c, s, 0, -s, c}};
}

Mat3 d3(double psi) {
  const double c = std::cos(psi), s = std::sin(psi);
  return Mat3{{c, s, 0, -s, c, 0, 0, 0, 1}};
}

Mat3 fixed_to_body(const EulerAngles& a) { return d3(a.psi) * d1(a.theta) * d3(a.phi); }

Mat3 body_to_fixed(const EulerAngles& a) { return fixed_to_body(a).transposed(); }

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double unwrap_near(double angle, double reference) {
  return angle + kTwoPi * std::round((reference - angle) / kTwoPi);
}

double distance2(const EulerAngles& a, const EulerAngles& b) {
  const double dp = a.phi - b.phi, dt = a.theta - b.theta, ds = a.psi - b.psi;
  return dp * dp + dt * dt + ds * ds;
}

EulerAngles unwrap_all(EulerAngles a, const EulerAngles& hint) {
  a.phi = unwrap_near(a.phi, hint.phi);
  a.theta = unwrap_near(a.theta, hint.theta);
  a.psi = unwrap_near(a.psi, hint.psi);
  return a;
}

}  // namespace

EulerAngles angles_from_fixed_to_body(const Mat3& a, const EulerAngles& hint) {
  const double s_theta = std::hypot(a(0, 2), a(1, 2));
  const double theta = std::atan2(s_theta, a(2, 2));
  constexpr double kDegenerate = 1e-10;

  if (s_theta < kDegenerate) {
    // Only a combination of phi and psi is observable.
    const double combined = std::atan2(a(0, 1), a(0, 0));
    EulerAngles out;
    out.phi = hint.phi;
    if (a(2, 2) > 0) {
      out.theta = 0.0;
      out.psi = combined - hint.phi;
    } else {
      out.theta = std::numbers::pi;
      out.psi = hint.phi - combined;
    }
    // theta may equally be read as its negative; pick the branch nearer the hint.
    EulerAngles flipped = out;
    flipped.theta = -out.theta;
    out = unwrap_all(out, hint);
    flipped = unwrap_all(flipped, hint);
    return distance2(flipped, hint) < distance2(out, hint) ? flipped : out;
  }

  EulerAngles first{std::atan2(a(2, 0), -a(2, 1)), theta, std::atan2(a(0, 2), a(1, 2))};
  EulerAngles second{first.phi + std::numbers::pi, -theta, first.psi + std::numbers::pi};
  first = unwrap_all(first, hint);
  second = unwrap_all(second, hint);
  return distance2(second, hint) < distance2(first, hint) ? second : first;
}

Vec3 euler_rotation_rhs(const Vec3& omega, const Vec3& torque, const Vec3& inertia) {
  const Vec3 gyro = cross(omega, hadamard(inertia, omega));
  const Vec3 rhs = torque - gyro;
  return {rhs.x / inertia.x, rhs.y / inertia.y, rhs.z / inertia.z};
}

Vec3 omega_from_angle_rates(const EulerAngles& a, const AngleRates& rates) {
  const double sp = std::sin(a.psi), cp = std::cos(a.psi);
  const double st = std::sin(a.theta), ct = std::cos(a.theta);
  const double phi_dot = rates.x, theta_dot = rates.y, psi_dot = rates.z;
  return {phi_dot * st * sp + theta_dot * cp, phi_dot * st * cp - theta_dot * sp,
          phi_dot * ct + psi_dot};
}

GimbalLockError::GimbalLockError(double theta)
    : std::runtime_error(fmt::format("gimbal lock: sin(theta) vanishes at theta = {}", theta)),
      theta_(theta) {}

AngleRates angle_rates_from_omega(const EulerAngles& a, const Vec3& omega, double epsilon) {
  const double st = std::sin(a.theta);
  if (std::abs(st) < epsilon) throw GimbalLockError(a.theta);
  const double sp = std::sin(a.psi), cp = std::cos(a.psi);
  const double phi_dot = (omega.x * sp + omega.y * cp) / st;
  const double theta_dot = omega.x * cp - omega.y * sp;
  const double psi_dot = omega.z - std::cos(a.theta) * phi_dot;
  return {phi_dot, theta_dot, psi_dot};
}

Vec3 newton_rhs(const EulerAngles& a, const Vec3& force_body, double mass) {
  return body_to_fixed(a) * force_body / mass;
}

namespace {

EulerAngles add(const EulerAngles& a, const AngleRates& r, double h) {
  return {a.phi + h * r.x, a.theta + h * r.y, a.psi + h * r.z};
}

struct AttitudeStep {
  EulerAngles end;
  Mat3 b_mid;  // body_to_fixed at the substep midpoint
  Mat3 b_end;
};

// Angle-rate integration, valid away from the singular set.
AttitudeStep attitude_by_rates(const EulerAngles& a0, const Vec3& w0, const Vec3& w_mid,
                               const Vec3& w1, double h, double eps) {
  const AngleRates k1 = angle_rates_from_omega(a0, w0, eps);
  const AngleRates k2 = angle_rates_from_omega(add(a0, k1, h / 2), w_mid, eps);
  const AngleRates k3 = angle_rates_from_omega(add(a0, k2, h / 2), w_mid, eps);
  const AngleRates k4 = angle_rates_from_omega(add(a0, k3, h), w1, eps);
  const EulerAngles a1{a0.phi + h / 6 * (k1.x + 2 * k2.x + 2 * k3.x + k4.x),
                       a0.theta + h / 6 * (k1.y + 2 * k2.y + 2 * k3.y + k4.y),
                       a0.psi + h / 6 * (k1.z + 2 * k2.z + 2 * k3.z + k4.z)};
  const AngleRates r1 = angle_rates_from_omega(a1, w1, eps);
  // Cubic Hermite midpoint.
  const EulerAngles mid{(a0.phi + a1.phi) / 2 + h / 8 * (k1.x - r1.x),
                        (a0.theta + a1.theta) / 2 + h / 8 * (k1.y - r1.y),
                        (a0.psi + a1.psi) / 2 + h / 8 * (k1.z - r1.z)};
  return {a1, body_to_fixed(mid), body_to_fixed(a1)};
}

// Rotation-matrix integration (fourth-order Magnus step for B' = B hat(omega))
// with the angles re-extracted afterwards.
AttitudeStep attitude_by_rotation(const EulerAngles& a0, const Vec3& w0, const Vec3& w_mid,
                                  const Vec3& w1, double h) {
  const Mat3 b0 = body_to_fixed(a0);
  const Vec3 full = h / 6 * (w0 + 4.0 * w_mid + w1) + h * h / 12 * cross(w0, w1);
  const Vec3 half = h / 24 * (5.0 * w0 + 8.0 * w_mid - w1) + h * h / 48 * cross(w0, w_mid);
  const Mat3 b1 = b0 * rotation_from_vector(full);
  const Mat3 b_mid = b0 * rotation_from_vector(half);
  return {angles_from_fixed_to_body(b1.transposed(), a0), b_mid, b1};
}

}  // namespace

KinematicState integrate_cycle(const KinematicState& s, const Vec3& force_body,
                               const Vec3& torque_body, const BodyParams& params, double step,
                               int substeps, const IntegratorOptions& options) {
  if (!(step > 0.0)) throw std::invalid_argument("step must be positive");
  if (substeps < 1) throw std::invalid_argument("substeps must be >= 1");

  const double h = step / substeps;
  const Vec3& inertia = params.inertia;
  const Vec3 specific_force = force_body / params.mass;
  KinematicState cur = s;

  for (int n = 0; n < substeps; ++n) {
    // (1) angular velocity
    const Vec3 w0 = cur.omega;
    const Vec3 k1 = euler_rotation_rhs(w0, torque_body, inertia);
    const Vec3 k2 = euler_rotation_rhs(w0 + h / 2 * k1, torque_body, inertia);
    const Vec3 k3 = euler_rotation_rhs(w0 + h / 2 * k2, torque_body, inertia);
    const Vec3 k4 = euler_rotation_rhs(w0 + h * k3, torque_body, inertia);
    const Vec3 w1 = w0 + h / 6 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    const Vec3 w1_dot = euler_rotation_rhs(w1, torque_body, inertia);
    const Vec3 w_mid = 0.5 * (w0 + w1) + h / 8 * (k1 - w1_dot);

    // (2) Euler angles
    const EulerAngles a0 = cur.angles;
    const Mat3 b0 = body_to_fixed(a0);
    AttitudeStep att;
    if (std::abs(std::sin(a0.theta)) < options.gimbal_band) {
      att = attitude_by_rotation(a0, w0, w_mid, w1, h);
    } else {
      try {
        att = attitude_by_rates(a0, w0, w_mid, w1, h, options.gimbal_epsilon);
      } catch (const GimbalLockError&) {
        att = attitude_by_rotation(a0, w0, w_mid, w1, h);
      }
    }

    // (3) velocity
    const Vec3 acc0 = b0 * specific_force + options.gravity;
    const Vec3 acc_mid = att.b_mid * specific_force + options.gravity;
    const Vec3 acc1 = att.b_end * specific_force + options.gravity;
    const Vec3 v0 = cur.velocity;
    const Vec3 v1 = v0 + h / 6 * (acc0 + 4.0 * acc_mid + acc1);

    // (4) position
    const Vec3 v_mid = 0.5 * (v0 + v1) + h / 8 * (acc0 - acc1);
    cur.position += h / 6 * (v0 + 4.0 * v_mid + v1);
    cur.velocity = v1;
    cur.angles = att.end;
    cur.omega = w1;
  }
  return cur;
}

}  // namespace safer
