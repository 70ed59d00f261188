#include "safer/linalg.hpp"

namespace safer {

Mat3 rotation_from_vector(const Vec3& w) {
  const double angle = norm(w);
  // Series forms keep full precision for tiny angles.
  double a, b;
  if (angle < 1e-4) {
    const double a2 = angle * angle;
    a = 1.0 - a2 / 6.0 + a2 * a2 / 120.0;
    b = 0.5 - a2 / 24.0 + a2 * a2 / 720.0;
  } else {
    a = std::sin(angle) / angle;
    b = (1.0 - std::cos(angle)) / (angle * angle);
  }
  const Mat3 k{{0, -w.z, w.y, w.z, 0, -w.x, -w.y, w.x, 0}};
  const Mat3 k2 = k * k;
  Mat3 r = Mat3::identity();
  for (int i = 0; i < 9; ++i) r.m[i] += a * k.m[i] + b * k2.m[i];
  return r;
}

}  // namespace safer
