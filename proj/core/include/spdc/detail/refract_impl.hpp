#pragma once

#include <cmath>

namespace spdc {

template <class IndexOf>
Vec3 refract_into(double sx, double sy, IndexOf&& index_of, double* index_out) {
  // Fixed point on n(u): the index depends on direction only through the
  // small tilt, so a handful of passes reaches rounding level.
  double n = index_of(Vec3{0.0, 0.0, 1.0});
  Vec3 u{0.0, 0.0, 1.0};
  for (int iter = 0; iter < 50; ++iter) {
    u.x = sx / n;
    u.y = sy / n;
    u.z = std::sqrt(1.0 - u.x * u.x - u.y * u.y);
    const double next = index_of(u);
    const bool done = std::abs(next - n) <= 1e-15 * n;
    n = next;
    if (done) break;
  }
  u.x = sx / n;
  u.y = sy / n;
  u.z = std::sqrt(1.0 - u.x * u.x - u.y * u.y);
  if (index_out) *index_out = n;
  return u;
}

}  // namespace spdc
