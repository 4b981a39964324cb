#pragma once

#include <cmath>

namespace stabidx {

inline constexpr double kPi = 3.141592653589793238462643383279502884;

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  bool operator==(const Vec3&) const = default;
};

/// Oriented 3D box: center (x, y, z) in meters, full extents (l, w, h) along
/// the box's local axes, yaw about the vertical axis in radians. Yaw is stored
/// unnormalized; comparisons wrap differences to (-pi, pi].
struct Box3D {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double l = 0.0;
  double w = 0.0;
  double h = 0.0;
  double yaw = 0.0;

  Vec3 center() const { return {x, y, z}; }
  Vec3 extents() const { return {l, w, h}; }
  double volume() const { return l * w * h; }

  bool operator==(const Box3D&) const = default;
};

/// Wraps an angle to (-pi, pi].
double wrap_angle(double a);

bool is_finite(const Box3D& b);
bool has_positive_extents(const Box3D& b);

/// Throws std::invalid_argument when `b` is non-finite or, if
/// `require_positive_extents`, when any extent is not strictly positive.
/// `what` names the offending argument in the error message.
void validate_box(const Box3D& b, const char* what, bool require_positive_extents = true);

}  // namespace stabidx
