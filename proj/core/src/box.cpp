#include "stabidx/box.hpp"

#include <stdexcept>
#include <string>

namespace stabidx {

double wrap_angle(double a) {
  a = std::fmod(a, 2.0 * kPi);
  if (a <= -kPi) {
    a += 2.0 * kPi;
  } else if (a > kPi) {
    a -= 2.0 * kPi;
  }
  return a;
}

bool is_finite(const Box3D& b) {
  return std::isfinite(b.x) && std::isfinite(b.y) && std::isfinite(b.z) &&
         std::isfinite(b.l) && std::isfinite(b.w) && std::isfinite(b.h) &&
         std::isfinite(b.yaw);
}

bool has_positive_extents(const Box3D& b) {
  return b.l > 0.0 && b.w > 0.0 && b.h > 0.0;
}

void validate_box(const Box3D& b, const char* what, bool require_positive_extents) {
  if (!is_finite(b)) {
    throw std::invalid_argument(std::string(what) + ": box has non-finite fields");
  }
  if (require_positive_extents && !has_positive_extents(b)) {
    throw std::invalid_argument(std::string(what) + ": box extents must be positive");
  }
}

}  // namespace stabidx
