#include "stabidx/geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "stabidx/rng.hpp"

namespace stabidx {
namespace {

struct Pt {
  double x = 0.0;
  double y = 0.0;
};

// BEV corners in counter-clockwise order.
std::array<Pt, 4> bev_corners(const Box3D& b) {
  const double c = std::cos(b.yaw);
  const double s = std::sin(b.yaw);
  const double hl = 0.5 * b.l;
  const double hw = 0.5 * b.w;
  const double lx[4] = {hl, -hl, -hl, hl};
  const double ly[4] = {hw, hw, -hw, -hw};
  std::array<Pt, 4> out;
  for (int i = 0; i < 4; ++i) {
    out[i] = {b.x + c * lx[i] - s * ly[i], b.y + s * lx[i] + c * ly[i]};
  }
  return out;
}

double cross(const Pt& o, const Pt& a, const Pt& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

// Sutherland-Hodgman: clips a convex subject polygon against the half-plane
// left of edge a->b. Points exactly on the edge count as inside.
template <typename Vec>
Vec clip_against_edge(const Vec& subject, const Pt& a, const Pt& b) {
  Vec out;
  const std::size_t n = subject.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Pt& cur = subject[i];
    const Pt& nxt = subject[(i + 1) % n];
    const double dc = cross(a, b, cur);
    const double dn = cross(a, b, nxt);
    if (dc >= 0.0) out.push_back(cur);
    if ((dc > 0.0 && dn < 0.0) || (dc < 0.0 && dn > 0.0)) {
      const double t = dc / (dc - dn);
      out.push_back({cur.x + t * (nxt.x - cur.x), cur.y + t * (nxt.y - cur.y)});
    }
  }
  return out;
}

double polygon_area(const auto& pts) {
  const std::size_t n = pts.size();
  if (n < 3) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Pt& a = pts[i];
    const Pt& b = pts[(i + 1) % n];
    acc += a.x * b.y - b.x * a.y;
  }
  return 0.5 * std::abs(acc);
}

// A convex quad clipped by four half-planes holds at most 8 vertices.
struct SmallPoly {
  std::array<Pt, 16> pts;
  std::size_t count = 0;

  std::size_t size() const { return count; }
  const Pt& operator[](std::size_t i) const { return pts[i]; }
  void push_back(const Pt& p) { pts[count++] = p; }
};

double bev_intersection_area(const Box3D& b1, const Box3D& b2) {
  const auto r1 = bev_corners(b1);
  const auto r2 = bev_corners(b2);
  SmallPoly poly;
  for (const Pt& p : r1) poly.push_back(p);
  for (int e = 0; e < 4; ++e) {
    poly = clip_against_edge(poly, r2[e], r2[(e + 1) % 4]);
    if (poly.size() < 3) return 0.0;
  }
  return polygon_area(poly);
}

bool point_in_box(double px, double py, double pz, const Box3D& b, double c, double s) {
  const double dx = px - b.x;
  const double dy = py - b.y;
  const double lx = c * dx + s * dy;
  const double ly = -s * dx + c * dy;
  return std::abs(lx) <= 0.5 * b.l && std::abs(ly) <= 0.5 * b.w && std::abs(pz - b.z) <= 0.5 * b.h;
}

struct Aabb {
  double lo[3];
  double hi[3];
};

Aabb box_aabb(const Box3D& b) {
  const double c = std::abs(std::cos(b.yaw));
  const double s = std::abs(std::sin(b.yaw));
  const double hx = 0.5 * (c * b.l + s * b.w);
  const double hy = 0.5 * (s * b.l + c * b.w);
  const double hz = 0.5 * b.h;
  return {{b.x - hx, b.y - hy, b.z - hz}, {b.x + hx, b.y + hy, b.z + hz}};
}

}  // namespace

Box3D transform_box(const Box3D& b, const Box3D& from, const Box3D& to) {
  validate_box(b, "b", false);
  validate_box(from, "from");
  validate_box(to, "to");
  if (b == from) return to;
  if (from == to) return b;

  const double d = to.yaw - from.yaw;
  const double c = std::cos(d);
  const double s = std::sin(d);
  const double dx = b.x - from.x;
  const double dy = b.y - from.y;

  Box3D out;
  out.x = to.x + c * dx - s * dy;
  out.y = to.y + s * dx + c * dy;
  out.z = to.z + (b.z - from.z);
  out.l = b.l / from.l * to.l;
  out.w = b.w / from.w * to.w;
  out.h = b.h / from.h * to.h;
  out.yaw = b.yaw + d;
  return out;
}

double iou_aligned_same_size(const Vec3& offset, const Vec3& extents) {
  if (!(extents.x > 0.0 && extents.y > 0.0 && extents.z > 0.0)) {
    throw std::invalid_argument("iou_aligned_same_size: extents must be positive");
  }
  const double ax = std::abs(offset.x);
  const double ay = std::abs(offset.y);
  const double az = std::abs(offset.z);
  if (ax >= extents.x || ay >= extents.y || az >= extents.z) return 0.0;
  const double v_int = (extents.x - ax) * (extents.y - ay) * (extents.z - az);
  const double v = extents.x * extents.y * extents.z;
  return v_int / (2.0 * v - v_int);
}

double iou_centered_axis_aligned(const Vec3& e1, const Vec3& e2) {
  if (!(e1.x > 0.0 && e1.y > 0.0 && e1.z > 0.0 && e2.x > 0.0 && e2.y > 0.0 && e2.z > 0.0)) {
    throw std::invalid_argument("iou_centered_axis_aligned: extents must be positive");
  }
  const double v_int = std::min(e1.x, e2.x) * std::min(e1.y, e2.y) * std::min(e1.z, e2.z);
  const double v1 = e1.x * e1.y * e1.z;
  const double v2 = e2.x * e2.y * e2.z;
  return v_int / (v1 + v2 - v_int);
}

double iou_rotated(const Box3D& b1, const Box3D& b2) {
  validate_box(b1, "b1");
  validate_box(b2, "b2");
  if (b1 == b2) return 1.0;

  const double z_lo = std::max(b1.z - 0.5 * b1.h, b2.z - 0.5 * b2.h);
  const double z_hi = std::min(b1.z + 0.5 * b1.h, b2.z + 0.5 * b2.h);
  const double dz = z_hi - z_lo;
  if (dz <= 0.0) return 0.0;

  const double area = bev_intersection_area(b1, b2);
  if (area < kMinPatchArea) return 0.0;

  const double inter = area * dz;
  const double uni = b1.volume() + b2.volume() - inter;
  if (uni <= 0.0) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

double iou_oracle(const Box3D& b1, const Box3D& b2, std::int64_t samples, std::uint64_t seed) {
  validate_box(b1, "b1");
  validate_box(b2, "b2");
  if (samples < 1) throw std::invalid_argument("iou_oracle: samples must be >= 1");

  const Aabb a1 = box_aabb(b1);
  const Aabb a2 = box_aabb(b2);
  double lo[3], hi[3];
  for (int i = 0; i < 3; ++i) {
    lo[i] = std::min(a1.lo[i], a2.lo[i]);
    hi[i] = std::max(a1.hi[i], a2.hi[i]);
  }

  const double c1 = std::cos(b1.yaw), s1 = std::sin(b1.yaw);
  const double c2 = std::cos(b2.yaw), s2 = std::sin(b2.yaw);

  Rng rng(seed);
  std::int64_t n1 = 0, n2 = 0, n12 = 0;
  for (std::int64_t i = 0; i < samples; ++i) {
    const double px = rng.uniform(lo[0], hi[0]);
    const double py = rng.uniform(lo[1], hi[1]);
    const double pz = rng.uniform(lo[2], hi[2]);
    const bool in1 = point_in_box(px, py, pz, b1, c1, s1);
    const bool in2 = point_in_box(px, py, pz, b2, c2, s2);
    n1 += in1;
    n2 += in2;
    n12 += in1 && in2;
  }
  const std::int64_t denom = n1 + n2 - n12;
  if (denom <= 0) return 0.0;
  return static_cast<double>(n12) / static_cast<double>(denom);
}

}  // namespace stabidx
