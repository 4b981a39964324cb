#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <chrono>
#include <fstream>

#include "stabidx/geometry.hpp"
#include "stabidx/rng.hpp"
#include "test_support.hpp"

using namespace stabidx;
using test_support::near_box;
using test_support::random_box;

TEST_CASE("wrap_angle maps into (-pi, pi]") {
  CHECK(wrap_angle(0.0) == 0.0);
  CHECK(wrap_angle(kPi) == doctest::Approx(kPi));
  CHECK(wrap_angle(-kPi) == doctest::Approx(kPi));
  CHECK(wrap_angle(3.0 * kPi / 2.0) == doctest::Approx(-kPi / 2.0));
  CHECK(wrap_angle(5.0 * kPi) == doctest::Approx(kPi));
  CHECK(wrap_angle(-0.25) == doctest::Approx(-0.25));
}

TEST_CASE("transform_box maps the anchor onto the target exactly") {
  const Box3D b{1.0, -2.0, 0.5, 3.0, 1.5, 1.2, 0.7};
  const Box3D target{-4.0, 9.0, 1.0, 2.0, 2.0, 2.0, -1.1};
  CHECK(transform_box(b, b, target) == target);
}

TEST_CASE("transform_box rotates the offset with the anchor yaw change") {
  // One meter ahead of the source anchor stays one meter ahead of the target.
  const Box3D from{0, 0, 0, 2, 1, 1, 0};
  const Box3D to{5, 0, 0, 2, 1, 1, kPi / 2};
  const Box3D b{1, 0, 0, 2, 1, 1, 0};
  const Box3D out = transform_box(b, from, to);
  CHECK(out.x == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(out.y == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(out.z == doctest::Approx(0.0));
  CHECK(out.l == doctest::Approx(2.0));
  CHECK(out.w == doctest::Approx(1.0));
  CHECK(out.h == doctest::Approx(1.0));
  CHECK(out.yaw == doctest::Approx(kPi / 2));
}

TEST_CASE("transform_box into a zero-yaw anchor expresses the offset in its frame") {
  const Box3D from{0, 0, 0, 2, 1, 1, kPi / 2};
  const Box3D to{0, 0, 0, 2, 1, 1, 0};
  const Box3D b{0, 1, 0, 2, 1, 1, kPi / 2};
  const Box3D out = transform_box(b, from, to);
  CHECK(out.x == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(out.y) < 1e-12);
  CHECK(std::abs(out.z) < 1e-12);
  CHECK(out.yaw == doctest::Approx(0.0));
}

TEST_CASE("transform_box scales extents by the anchor ratio") {
  const Box3D from{0, 0, 0, 1, 1, 1, 0};
  const Box3D to{0, 0, 0, 2, 2, 2, 0};
  const Box3D b{0, 0, 0, 1, 1, 1, 0};
  CHECK(transform_box(b, from, to) == to);

  const Box3D gt{0, 0, 0, 2, 2, 2, 0};
  const Box3D pivot{0, 0, 0, 4, 4, 4, 0};
  const Box3D pred{0, 0, 0, 3, 2, 2, 0};
  const Box3D out = transform_box(pred, gt, pivot);
  CHECK(out.l == doctest::Approx(6.0));
  CHECK(out.w == doctest::Approx(4.0));
  CHECK(out.h == doctest::Approx(4.0));
}

TEST_CASE("transform_box round trips and fixes the identity anchor") {
  Rng rng(11);
  for (int i = 0; i < 500; ++i) {
    const Box3D a = random_box(rng);
    const Box3D b = random_box(rng);
    const Box3D x = random_box(rng);
    const Box3D there = transform_box(x, a, b);
    const Box3D back = transform_box(there, b, a);
    CHECK(std::abs(back.x - x.x) < 1e-9);
    CHECK(std::abs(back.y - x.y) < 1e-9);
    CHECK(std::abs(back.z - x.z) < 1e-9);
    CHECK(std::abs(back.l - x.l) < 1e-9);
    CHECK(std::abs(back.w - x.w) < 1e-9);
    CHECK(std::abs(back.h - x.h) < 1e-9);
    CHECK(std::abs(back.yaw - x.yaw) < 1e-9);
    CHECK(transform_box(x, a, a) == x);
  }
}

TEST_CASE("transform_box rejects bad anchors") {
  const Box3D good{0, 0, 0, 1, 1, 1, 0};
  Box3D flat = good;
  flat.w = 0.0;
  CHECK_THROWS_AS(transform_box(good, flat, good), std::invalid_argument);
  CHECK_THROWS_AS(transform_box(good, good, flat), std::invalid_argument);
  Box3D nan_box = good;
  nan_box.x = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(transform_box(nan_box, good, good), std::invalid_argument);
}

TEST_CASE("iou_aligned_same_size closed form") {
  CHECK(iou_aligned_same_size({0, 0, 0}, {3, 2, 1}) == 1.0);
  CHECK(iou_aligned_same_size({1, 0, 0}, {2, 1, 1}) == doctest::Approx(1.0 / 3.0));
  CHECK(iou_aligned_same_size({2, 0, 0}, {2, 1, 1}) == 0.0);
  CHECK(iou_aligned_same_size({0, 0, 5}, {2, 1, 1}) == 0.0);
  CHECK_THROWS_AS(iou_aligned_same_size({0, 0, 0}, {0, 1, 1}), std::invalid_argument);
}

TEST_CASE("iou_centered_axis_aligned closed form") {
  CHECK(iou_centered_axis_aligned({2, 1, 1}, {2, 1, 1}) == 1.0);
  CHECK(iou_centered_axis_aligned({2, 1, 1}, {4, 1, 1}) == doctest::Approx(0.5));
  CHECK(iou_centered_axis_aligned({1, 1, 1}, {2, 2, 2}) == doctest::Approx(1.0 / 8.0));
  CHECK_THROWS_AS(iou_centered_axis_aligned({1, 1, 1}, {1, -1, 1}), std::invalid_argument);
}

TEST_CASE("iou_rotated handles the canonical cases") {
  const Box3D cube{0, 0, 0, 1, 1, 1, 0};
  CHECK(iou_rotated(cube, cube) == 1.0);

  Box3D rotated = cube;
  rotated.yaw = kPi / 4;
  // Octagonal overlap of a unit square with its 45-degree rotation.
  CHECK(iou_rotated(cube, rotated) == doctest::Approx(std::sqrt(2.0) / 2.0).epsilon(1e-9));

  Box3D rect{2, -1, 0.5, 4, 2, 1, 0.3};
  Box3D flipped = rect;
  flipped.yaw = rect.yaw + kPi;
  CHECK(iou_rotated(rect, flipped) == doctest::Approx(1.0).epsilon(1e-12));

  Box3D apart = cube;
  apart.x = 5.0;
  CHECK(iou_rotated(cube, apart) == 0.0);

  // Boxes meeting exactly edge-on share no volume.
  Box3D touching = cube;
  touching.x = 1.0;
  CHECK(iou_rotated(cube, touching) == 0.0);
}

TEST_CASE("iou_rotated agrees with the closed forms") {
  Rng rng(21);
  for (int i = 0; i < 2000; ++i) {
    Box3D a = random_box(rng);
    a.yaw = 0.0;
    Box3D b = a;
    b.x += rng.uniform(-1.5, 1.5) * a.l;
    b.y += rng.uniform(-1.5, 1.5) * a.w;
    b.z += rng.uniform(-1.5, 1.5) * a.h;
    const double closed = iou_aligned_same_size({b.x - a.x, b.y - a.y, b.z - a.z}, a.extents());
    CHECK(std::abs(iou_rotated(a, b) - closed) < 1e-9);

    Box3D c = random_box(rng);
    c.x = c.y = c.z = 0.0;
    c.yaw = 0.0;
    Box3D d = random_box(rng);
    d.x = d.y = d.z = 0.0;
    d.yaw = 0.0;
    const double closed2 = iou_centered_axis_aligned(c.extents(), d.extents());
    CHECK(std::abs(iou_rotated(c, d) - closed2) < 1e-9);
  }
}

TEST_CASE("iou_rotated is symmetric and bounded") {
  Rng rng(31);
  for (int i = 0; i < 2000; ++i) {
    const Box3D a = random_box(rng);
    const Box3D b = i % 2 ? near_box(a, rng) : random_box(rng);
    const double ab = iou_rotated(a, b);
    const double ba = iou_rotated(b, a);
    CHECK(std::abs(ab - ba) < 1e-12);
    CHECK(ab >= 0.0);
    CHECK(ab <= 1.0);
  }
}

TEST_CASE("iou_oracle matches known values and is deterministic") {
  const Box3D cube{0, 0, 0, 1, 1, 1, 0};
  CHECK(iou_oracle(cube, cube, 1000000) == doctest::Approx(1.0).epsilon(0.01));

  Box3D rotated = cube;
  rotated.yaw = kPi / 4;
  CHECK(iou_oracle(cube, rotated, 1000000) ==
        doctest::Approx(std::sqrt(2.0) / 2.0).epsilon(0.015));

  Box3D apart = cube;
  apart.x = 10.0;
  CHECK(iou_oracle(cube, apart, 10000) == 0.0);

  CHECK(iou_oracle(cube, rotated, 5000, 42) == iou_oracle(cube, rotated, 5000, 42));
  CHECK_THROWS_AS(iou_oracle(cube, cube, 0), std::invalid_argument);
}

TEST_CASE("iou_rotated tracks the sampling oracle on random pairs") {
  Rng rng(41);
  for (int i = 0; i < 40; ++i) {
    const Box3D a = random_box(rng);
    const Box3D b = near_box(a, rng);
    const double engine = iou_rotated(a, b);
    const double sampled = iou_oracle(a, b, 200000, derive_seed(41, i));
    CHECK(std::abs(engine - sampled) < 0.02);
  }
}
