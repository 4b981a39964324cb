#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "stabidx/box.hpp"
#include "stabidx/curve.hpp"
#include "stabidx/stability.hpp"

namespace stabidx {

enum class NaiveDirection { kForward, kReverse };

/// The single-anchor projected IoU that SI replaces: forward projects the
/// first prediction onto the second ground truth and compares there; reverse
/// does the opposite. The two directions disagree in general.
double naive_metric(const Box3D& b1, const Box3D& b2, const Box3D& g1, const Box3D& g2,
                    NaiveDirection direction);

/// IoU between {0, 0, 0, 2, 1, 1, 0} and {dx, 0.05, 0, 3, 1, 1, t} for t over
/// [theta_lo, theta_hi]; off-center curves for dx > 0 demonstrate the naive
/// metric's non-unimodality.
CurveTable offcenter_iou_curve(double dx, double theta_lo, double theta_hi, int steps);

/// IoU of two same-center same-size boxes with footprint ratio `lwr`, one
/// rotated by t over the grid. Monotone on [0, pi/4), non-monotone beyond.
CurveTable heading_iou_curve(double lwr, double theta_lo, double theta_hi, int steps);

struct PropertyCheck {
  std::string name;
  bool passed = false;
  long long checked = 0;
  std::string detail;  // counterexample dump when failed
};

struct PropertySuiteOptions {
  std::uint64_t seed = 7;
  long long trials = 1000;
  int oracle_pairs = 200;
  std::int64_t oracle_samples = 200000;
  int threads = 1;
  /// Test hook: the heading gate under check. Anything other than the real
  /// pi/4 cutoff is expected to break the unimodality suite.
  double heading_cutoff = kHeadingCutoff;
};

/// Numerical verification suites: closed-form and oracle equivalence of the
/// IoU engines, SI symmetry, marginal unimodality, peak characterization,
/// confidence scale invariance, and the two naive-metric counterexamples.
/// Failures are results, not errors.
std::vector<PropertyCheck> run_property_suite(const PropertySuiteOptions& options = {});

bool all_passed(const std::vector<PropertyCheck>& checks);

/// One line per check: "[PASS] name (checked=N)" plus detail on failure.
std::string format_property_summary(const std::vector<PropertyCheck>& checks);

}  // namespace stabidx
