#include "stabidx/property_lab.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "stabidx/geometry.hpp"
#include "stabidx/parallel.hpp"
#include "stabidx/rng.hpp"

namespace stabidx {
namespace {

std::string describe_box(const Box3D& b) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), "{%.6g, %.6g, %.6g, %.6g, %.6g, %.6g, %.6g}", b.x, b.y, b.z,
                b.l, b.w, b.h, b.yaw);
  return buf;
}

Box3D random_gt(Rng& rng) {
  Box3D b;
  b.x = rng.uniform(-40.0, 40.0);
  b.y = rng.uniform(-40.0, 40.0);
  b.z = rng.uniform(-2.0, 2.0);
  b.l = rng.uniform(0.5, 20.0);
  b.w = rng.uniform(0.5, 20.0);
  b.h = rng.uniform(0.5, 4.0);
  b.yaw = rng.uniform(-kPi, kPi);
  return b;
}

// Bounded perturbation regime: centers within +-1 m, extents scaled into
// [0.5, 2], yaw within +-pi/3.
Box3D perturb_box(const Box3D& base, Rng& rng) {
  Box3D b = base;
  b.x += rng.uniform(-1.0, 1.0);
  b.y += rng.uniform(-1.0, 1.0);
  b.z += rng.uniform(-1.0, 1.0);
  b.l *= rng.uniform(0.5, 2.0);
  b.w *= rng.uniform(0.5, 2.0);
  b.h *= rng.uniform(0.5, 2.0);
  b.yaw += rng.uniform(-kPi / 3.0, kPi / 3.0);
  return b;
}

// A second observation of the same object: nearby pose, per-frame extent
// labels up to 10% apart. The extent ratio matters: with identical extents
// the anchor transform is rigid and the naive metric happens to be symmetric.
Box3D moved_gt(const Box3D& gt1, Rng& rng) {
  Box3D b = gt1;
  b.x += rng.uniform(-5.0, 5.0);
  b.y += rng.uniform(-5.0, 5.0);
  b.z += rng.uniform(-0.2, 0.2);
  b.l *= rng.uniform(0.9, 1.1);
  b.w *= rng.uniform(0.9, 1.1);
  b.h *= rng.uniform(0.9, 1.1);
  b.yaw += rng.uniform(-0.3, 0.3);
  return b;
}

double max_score_deviation(const StabilityScore& a, const StabilityScore& b) {
  double dev = std::abs(a.si - b.si);
  dev = std::max(dev, std::abs(a.si_c - b.si_c));
  dev = std::max(dev, std::abs(a.si_l - b.si_l));
  dev = std::max(dev, std::abs(a.si_e - b.si_e));
  dev = std::max(dev, std::abs(a.si_h - b.si_h));
  return dev;
}

enum class Element { kX, kY, kZ, kL, kW, kH, kYaw, kScore };

constexpr Element kAllElements[] = {Element::kX, Element::kY, Element::kZ, Element::kL,
                                    Element::kW, Element::kH, Element::kYaw, Element::kScore};

const char* element_name(Element e) {
  switch (e) {
    case Element::kX: return "x";
    case Element::kY: return "y";
    case Element::kZ: return "z";
    case Element::kL: return "l";
    case Element::kW: return "w";
    case Element::kH: return "h";
    case Element::kYaw: return "yaw";
    case Element::kScore: return "score";
  }
  return "?";
}

struct SweepBase {
  Box3D gt1;
  Box3D gt2;
  double score = 0.6;
};

constexpr CalibrationRange kSweepCal{0.9, 0.1};

double sweep_span(const SweepBase& base, Element element, double yaw_span) {
  const Box3D pivot = pivot_box(base.gt1, base.gt2);
  switch (element) {
    case Element::kX: return 1.2 * pivot.l;
    case Element::kY: return 1.2 * pivot.w;
    case Element::kZ: return 1.2 * pivot.h;
    case Element::kL: return 0.6 * base.gt2.l;
    case Element::kW: return 0.6 * base.gt2.w;
    case Element::kH: return 0.6 * base.gt2.h;
    case Element::kYaw: return yaw_span;
    case Element::kScore: return 1.0;
  }
  return 1.0;
}

// SI with the first observation perfect and one element of the second
// prediction displaced by `delta` from its ground-truth value.
StabilityScore sweep_point(const SweepBase& base, Element element, double delta, double cutoff) {
  MatchedObservation obs1{base.gt1, ScoredBox{base.gt1, base.score}};
  Box3D pred2 = base.gt2;
  double score2 = base.score;
  switch (element) {
    case Element::kX: pred2.x += delta; break;
    case Element::kY: pred2.y += delta; break;
    case Element::kZ: pred2.z += delta; break;
    case Element::kL: pred2.l += delta; break;
    case Element::kW: pred2.w += delta; break;
    case Element::kH: pred2.h += delta; break;
    case Element::kYaw: pred2.yaw += delta; break;
    case Element::kScore: score2 += delta; break;
  }
  MatchedObservation obs2{base.gt2, ScoredBox{pred2, score2}};
  return stability_index(obs1, obs2, kSweepCal, cutoff);
}

std::vector<SweepBase> sweep_bases(Rng& rng, int count) {
  std::vector<SweepBase> bases;
  // Canonical square footprint first: the regime where a broken heading gate
  // is guaranteed to show.
  bases.push_back({Box3D{10.0, 5.0, 1.0, 2.0, 2.0, 1.5, 0.3},
                   Box3D{11.0, 5.5, 1.0, 2.0, 2.0, 1.5, 0.35}, 0.6});
  for (int i = 1; i < count; ++i) {
    SweepBase base;
    base.gt1 = random_gt(rng);
    base.gt2 = moved_gt(base.gt1, rng);
    base.score = rng.uniform(0.2, 0.9);
    bases.push_back(base);
  }
  return bases;
}

}  // namespace

double naive_metric(const Box3D& b1, const Box3D& b2, const Box3D& g1, const Box3D& g2,
                    NaiveDirection direction) {
  if (direction == NaiveDirection::kForward) {
    return iou_rotated(transform_box(b1, g1, g2), b2);
  }
  return iou_rotated(b1, transform_box(b2, g2, g1));
}

CurveTable offcenter_iou_curve(double dx, double theta_lo, double theta_hi, int steps) {
  if (steps < 2) throw std::invalid_argument("offcenter_iou_curve: need at least 2 steps");
  const Box3D fixed{0.0, 0.0, 0.0, 2.0, 1.0, 1.0, 0.0};
  CurveTable curve;
  char name[64];
  std::snprintf(name, sizeof(name), "iou_vs_dtheta_dx_%.2f", dx);
  curve.metric_name = name;
  for (int i = 0; i < steps; ++i) {
    const double t =
        theta_lo + (theta_hi - theta_lo) * i / static_cast<double>(steps - 1);
    const Box3D moving{dx, 0.05, 0.0, 3.0, 1.0, 1.0, t};
    curve.rows.emplace_back(t, iou_rotated(fixed, moving));
  }
  return curve;
}

CurveTable heading_iou_curve(double lwr, double theta_lo, double theta_hi, int steps) {
  if (!(lwr > 0.0)) throw std::invalid_argument("heading_iou_curve: lwr must be positive");
  if (steps < 2) throw std::invalid_argument("heading_iou_curve: need at least 2 steps");
  const Box3D base{0.0, 0.0, 0.0, lwr, 1.0, 1.0, 0.0};
  CurveTable curve;
  char name[64];
  std::snprintf(name, sizeof(name), "iou_vs_dtheta_lwr_%.2f", lwr);
  curve.metric_name = name;
  for (int i = 0; i < steps; ++i) {
    const double t =
        theta_lo + (theta_hi - theta_lo) * i / static_cast<double>(steps - 1);
    Box3D rotated = base;
    rotated.yaw = t;
    curve.rows.emplace_back(t, iou_rotated(base, rotated));
  }
  return curve;
}

std::vector<PropertyCheck> run_property_suite(const PropertySuiteOptions& options) {
  std::vector<PropertyCheck> checks;
  char buf[256];

  // Closed-form equivalence: rotated engine vs the two lemma formulas.
  {
    PropertyCheck check{"closed_form_aligned_same_size", true, options.trials, ""};
    Rng rng(derive_seed(options.seed, 1));
    for (long long i = 0; i < options.trials; ++i) {
      Box3D a = random_gt(rng);
      a.yaw = 0.0;
      Box3D b = a;
      b.x += rng.uniform(-1.5, 1.5) * a.l;
      b.y += rng.uniform(-1.5, 1.5) * a.w;
      b.z += rng.uniform(-1.5, 1.5) * a.h;
      const double closed = iou_aligned_same_size({b.x - a.x, b.y - a.y, b.z - a.z}, a.extents());
      const double general = iou_rotated(a, b);
      if (std::abs(closed - general) > 1e-9) {
        check.passed = false;
        std::snprintf(buf, sizeof(buf), "trial %lld: closed=%.12f general=%.12f a=%s b=%s", i,
                      closed, general, describe_box(a).c_str(), describe_box(b).c_str());
        check.detail = buf;
        break;
      }
    }
    checks.push_back(std::move(check));
  }
  {
    PropertyCheck check{"closed_form_centered_axis_aligned", true, options.trials, ""};
    Rng rng(derive_seed(options.seed, 2));
    for (long long i = 0; i < options.trials; ++i) {
      Box3D a = random_gt(rng);
      a.x = a.y = a.z = 0.0;
      a.yaw = 0.0;
      Box3D b = a;
      b.l = rng.uniform(0.5, 20.0);
      b.w = rng.uniform(0.5, 20.0);
      b.h = rng.uniform(0.5, 4.0);
      const double closed = iou_centered_axis_aligned(a.extents(), b.extents());
      const double general = iou_rotated(a, b);
      if (std::abs(closed - general) > 1e-9) {
        check.passed = false;
        std::snprintf(buf, sizeof(buf), "trial %lld: closed=%.12f general=%.12f a=%s b=%s", i,
                      closed, general, describe_box(a).c_str(), describe_box(b).c_str());
        check.detail = buf;
        break;
      }
    }
    checks.push_back(std::move(check));
  }

  // Monte-Carlo oracle equivalence for the rotated engine.
  {
    PropertyCheck check{"oracle_equivalence", true, options.oracle_pairs, ""};
    std::vector<Box3D> firsts(options.oracle_pairs), seconds(options.oracle_pairs);
    Rng rng(derive_seed(options.seed, 3));
    for (int i = 0; i < options.oracle_pairs; ++i) {
      firsts[i] = random_gt(rng);
      seconds[i] = perturb_box(firsts[i], rng);
    }
    std::vector<double> diffs(options.oracle_pairs, 0.0);
    parallel_for(static_cast<std::size_t>(options.oracle_pairs), options.threads,
                 [&](std::size_t i) {
                   const double exact = iou_rotated(firsts[i], seconds[i]);
                   const double estimate = iou_oracle(firsts[i], seconds[i],
                                                      options.oracle_samples,
                                                      derive_seed(options.seed, 100 + i));
                   diffs[i] = std::abs(exact - estimate);
                 });
    for (int i = 0; i < options.oracle_pairs; ++i) {
      if (diffs[i] > 0.01) {
        check.passed = false;
        std::snprintf(buf, sizeof(buf), "pair %d: |engine-oracle|=%.6f a=%s b=%s", i, diffs[i],
                      describe_box(firsts[i]).c_str(), describe_box(seconds[i]).c_str());
        check.detail = buf;
        break;
      }
    }
    checks.push_back(std::move(check));
  }

  // SI symmetry under swapping the observations.
  {
    PropertyCheck check{"si_symmetry", true, options.trials, ""};
    Rng rng(derive_seed(options.seed, 4));
    for (long long i = 0; i < options.trials; ++i) {
      const Box3D gt1 = random_gt(rng);
      const Box3D gt2 = moved_gt(gt1, rng);
      MatchedObservation obs1{gt1, ScoredBox{perturb_box(gt1, rng), rng.uniform(0.0, 1.0)}};
      MatchedObservation obs2{gt2, ScoredBox{perturb_box(gt2, rng), rng.uniform(0.0, 1.0)}};
      if (i % 7 == 0) obs1.pred.reset();  // missing matches stay symmetric too
      if (i % 11 == 0) obs2.pred.reset();
      const StabilityScore fwd = stability_index(obs1, obs2, kSweepCal, options.heading_cutoff);
      const StabilityScore rev = stability_index(obs2, obs1, kSweepCal, options.heading_cutoff);
      const double dev = max_score_deviation(fwd, rev);
      if (dev > 1e-12) {
        check.passed = false;
        std::snprintf(buf, sizeof(buf), "trial %lld: deviation=%.3e gt1=%s gt2=%s", i, dev,
                      describe_box(gt1).c_str(), describe_box(gt2).c_str());
        check.detail = buf;
        break;
      }
    }
    checks.push_back(std::move(check));
  }

  // Marginal unimodality: each element swept through its GT value, SI
  // non-increasing outward. The yaw span deliberately crosses pi/4 so the
  // gate's contribution is part of what gets verified.
  {
    const int base_count = static_cast<int>(std::max<long long>(10, options.trials / 20));
    PropertyCheck check{"marginal_unimodality",
                        true,
                        static_cast<long long>(base_count) * 8,
                        ""};
    Rng rng(derive_seed(options.seed, 5));
    const auto bases = sweep_bases(rng, base_count);
    const double yaw_span = 0.49 * kPi;
    constexpr int kGrid = 41;
    constexpr int kCenter = kGrid / 2;
    for (std::size_t bi = 0; bi < bases.size() && check.passed; ++bi) {
      for (Element element : kAllElements) {
        const double span = sweep_span(bases[bi], element, yaw_span);
        double values[kGrid];
        for (int i = 0; i < kGrid; ++i) {
          const double delta = span * (i - kCenter) / static_cast<double>(kCenter);
          values[i] = sweep_point(bases[bi], element, delta, options.heading_cutoff).si;
        }
        int bad = -1;
        for (int i = kCenter; i + 1 < kGrid; ++i) {
          if (values[i + 1] > values[i] + 1e-9) bad = i + 1;
        }
        for (int i = kCenter; i - 1 >= 0; --i) {
          if (values[i - 1] > values[i] + 1e-9) bad = i - 1;
        }
        if (bad >= 0) {
          check.passed = false;
          std::snprintf(buf, sizeof(buf),
                        "base %zu element %s: si rises to %.9f at grid index %d (delta=%.6f)", bi,
                        element_name(element), values[bad], bad,
                        span * (bad - kCenter) / static_cast<double>(kCenter));
          check.detail = buf;
          break;
        }
      }
    }
    checks.push_back(std::move(check));
  }

  // Peak characterization: exactly 1 iff perfectly stable.
  {
    const int base_count = static_cast<int>(std::max<long long>(10, options.trials / 20));
    PropertyCheck check{"peak_characterization", true, static_cast<long long>(base_count), ""};
    Rng rng(derive_seed(options.seed, 6));
    const auto bases = sweep_bases(rng, base_count);
    for (std::size_t bi = 0; bi < bases.size() && check.passed; ++bi) {
      const StabilityScore perfect = sweep_point(bases[bi], Element::kX, 0.0,
                                                 options.heading_cutoff);
      if (perfect.si != 1.0) {
        check.passed = false;
        std::snprintf(buf, sizeof(buf), "base %zu: perfect pair scored %.17g", bi, perfect.si);
        check.detail = buf;
        break;
      }
      for (Element element : kAllElements) {
        for (double magnitude : {1e-3, 1e-2}) {
          for (double sign : {1.0, -1.0}) {
            const double si =
                sweep_point(bases[bi], element, sign * magnitude, options.heading_cutoff).si;
            if (!(si < 1.0 - 1e-6)) {
              check.passed = false;
              std::snprintf(buf, sizeof(buf),
                            "base %zu element %s: perturbation %+.0e kept si at %.12f", bi,
                            element_name(element), sign * magnitude, si);
              check.detail = buf;
            }
          }
        }
      }
    }
    checks.push_back(std::move(check));
  }

  // Confidence scale invariance.
  {
    PropertyCheck check{"confidence_scale_invariance", true, options.trials, ""};
    Rng rng(derive_seed(options.seed, 7));
    for (long long i = 0; i < options.trials; ++i) {
      const double c1 = rng.uniform(0.0, 1.0);
      const double c2 = rng.uniform(0.0, 1.0);
      const double lo = rng.uniform(0.0, 0.4);
      const CalibrationRange cal{lo + rng.uniform(0.1, 0.6), lo};
      const double k = rng.uniform(0.05, 20.0);
      const double plain = si_confidence(c1, c2, cal);
      const double scaled = si_confidence(k * c1, k * c2, {k * cal.c99, k * cal.c01});
      if (std::abs(plain - scaled) > 1e-12) {
        check.passed = false;
        std::snprintf(buf, sizeof(buf), "trial %lld: c1=%.6f c2=%.6f k=%.6f |diff|=%.3e", i, c1,
                      c2, k, std::abs(plain - scaled));
        check.detail = buf;
        break;
      }
    }
    checks.push_back(std::move(check));
  }

  // Naive-metric asymmetry search; SI must stay exactly symmetric on the
  // very same instances.
  {
    PropertyCheck check{"naive_metric_asymmetry", true, options.trials, ""};
    Rng rng(derive_seed(options.seed, 8));
    double worst = 0.0;
    bool found = false;
    bool si_symmetric = true;
    for (long long i = 0; i < options.trials; ++i) {
      const Box3D g1 = random_gt(rng);
      const Box3D g2 = moved_gt(g1, rng);
      const Box3D b1 = perturb_box(g1, rng);
      const Box3D b2 = perturb_box(g2, rng);
      const double fwd = naive_metric(b1, b2, g1, g2, NaiveDirection::kForward);
      const double rev = naive_metric(b1, b2, g1, g2, NaiveDirection::kReverse);
      worst = std::max(worst, std::abs(fwd - rev));
      if (std::abs(fwd - rev) > 0.01) found = true;

      const double score = rng.uniform(0.1, 0.9);
      MatchedObservation obs1{g1, ScoredBox{b1, score}};
      MatchedObservation obs2{g2, ScoredBox{b2, score}};
      const StabilityScore a = stability_index(obs1, obs2, kSweepCal);
      const StabilityScore b = stability_index(obs2, obs1, kSweepCal);
      if (max_score_deviation(a, b) != 0.0) si_symmetric = false;
    }
    if (!found) {
      check.passed = false;
      std::snprintf(buf, sizeof(buf), "no instance with |forward-reverse| > 0.01 (max %.6f)",
                    worst);
      check.detail = buf;
    } else if (!si_symmetric) {
      check.passed = false;
      check.detail = "stability_index deviated under swap on a searched instance";
    } else {
      std::snprintf(buf, sizeof(buf), "max |forward-reverse| = %.6f", worst);
      check.detail = buf;
    }
    checks.push_back(std::move(check));
  }

  // Off-center argmax: the naive curve peaks away from zero on the fixed
  // configuration; the heading indicator peaks exactly at zero.
  {
    PropertyCheck check{"offcenter_argmax", true, 2, ""};
    constexpr int kSteps = 81;  // [-10 deg, 10 deg] at 0.25 deg
    const double lo = -10.0 * kPi / 180.0;
    const double hi = 10.0 * kPi / 180.0;
    const CurveTable naive = offcenter_iou_curve(0.5, lo, hi, kSteps);
    const std::size_t naive_peak = curve_argmax(naive);

    const Box3D g1{0.0, 0.0, 0.0, 2.0, 1.0, 1.0, 0.0};
    const Box3D g2{0.5, 0.05, 0.0, 3.0, 1.0, 1.0, 0.0};
    const Box3D pivot = pivot_box(g1, g2);
    CurveTable heading;
    heading.metric_name = "si_h_vs_dtheta";
    for (int i = 0; i < kSteps; ++i) {
      const double deg = -10.0 + 0.25 * i;
      const double t = deg * kPi / 180.0;
      const Box3D p1 = project_to_pivot(g1, g1, pivot);
      Box3D pred2 = g2;
      pred2.yaw += t;
      const Box3D p2 = project_to_pivot(pred2, g2, pivot);
      heading.rows.emplace_back(t, si_heading(p1, p2, pivot));
    }
    const std::size_t si_peak = curve_argmax(heading);
    const std::size_t zero_index = kSteps / 2;

    if (naive.rows[naive_peak].first == 0.0) {
      check.passed = false;
      check.detail = "naive metric peaked at dtheta = 0 on the off-center configuration";
    } else if (si_peak != zero_index || heading.rows[si_peak].first != 0.0) {
      check.passed = false;
      std::snprintf(buf, sizeof(buf), "si_h peaked at index %zu (dtheta=%.6f) instead of 0",
                    si_peak, heading.rows[si_peak].first);
      check.detail = buf;
    } else {
      std::snprintf(buf, sizeof(buf), "naive argmax at dtheta=%.6f rad; si_h argmax at 0",
                    naive.rows[naive_peak].first);
      check.detail = buf;
    }
    checks.push_back(std::move(check));
  }

  return checks;
}

bool all_passed(const std::vector<PropertyCheck>& checks) {
  return std::all_of(checks.begin(), checks.end(),
                     [](const PropertyCheck& c) { return c.passed; });
}

std::string format_property_summary(const std::vector<PropertyCheck>& checks) {
  std::string out;
  for (const auto& check : checks) {
    out += check.passed ? "[PASS] " : "[FAIL] ";
    out += check.name;
    out += " (checked=" + std::to_string(check.checked) + ")";
    if (!check.detail.empty()) {
      out += ": ";
      out += check.detail;
    }
    out += '\n';
  }
  return out;
}

}  // namespace stabidx
