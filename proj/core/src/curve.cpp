#include "stabidx/curve.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace stabidx {

std::string render_curve_csv(const CurveTable& curve) {
  std::string out = "sweep_value,metric_value\n";
  char buf[80];
  for (const auto& [x, y] : curve.rows) {
    std::snprintf(buf, sizeof(buf), "%.6f,%.6f\n", x, y);
    out += buf;
  }
  return out;
}

void write_curve_csv(const CurveTable& curve, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << render_curve_csv(curve);
  if (!out) throw std::runtime_error("failed writing curve file: " + path);
}

std::size_t curve_argmax(const CurveTable& curve) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < curve.rows.size(); ++i) {
    if (curve.rows[i].second > curve.rows[best].second) best = i;
  }
  return best;
}

}  // namespace stabidx
