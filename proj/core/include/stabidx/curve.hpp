#pragma once

#include <string>
#include <utility>
#include <vector>

namespace stabidx {

/// Rows of (sweep value, metric value), ordered by sweep value.
struct CurveTable {
  std::string metric_name;
  std::vector<std::pair<double, double>> rows;
};

/// CSV form: header "sweep_value,metric_value", 6-decimal floats.
std::string render_curve_csv(const CurveTable& curve);
void write_curve_csv(const CurveTable& curve, const std::string& path);

/// Index of the row with the highest metric value (first on ties).
std::size_t curve_argmax(const CurveTable& curve);

}  // namespace stabidx
