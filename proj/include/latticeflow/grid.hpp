#pragma once

#include <cmath>
#include <string>

#include "latticeflow/errors.hpp"

namespace latticeflow {

// Uniform sample grid on a truncated window [x_lo, x_hi]. Every pointwise
// check in the library runs on an explicit grid; the window is a visible
// parameter so callers can widen it.
struct GridSpec {
  double x_lo = -50.0;
  double x_hi = 50.0;
  int n = 20001;

  GridSpec() = default;
  GridSpec(double lo, double hi, int count) : x_lo(lo), x_hi(hi), n(count) { validate(); }

  void validate() const {
    if (!(x_lo < x_hi) || !std::isfinite(x_lo) || !std::isfinite(x_hi))
      throw precondition_error("GridSpec: need finite x_lo < x_hi");
    if (n < 2) throw precondition_error("GridSpec: need n >= 2");
    if (!(spacing() > 0.0) || !std::isfinite(spacing()))
      throw precondition_error("GridSpec: spacing must be positive and finite");
  }

  double spacing() const { return (x_hi - x_lo) / static_cast<double>(n - 1); }

  // Endpoints are hit exactly.
  double point(int i) const {
    if (i == 0) return x_lo;
    if (i == n - 1) return x_hi;
    return x_lo + spacing() * static_cast<double>(i);
  }

  double width() const { return x_hi - x_lo; }

  bool operator==(const GridSpec& o) const { return x_lo == o.x_lo && x_hi == o.x_hi && n == o.n; }

  std::string describe() const {
    return "[" + std::to_string(x_lo) + ", " + std::to_string(x_hi) + "] n=" + std::to_string(n);
  }
};

inline GridSpec default_grid() { return GridSpec(-50.0, 50.0, 20001); }

}  // namespace latticeflow
