#pragma once

#include <utility>
#include <vector>

#include "latticeflow/tolerances.hpp"

namespace latticeflow {

// Continuous piecewise-affine function on the whole line. Segment i covers
// [knots[i-1], knots[i]]; segments 0 and m extend affinely to -inf and +inf.
// Knot list is finite: a locally piecewise affine function restricted to any
// window is captured, with the extension segments carrying the behavior
// beyond the outermost knots.
struct PiecewiseAffineFunction {
  std::vector<double> knots;       // strictly increasing, size m >= 1
  std::vector<double> slopes;      // size m+1
  std::vector<double> intercepts;  // size m+1

  double operator()(double x) const;
  int segment_count() const { return static_cast<int>(slopes.size()); }

  // Checks knot monotonicity, matching array sizes, and continuity at every
  // interior knot up to an absolute tolerance.
  void validate(double knot_tol = tol::knot) const;

  // Value at the left end of segment i evaluated from segment i's line.
  double segment_value_left(int i) const;

  // x -> f(x + t), exact (knots move by -t).
  PiecewiseAffineFunction shifted(double t) const;
  PiecewiseAffineFunction scaled(double c) const;

  // Continuous interpolant through the given (x, y) points (x strictly
  // increasing), extended with the given end slopes.
  static PiecewiseAffineFunction interpolating(const std::vector<std::pair<double, double>>& pts,
                                               double left_slope = 0.0, double right_slope = 0.0);
};

// Exact lattice algebra with merged knots; crossings of the two active lines
// become new breakpoints.
PiecewiseAffineFunction pa_add(const PiecewiseAffineFunction& f, const PiecewiseAffineFunction& g);
PiecewiseAffineFunction pa_sup(const PiecewiseAffineFunction& f, const PiecewiseAffineFunction& g);
PiecewiseAffineFunction pa_inf(const PiecewiseAffineFunction& f, const PiecewiseAffineFunction& g);
PiecewiseAffineFunction pa_abs(const PiecewiseAffineFunction& f);

}  // namespace latticeflow
