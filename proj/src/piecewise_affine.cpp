#include "latticeflow/piecewise_affine.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <iterator>
#include <limits>
#include <string>

#include "latticeflow/errors.hpp"

namespace latticeflow {

double PiecewiseAffineFunction::operator()(double x) const {
  const auto it = std::upper_bound(knots.begin(), knots.end(), x);
  const std::size_t i = static_cast<std::size_t>(it - knots.begin());
  return slopes[i] * x + intercepts[i];
}

double PiecewiseAffineFunction::segment_value_left(int i) const {
  if (i == 0) return slopes[0] * knots[0] + intercepts[0];
  return slopes[i] * knots[i - 1] + intercepts[i];
}

void PiecewiseAffineFunction::validate(double knot_tol) const {
  if (knots.empty()) throw precondition_error("PiecewiseAffineFunction: needs at least one knot");
  if (slopes.size() != knots.size() + 1 || intercepts.size() != knots.size() + 1)
    throw precondition_error("PiecewiseAffineFunction: slopes/intercepts must have one more entry than knots");
  for (std::size_t i = 0; i + 1 < knots.size(); ++i)
    if (!(knots[i] < knots[i + 1]))
      throw precondition_error("PiecewiseAffineFunction: knots must be strictly increasing");
  for (double k : knots)
    if (!std::isfinite(k)) throw precondition_error("PiecewiseAffineFunction: non-finite knot");
  // Continuity at knot i: b_{i-1} - b_i = (a_i - a_{i-1}) * j_i.
  for (std::size_t i = 0; i < knots.size(); ++i) {
    const double defect =
        (intercepts[i] - intercepts[i + 1]) - (slopes[i + 1] - slopes[i]) * knots[i];
    if (!(std::fabs(defect) <= knot_tol))
      throw precondition_error("PiecewiseAffineFunction: discontinuous at knot " +
                               std::to_string(knots[i]) + " (defect " + std::to_string(defect) + ")");
  }
}

PiecewiseAffineFunction PiecewiseAffineFunction::shifted(double t) const {
  PiecewiseAffineFunction r;
  r.knots.reserve(knots.size());
  for (double k : knots) r.knots.push_back(k - t);
  r.slopes = slopes;
  r.intercepts.reserve(intercepts.size());
  for (std::size_t i = 0; i < intercepts.size(); ++i)
    r.intercepts.push_back(intercepts[i] + slopes[i] * t);
  return r;
}

PiecewiseAffineFunction PiecewiseAffineFunction::scaled(double c) const {
  PiecewiseAffineFunction r;
  r.knots = knots;
  r.slopes.reserve(slopes.size());
  r.intercepts.reserve(intercepts.size());
  for (double a : slopes) r.slopes.push_back(c * a);
  for (double b : intercepts) r.intercepts.push_back(c * b);
  return r;
}

PiecewiseAffineFunction PiecewiseAffineFunction::interpolating(
    const std::vector<std::pair<double, double>>& pts, double left_slope, double right_slope) {
  if (pts.size() < 2) throw precondition_error("interpolating: need at least two points");
  PiecewiseAffineFunction r;
  const std::size_t m = pts.size();
  r.knots.reserve(m);
  for (const auto& p : pts) r.knots.push_back(p.first);
  r.slopes.resize(m + 1);
  r.intercepts.resize(m + 1);
  r.slopes[0] = left_slope;
  r.intercepts[0] = pts[0].second - left_slope * pts[0].first;
  for (std::size_t i = 0; i + 1 < m; ++i) {
    const double a = (pts[i + 1].second - pts[i].second) / (pts[i + 1].first - pts[i].first);
    r.slopes[i + 1] = a;
    r.intercepts[i + 1] = pts[i].second - a * pts[i].first;
  }
  r.slopes[m] = right_slope;
  r.intercepts[m] = pts[m - 1].second - right_slope * pts[m - 1].first;
  r.validate(1e-9);
  return r;
}

namespace {

struct Line {
  double a, b;
  double at(double x) const { return a * x + b; }
  bool operator==(const Line& o) const { return a == o.a && b == o.b; }
};

Line segment_line(const PiecewiseAffineFunction& f, double x_probe) {
  const auto it = std::upper_bound(f.knots.begin(), f.knots.end(), x_probe);
  const std::size_t i = static_cast<std::size_t>(it - f.knots.begin());
  return {f.slopes[i], f.intercepts[i]};
}

// Rebuild a normalized function: a breakpoint survives only where the active
// line actually changes. lines.size() == breaks.size() + 1.
PiecewiseAffineFunction assemble(const std::vector<double>& breaks,
                                 const std::vector<Line>& lines) {
  PiecewiseAffineFunction r;
  Line cur = lines[0];
  for (std::size_t i = 0; i < breaks.size(); ++i) {
    if (lines[i + 1] == cur) continue;
    r.knots.push_back(breaks[i]);
    r.slopes.push_back(cur.a);
    r.intercepts.push_back(cur.b);
    cur = lines[i + 1];
  }
  r.slopes.push_back(cur.a);
  r.intercepts.push_back(cur.b);
  if (r.knots.empty()) {
    // Result is one global line; keep a single knot so the representation
    // invariant (>= 1 knot) holds.
    r.knots.push_back(breaks[0]);
    r.slopes.push_back(cur.a);
    r.intercepts.push_back(cur.b);
  }
  return r;
}

// Merged breakpoints of f and g plus crossings of the active lines, then a
// per-region combine step. Regions are delimited by the final breakpoint
// list, including the two unbounded ends.
PiecewiseAffineFunction combine(const PiecewiseAffineFunction& f, const PiecewiseAffineFunction& g,
                                bool want_sum, bool want_sup) {
  std::vector<double> breaks;
  breaks.reserve(f.knots.size() + g.knots.size());
  std::merge(f.knots.begin(), f.knots.end(), g.knots.begin(), g.knots.end(),
             std::back_inserter(breaks));
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

  if (!want_sum) {
    // Insert crossing points of the two active lines, region by region
    // (including both unbounded end regions).
    std::vector<double> crossings;
    const double span = std::max(1.0, breaks.back() - breaks.front());
    auto consider = [&](double lo, double hi) {
      const double mid = std::isinf(lo) ? hi - 1.0 : (std::isinf(hi) ? lo + 1.0 : 0.5 * (lo + hi));
      const Line lf = segment_line(f, mid);
      const Line lg = segment_line(g, mid);
      if (lf.a == lg.a) return;
      const double x = (lg.b - lf.b) / (lf.a - lg.a);
      const double margin = 1e-12 * span;
      if (x > lo + margin && x < hi - margin) crossings.push_back(x);
    };
    consider(-std::numeric_limits<double>::infinity(), breaks.front());
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) consider(breaks[i], breaks[i + 1]);
    consider(breaks.back(), std::numeric_limits<double>::infinity());
    breaks.insert(breaks.end(), crossings.begin(), crossings.end());
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  }

  const std::size_t m = breaks.size();
  std::vector<Line> lines(m + 1);
  for (std::size_t i = 0; i <= m; ++i) {
    // Two probes per region; winners cannot change inside a region.
    double p1, p2;
    if (i == 0) {
      p1 = breaks[0] - 2.0;
      p2 = breaks[0] - 1.0;
    } else if (i == m) {
      p1 = breaks[m - 1] + 1.0;
      p2 = breaks[m - 1] + 2.0;
    } else {
      p1 = breaks[i - 1] + (breaks[i] - breaks[i - 1]) / 3.0;
      p2 = breaks[i - 1] + 2.0 * (breaks[i] - breaks[i - 1]) / 3.0;
    }
    const Line lf = segment_line(f, 0.5 * (p1 + p2));
    const Line lg = segment_line(g, 0.5 * (p1 + p2));
    if (want_sum) {
      lines[i] = {lf.a + lg.a, lf.b + lg.b};
    } else {
      const double sf = lf.at(p1) + lf.at(p2);
      const double sg = lg.at(p1) + lg.at(p2);
      const bool f_wins = want_sup ? (sf >= sg) : (sf <= sg);
      lines[i] = f_wins ? lf : lg;
    }
  }
  return assemble(breaks, lines);
}

}  // namespace

PiecewiseAffineFunction pa_add(const PiecewiseAffineFunction& f, const PiecewiseAffineFunction& g) {
  return combine(f, g, /*want_sum=*/true, false);
}

PiecewiseAffineFunction pa_sup(const PiecewiseAffineFunction& f, const PiecewiseAffineFunction& g) {
  return combine(f, g, false, /*want_sup=*/true);
}

PiecewiseAffineFunction pa_inf(const PiecewiseAffineFunction& f, const PiecewiseAffineFunction& g) {
  return combine(f, g, false, /*want_sup=*/false);
}

PiecewiseAffineFunction pa_abs(const PiecewiseAffineFunction& f) {
  return pa_sup(f, f.scaled(-1.0));
}

}  // namespace latticeflow
