#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "latticeflow/grid.hpp"
#include "latticeflow/lattice_ops.hpp"
#include "latticeflow/real_function.hpp"

namespace lftest {

using namespace latticeflow;

inline double sup_diff(const RealFunction& a, const RealFunction& b, const GridSpec& g) {
  const std::vector<double> av = a.eval_on(g);
  const std::vector<double> bv = b.eval_on(g);
  double m = 0.0;
  for (std::size_t i = 0; i < av.size(); ++i) m = std::max(m, std::fabs(av[i] - bv[i]));
  return m;
}

inline double sup_diff_fn(const RealFunction& a, const std::function<double(double)>& oracle,
                          const GridSpec& g) {
  const std::vector<double> av = a.eval_on(g);
  double m = 0.0;
  for (int i = 0; i < g.n; ++i)
    m = std::max(m, std::fabs(av[static_cast<std::size_t>(i)] - oracle(g.point(i))));
  return m;
}

// PA identity function x -> x, for the exact lattice paths.
inline RealFunction pa_identity() {
  PiecewiseAffineFunction pa;
  pa.knots = {0.0};
  pa.slopes = {1.0, 1.0};
  pa.intercepts = {0.0, 0.0};
  return RealFunction::piecewise(std::move(pa), "identity_pa");
}

// Deterministic piecewise-affine generator for property-style tests.
inline PiecewiseAffineFunction random_pa(std::mt19937& rng) {
  std::uniform_int_distribution<int> knot_count(1, 6);
  std::uniform_real_distribution<double> knot_pos(-8.0, 8.0);
  std::uniform_real_distribution<double> slope(-3.0, 3.0);
  std::uniform_real_distribution<double> value(-5.0, 5.0);
  const int m = knot_count(rng);
  std::vector<double> knots;
  for (int i = 0; i < m; ++i) knots.push_back(knot_pos(rng));
  std::sort(knots.begin(), knots.end());
  knots.erase(std::unique(knots.begin(), knots.end()), knots.end());

  PiecewiseAffineFunction pa;
  pa.knots = knots;
  pa.slopes.resize(knots.size() + 1);
  pa.intercepts.resize(knots.size() + 1);
  for (std::size_t i = 0; i < pa.slopes.size(); ++i) pa.slopes[i] = slope(rng);
  // Anchor the first segment, then chain intercepts so the function is
  // continuous at every knot.
  pa.intercepts[0] = value(rng);
  for (std::size_t i = 0; i < knots.size(); ++i) {
    const double left = pa.slopes[i] * knots[i] + pa.intercepts[i];
    pa.intercepts[i + 1] = left - pa.slopes[i + 1] * knots[i];
  }
  return pa;
}

}  // namespace lftest
