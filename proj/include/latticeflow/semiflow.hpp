#pragma once

#include <functional>
#include <string>
#include <vector>

#include "latticeflow/grid.hpp"
#include "latticeflow/real_function.hpp"
#include "latticeflow/ru_convergence.hpp"
#include "latticeflow/semigroup.hpp"
#include "latticeflow/tolerances.hpp"

namespace latticeflow {

// phi(t, x): forward evolution of a point, defined for t in [0, horizon].
struct Semiflow {
  std::function<double(double, double)> phi;
  std::string label;
  double horizon = 100.0;
};

Semiflow make_shift_flow();
Semiflow make_decay_flow(double rate);

// Forward-complete flow of xdot = -x^k (k odd, >= 3):
//   phi(t, x) = x * (1 + (k-1) t |x|^(k-1))^(-1/(k-1)).
// Its displacement grows like |x|^k near t = 0, so the 1+|x| criterion fails
// on widening windows while the semiflow laws hold globally.
Semiflow make_poly_drift_flow(int k);

// phi(t, x) = outer(t, inner(t, x)); a semiflow when the factors commute
// (the law check decides).
Semiflow compose_flows(const Semiflow& outer, const Semiflow& inner);

// "shift" | "decay(rate)" | "poly_drift(k)" | "compose(spec,spec)".
Semiflow semiflow_from_registry(const std::string& spec);

struct FlowLawReport {
  std::string flow_label;
  double identity_defect = 0.0;     // max over grid of |phi(0,x) - x|
  double composition_defect = 0.0;  // max over (t,s,x) of |phi(t+s,x) - phi(t,phi(s,x))|
  double tolerance = tol::flow;
  bool pass = false;
  ordered_json to_json() const;
};

FlowLawReport check_semiflow_laws(const Semiflow& flow, const GridSpec& grid,
                                  const std::vector<double>& time_samples,
                                  double tolerance = tol::flow);

// Largest sampled delta(eps) with |phi(h,x) - x| <= eps * u(x) on the grid
// for all sampled h <= delta. Requires u > 0 on the grid.
RegulatorReport check_criterion_C(const Semiflow& flow, const RealFunction& u,
                                  const std::vector<double>& eps_list, const GridSpec& grid,
                                  double t_hi = 1.0, int n_samples = 256,
                                  double floor_ratio = 1e-6);

// Same schedule with the fixed order unit u(x) = 1 + |x|.
RegulatorReport check_criterion_LipUC(const Semiflow& flow, const std::vector<double>& eps_list,
                                      const GridSpec& grid, double t_hi = 1.0, int n_samples = 256,
                                      double floor_ratio = 1e-6);

// Composition operator (T(t)f)(x) = f(phi(t, x)). The semiflow laws are
// re-checked at construction; a failing flow is rejected.
SemigroupOperator make_koopman(const Semiflow& flow,
                               const GridSpec& law_grid = GridSpec(-50.0, 50.0, 2001),
                               const std::vector<double>& law_times = {0.1, 0.25, 0.5, 1.0},
                               double law_tolerance = tol::flow);

// g(x) = max over sampled t in [0, s] of |f(phi(t, x))|; dominates every
// sampled orbit member of the composition operator.
RealFunction max_over_orbit(const Semiflow& flow, const RealFunction& f, double s,
                            const GridSpec& grid, int t_samples = 64);

struct LpaSegmentTrace {
  double j_lo = 0.0, j_hi = 0.0;  // working segment
  double slope = 0.0;             // a_n
  double delta_n = 0.0;           // min half-gap among neighbors
  double M_n = 0.0;               // max of u on the segment
  double s_n = 0.0;               // time with |phi(t,x)-x| <= (delta_n/max(M_n,1)) u(x) on [0,s_n]
  double c_n = 0.0;               // s_n^{-1} sup_{t in [0,1], x in segment} |f(phi(s_n+t,x)) - f(phi(s_n,x))|
};

struct LpaRegulatorTrace {
  std::vector<LpaSegmentTrace> segments;
  std::vector<double> knot_x;  // working knots (window ends included)
  std::vector<double> knot_d;  // d value interpolated by v at each knot
  RealFunction v;
  std::string u_label;
  RegulatorReport verification;  // |T(h)f - f| <= eps * v, sampled schedule
  bool pass = false;
  ordered_json to_json() const;
};

struct LpaBuildParams {
  int s_probes = 32;       // log-spaced probes for the s_n search
  int s_bisect = 20;       // bisection refinements of the s_n boundary
  int c_time_samples = 64; // t-samples in [0,1] for c_n
  double t_hi = 1.0;       // family horizon for the final verification
  int family_samples = 256;
  double floor_ratio = 1e-6;
};

// Builds the piecewise-affine regulator for the composition semigroup of the
// flow at a piecewise-affine f, from a displacement certificate u (criterion
// |phi(t,x)-x| <= eps u(x)), then verifies |T(h)f - f| <= eps * v on the
// grid for the given schedule.
LpaRegulatorTrace build_lpa_regulator(const Semiflow& flow, const PiecewiseAffineFunction& f,
                                      const RealFunction& u, const std::vector<double>& eps_list,
                                      const GridSpec& grid, const LpaBuildParams& params = {});

}  // namespace latticeflow
