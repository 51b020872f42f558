#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "latticeflow/grid.hpp"
#include "latticeflow/real_function.hpp"
#include "latticeflow/ru_convergence.hpp"
#include "latticeflow/tolerances.hpp"

namespace latticeflow {

// One-parameter family of positive linear operators T(t), t >= 0, acting on
// RealFunction. apply is pure; operators are immutable and shareable.
class SemigroupOperator {
 public:
  using ApplyFn = std::function<RealFunction(double, const RealFunction&)>;

  SemigroupOperator() = default;
  SemigroupOperator(std::string kind, std::string label, ApplyFn fn,
                    ordered_json metadata = ordered_json::object());

  RealFunction apply(double t, const RealFunction& f) const;

  const std::string& kind() const { return kind_; }
  const std::string& label() const { return label_; }
  const ordered_json& metadata() const { return metadata_; }

 private:
  std::string kind_;
  std::string label_;
  ApplyFn fn_;
  ordered_json metadata_;
};

// Left translation: (T(t)f)(x) = f(x + t). Exact for closed-form and
// piecewise-affine inputs (knot shift); sampled inputs translate through
// their interpolant.
SemigroupOperator make_translation();

// Gaussian convolution semigroup on the line,
//   (T(t)f)(y) = (4 pi t)^{-1/2} Integral exp(-x^2/(4t)) f(x+y) dx,  T(0) = I.
// Composite Simpson quadrature on the kernel truncated at
// quad_halfwidth_sigmas standard deviations (the kernel's std is sqrt(2t)).
// For 0 < t < tol::heat_t_min the kernel is numerically a delta and apply
// falls back to the identity.
SemigroupOperator make_heat(double quad_halfwidth_sigmas = 8.0, int quad_points = 513);

// 2 * Gamma((N+1)/2) / Gamma(N/2): the absolute first moment of the
// N-dimensional Gaussian kernel at unit scale, as used in the modulus bound
// for the convolution semigroup.
double gamma_constant(int N);

struct LawRow {
  double s = 0.0, t = 0.0;
  double defect = 0.0;  // sup over grid of |T(s+t)f - T(t)T(s)f|
};

struct LawReport {
  std::string op_label, f_label;
  std::vector<LawRow> rows;
  double max_defect = 0.0;
  double tolerance = tol::law;
  bool pass = false;
  ordered_json to_json() const;
};

LawReport check_semigroup_law(const SemigroupOperator& S, const RealFunction& f,
                              const std::vector<std::pair<double, double>>& times,
                              const GridSpec& grid, double tolerance = tol::law);

// Largest positivity violation: max over sampled times and nonnegative
// corpus members of (-min_grid T(t)f), clamped at 0.
double positivity_dip(const SemigroupOperator& S, const std::vector<RealFunction>& nonneg_corpus,
                      const std::vector<double>& times, const GridSpec& grid);

struct OrbitBound {
  double s = 0.0, delta = 0.0;
  int n0 = 0;
  RealFunction v;  // finite lattice supremum of T(delta)^k (|x| + u), k = 0..n0
  std::vector<double> orbit_times;
  double worst_violation = 0.0;  // max over sampled t of max_grid(|T(t)x| - v)
  ordered_json to_json() const;
};

// Order bound for the orbit segment {T(t)x : 0 <= t <= s} from a continuity
// certificate (u, delta): |T(h)x - x| <= u for h in [0, delta]. Throws
// certificate_error when a sampled orbit point escapes [0, v] beyond slack.
OrbitBound orbit_order_bound(const SemigroupOperator& S, const RealFunction& x,
                             const RealFunction& u, double s, double delta, const GridSpec& grid,
                             double slack = 1e-8, int orbit_samples = 64);

// Continuity at zero along positive vectors: delegates to
// verify_ru_convergence on the family h -> T(h)x with limit x.
RegulatorReport test_ruc_at_zero(const SemigroupOperator& S, const RealFunction& x_positive,
                                 const RealFunction& regulator, const std::vector<double>& eps_list,
                                 const GridSpec& grid, double t_hi = 1.0, int n_samples = 256,
                                 double floor_ratio = 1e-6);

// First candidate regulator for which test_ruc_at_zero converges, if any.
std::optional<std::pair<RealFunction, RegulatorReport>> regulator_search(
    const SemigroupOperator& S, const RealFunction& x, const std::vector<RealFunction>& candidates,
    const std::vector<double>& eps_list, const GridSpec& grid, double t_hi = 1.0,
    int n_samples = 256, double floor_ratio = 1e-6);

struct DivergenceRow {
  int grid_n = 0;
  double cell = 0.0;              // grid spacing 1/n
  double closest_distance = 0.0;  // min over samples of |x + t - 1/2|
  double max_value = 0.0;         // max over grid of sup over sampled t of (T_l(t)f)(x)
};

struct DivergenceTable {
  double p = 0.0, delta = 0.0;
  std::vector<DivergenceRow> rows;
  bool strictly_increasing = false;
  double min_growth_factor = 0.0;
  bool unbounded_indicated = false;  // every refinement at least doubled the max
  ordered_json to_json() const;
  std::string to_csv() const;  // grid_n,max_value
};

// Refinement probe for the translated singular profile
// f(x) = |x - 1/2|^{-1/(2p)}. Each grid places nodes at cell midpoints of
// [0, 1] (offset by half a cell from the pole; even n required). The shift
// lattice interleaves grid-period steps with steps that land one half cell^2
// short of the pole, so the sampled orbit supremum grows at a known rate
// under refinement instead of by alignment accident.
DivergenceTable lp_counterexample_probe(double p, double delta,
                                        const std::vector<int>& grid_sizes = {1000, 10000, 100000});

// Midpoint-offset probe grid on [0, 1] with n cells (n even).
GridSpec make_probe_grid(int n);

}  // namespace latticeflow
