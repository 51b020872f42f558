#include "latticeflow/semigroup.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <sstream>

#include "latticeflow/errors.hpp"
#include "latticeflow/lattice_ops.hpp"
#include "latticeflow/parallel.hpp"

namespace latticeflow {

SemigroupOperator::SemigroupOperator(std::string kind, std::string label, ApplyFn fn,
                                     ordered_json metadata)
    : kind_(std::move(kind)), label_(std::move(label)), fn_(std::move(fn)),
      metadata_(std::move(metadata)) {}

RealFunction SemigroupOperator::apply(double t, const RealFunction& f) const {
  if (!fn_) throw precondition_error("SemigroupOperator: empty operator");
  if (!(t >= 0.0)) throw precondition_error("SemigroupOperator: time must be nonnegative");
  if (t == 0.0) return f;
  return fn_(t, f);
}

SemigroupOperator make_translation() {
  auto fn = [](double t, const RealFunction& f) -> RealFunction {
    ConeFlag flag = f.flag();
    if (flag.compact_support)
      flag.compact_support = SupportInterval{flag.compact_support->lo - t,
                                             flag.compact_support->hi - t};
    const std::string label = "shift(" + std::to_string(t) + ")[" + f.label() + "]";
    if (const PiecewiseAffineFunction* pa = f.piecewise_affine())
      return RealFunction::piecewise(pa->shifted(t), label, flag);
    return RealFunction::closed_form(label, [f, t](double x) { return f(x + t); }, flag);
  };
  return SemigroupOperator("translation", "translation", fn);
}

namespace {

struct HeatStencil {
  std::vector<double> offsets;
  std::vector<double> weights;  // Simpson weights times kernel values
};

HeatStencil heat_stencil(double t, double halfwidth_sigmas, int points) {
  HeatStencil st;
  const double sigma = std::sqrt(2.0 * t);
  const double w = halfwidth_sigmas * sigma;
  const double step = 2.0 * w / static_cast<double>(points - 1);
  const double norm = 1.0 / std::sqrt(4.0 * M_PI * t);
  st.offsets.resize(static_cast<std::size_t>(points));
  st.weights.resize(static_cast<std::size_t>(points));
  for (int j = 0; j < points; ++j) {
    const double x = -w + step * static_cast<double>(j);
    double c = (j == 0 || j == points - 1) ? 1.0 : (j % 2 == 1 ? 4.0 : 2.0);
    st.offsets[static_cast<std::size_t>(j)] = x;
    st.weights[static_cast<std::size_t>(j)] =
        c * (step / 3.0) * norm * std::exp(-x * x / (4.0 * t));
  }
  return st;
}

}  // namespace

SemigroupOperator make_heat(double quad_halfwidth_sigmas, int quad_points) {
  if (quad_points < 16) throw precondition_error("make_heat: need quad_points >= 16");
  if (!(quad_halfwidth_sigmas >= 4.0))
    throw precondition_error("make_heat: need quad_halfwidth_sigmas >= 4");
  if (quad_points % 2 == 0) ++quad_points;  // composite Simpson needs an even interval count
  ordered_json meta = {{"quad_halfwidth_sigmas", quad_halfwidth_sigmas},
                       {"quad_points", quad_points},
                       {"t_min_identity_fallback", tol::heat_t_min}};
  auto fn = [quad_halfwidth_sigmas, quad_points](double t, const RealFunction& f) -> RealFunction {
    if (t < tol::heat_t_min) return f;  // near-delta kernel: O(t) error for Lipschitz inputs
    auto st = std::make_shared<const HeatStencil>(heat_stencil(t, quad_halfwidth_sigmas, quad_points));
    const std::string label = "heat(" + std::to_string(t) + ")[" + f.label() + "]";
    ConeFlag flag;
    flag.positive = f.flag().positive;  // positive kernel, positive weights
    return RealFunction::closed_form(label, [st, f](double y) {
      double acc = 0.0;
      for (std::size_t j = 0; j < st->offsets.size(); ++j)
        acc += st->weights[j] * f(y + st->offsets[j]);
      return acc;
    }, flag);
  };
  return SemigroupOperator("heat", "heat", fn, meta);
}

double gamma_constant(int N) {
  if (N < 1) throw precondition_error("gamma_constant: N must be >= 1");
  const double n = static_cast<double>(N);
  return 2.0 * std::tgamma((n + 1.0) / 2.0) / std::tgamma(n / 2.0);
}

ordered_json LawReport::to_json() const {
  ordered_json j;
  j["operator"] = op_label;
  j["f"] = f_label;
  ordered_json rows_j = ordered_json::array();
  for (const LawRow& r : rows) rows_j.push_back({{"s", r.s}, {"t", r.t}, {"defect", r.defect}});
  j["rows"] = rows_j;
  j["max_defect"] = max_defect;
  j["tolerance"] = tolerance;
  j["pass"] = pass;
  return j;
}

LawReport check_semigroup_law(const SemigroupOperator& S, const RealFunction& f,
                              const std::vector<std::pair<double, double>>& times,
                              const GridSpec& grid, double tolerance) {
  LawReport rep;
  rep.op_label = S.label();
  rep.f_label = f.label();
  rep.tolerance = tolerance;
  for (const auto& [s, t] : times) {
    if (s < 0.0 || t < 0.0) throw precondition_error("check_semigroup_law: times must be >= 0");
    const RealFunction both = S.apply(s + t, f);
    const RealFunction nested = S.apply(t, S.apply(s, f));
    const std::vector<double> a = both.eval_on(grid);
    const std::vector<double> b = nested.eval_on(grid);
    double defect = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) defect = std::max(defect, std::fabs(a[i] - b[i]));
    rep.rows.push_back({s, t, defect});
    rep.max_defect = std::max(rep.max_defect, defect);
  }
  rep.pass = rep.max_defect <= tolerance;
  return rep;
}

double positivity_dip(const SemigroupOperator& S, const std::vector<RealFunction>& nonneg_corpus,
                      const std::vector<double>& times, const GridSpec& grid) {
  double dip = 0.0;
  for (const RealFunction& f : nonneg_corpus) {
    for (double t : times) {
      const std::vector<double> v = S.apply(t, f).eval_on(grid);
      for (double y : v) dip = std::max(dip, -y);
    }
  }
  return std::max(dip, 0.0);
}

ordered_json OrbitBound::to_json() const {
  ordered_json j;
  j["s"] = s;
  j["delta"] = delta;
  j["n0"] = n0;
  j["orbit_samples"] = orbit_times.size();
  j["worst_violation"] = worst_violation;
  return j;
}

OrbitBound orbit_order_bound(const SemigroupOperator& S, const RealFunction& x,
                             const RealFunction& u, double s, double delta, const GridSpec& grid,
                             double slack, int orbit_samples) {
  if (!(delta > 0.0)) throw precondition_error("orbit_order_bound: delta must be positive");
  if (s < 0.0) throw precondition_error("orbit_order_bound: s must be nonnegative");
  if (orbit_samples < 1) throw precondition_error("orbit_order_bound: need orbit samples");

  // The certificate behind the construction: |T(h)x - x| <= u on [0, delta].
  {
    const std::vector<double> xv = x.eval_on(grid);
    const std::vector<double> uv = u.eval_on(grid);
    for (int k = 0; k <= 16; ++k) {
      const double h = delta * static_cast<double>(k) / 16.0;
      const std::vector<double> hv = S.apply(h, x).eval_on(grid);
      for (std::size_t i = 0; i < hv.size(); ++i)
        if (std::fabs(hv[i] - xv[i]) > uv[i] + slack)
          throw precondition_error(
              "orbit_order_bound: (u, delta) is not a continuity certificate for x at h=" +
              std::to_string(h));
    }
  }

  OrbitBound ob;
  ob.s = s;
  ob.delta = delta;
  ob.n0 = static_cast<int>(std::ceil(s / delta));

  // v = sup_k T(delta)^k (|x| + u), k = 0..n0; each power is materialized on
  // the grid before the next application.
  RealFunction w = rf_add(rf_abs_of(x, grid), u, grid);
  std::vector<double> vmax = w.eval_on(grid);
  for (int k = 1; k <= ob.n0; ++k) {
    w = RealFunction::sampled(grid, S.apply(delta, w).eval_on(grid), "T^k(|x|+u)");
    const std::vector<double> wv = w.eval_on(grid);
    for (std::size_t i = 0; i < wv.size(); ++i) vmax[i] = std::max(vmax[i], wv[i]);
  }
  ob.v = RealFunction::sampled(grid, std::move(vmax), "orbit_bound_v");

  const std::vector<double> vv = ob.v.eval_on(grid);
  double worst = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < orbit_samples; ++k) {
    const double t = orbit_samples == 1
                         ? 0.0
                         : s * static_cast<double>(k) / static_cast<double>(orbit_samples - 1);
    ob.orbit_times.push_back(t);
    const std::vector<double> yt = S.apply(t, x).eval_on(grid);
    for (std::size_t i = 0; i < yt.size(); ++i)
      worst = std::max(worst, std::fabs(yt[i]) - vv[i]);
  }
  ob.worst_violation = worst;
  if (worst > slack)
    throw certificate_error("orbit_order_bound: sampled orbit escapes [0, v] by " +
                            std::to_string(worst) + " (slack " + std::to_string(slack) + ")");
  return ob;
}

RegulatorReport test_ruc_at_zero(const SemigroupOperator& S, const RealFunction& x_positive,
                                 const RealFunction& regulator, const std::vector<double>& eps_list,
                                 const GridSpec& grid, double t_hi, int n_samples,
                                 double floor_ratio) {
  {
    const std::vector<double> xv = x_positive.eval_on(grid);
    for (std::size_t i = 0; i < xv.size(); ++i)
      if (xv[i] < -tol::zero)
        throw precondition_error("test_ruc_at_zero: x must be in the positive cone; negative at x=" +
                                 std::to_string(grid.point(static_cast<int>(i))));
  }
  FunctionFamily fam = FunctionFamily::continuum(
      0.0, t_hi, n_samples, [&S, x_positive](double h) { return S.apply(h, x_positive); },
      S.label() + "-orbit[" + x_positive.label() + "]", floor_ratio);
  return verify_ru_convergence(fam, x_positive, regulator, eps_list, grid);
}

std::optional<std::pair<RealFunction, RegulatorReport>> regulator_search(
    const SemigroupOperator& S, const RealFunction& x, const std::vector<RealFunction>& candidates,
    const std::vector<double>& eps_list, const GridSpec& grid, double t_hi, int n_samples,
    double floor_ratio) {
  if (candidates.empty()) throw precondition_error("regulator_search: no candidates");
  for (const RealFunction& u : candidates) {
    RegulatorReport rep = test_ruc_at_zero(S, x, u, eps_list, grid, t_hi, n_samples, floor_ratio);
    if (rep.converged) return std::make_pair(u, rep);
  }
  return std::nullopt;
}

GridSpec make_probe_grid(int n) {
  if (n < 4 || n % 2 != 0)
    throw precondition_error("make_probe_grid: need even n >= 4 so nodes miss the pole");
  const double h = 1.0 / static_cast<double>(n);
  return GridSpec(0.5 * h, 1.0 - 0.5 * h, n);
}

ordered_json DivergenceTable::to_json() const {
  ordered_json j;
  j["p"] = p;
  j["delta"] = delta;
  ordered_json rows_j = ordered_json::array();
  for (const DivergenceRow& r : rows)
    rows_j.push_back({{"grid_n", r.grid_n},
                      {"cell", r.cell},
                      {"closest_distance", r.closest_distance},
                      {"max_value", r.max_value}});
  j["rows"] = rows_j;
  j["strictly_increasing"] = strictly_increasing;
  j["min_growth_factor"] = min_growth_factor;
  j["unbounded_indicated"] = unbounded_indicated;
  return j;
}

std::string DivergenceTable::to_csv() const {
  std::ostringstream os;
  os.precision(17);
  os << "grid_n,max_value\n";
  for (const DivergenceRow& r : rows) os << r.grid_n << "," << r.max_value << "\n";
  return os.str();
}

DivergenceTable lp_counterexample_probe(double p, double delta,
                                        const std::vector<int>& grid_sizes) {
  if (!(p > 0.0)) throw precondition_error("lp_counterexample_probe: p must be positive");
  if (!(delta > 0.0) || !(delta < 0.5))
    throw precondition_error("lp_counterexample_probe: need 0 < delta < 1/2");
  if (grid_sizes.size() < 2)
    throw precondition_error("lp_counterexample_probe: need at least two refinements");

  const RealFunction f = rf_lp_singular(p);
  DivergenceTable table;
  table.p = p;
  table.delta = delta;

  for (int n : grid_sizes) {
    make_probe_grid(n);  // validates evenness / pole avoidance
    const double h = 1.0 / static_cast<double>(n);
    const int steps = static_cast<int>(std::floor(delta / h));
    double best = std::numeric_limits<double>::infinity();
    auto probe = [&](double t) {
      const double y = 0.5 - t;  // pole as seen from the shifted grid
      double kf = std::round(y / h - 0.5);
      kf = std::min(std::max(kf, 0.0), static_cast<double>(n - 1));
      const double d = std::fabs(y - (kf + 0.5) * h);
      if (d > 0.0 && d < best) best = d;
    };
    for (int j = 0; j < std::max(steps, 1); ++j) {
      const double t = static_cast<double>(j) * h;
      probe(t);
      probe(t + 0.5 * h - 0.5 * h * h);
    }
    DivergenceRow row;
    row.grid_n = n;
    row.cell = h;
    row.closest_distance = best;
    row.max_value = f(0.5 - best);
    table.rows.push_back(row);
  }

  table.strictly_increasing = true;
  table.min_growth_factor = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < table.rows.size(); ++i) {
    const double ratio = table.rows[i].max_value / table.rows[i - 1].max_value;
    table.min_growth_factor = std::min(table.min_growth_factor, ratio);
    if (!(table.rows[i].max_value > table.rows[i - 1].max_value)) table.strictly_increasing = false;
  }
  table.unbounded_indicated = table.strictly_increasing && table.min_growth_factor >= 2.0;
  return table;
}

}  // namespace latticeflow
