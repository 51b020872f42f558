#include "latticeflow/constructions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "latticeflow/errors.hpp"
#include "latticeflow/lattice_ops.hpp"

namespace latticeflow {

LatticeIso identity_iso() {
  auto id = [](const RealFunction& f) { return f; };
  return LatticeIso{id, id, "identity"};
}

LatticeIso warp_iso(std::function<double(double)> rho, std::function<double(double)> rho_inverse,
                    std::string label) {
  auto fwd = [rho_inverse, label](const RealFunction& f) {
    return RealFunction::closed_form("warp_fwd(" + label + ")[" + f.label() + "]",
                                     [f, rho_inverse](double x) { return f(rho_inverse(x)); },
                                     ConeFlag{f.flag().positive, std::nullopt});
  };
  auto inv = [rho, label](const RealFunction& f) {
    return RealFunction::closed_form("warp_inv(" + label + ")[" + f.label() + "]",
                                     [f, rho](double x) { return f(rho(x)); },
                                     ConeFlag{f.flag().positive, std::nullopt});
  };
  return LatticeIso{fwd, inv, "warp(" + std::move(label) + ")"};
}

LatticeIso scaling_iso(double c) {
  if (!(c > 0.0)) throw precondition_error("scaling_iso: factor must be positive");
  auto fwd = [c](const RealFunction& f) {
    return RealFunction::closed_form("scale[" + f.label() + "]", [f, c](double x) { return c * f(x); },
                                     f.flag());
  };
  auto inv = [c](const RealFunction& f) {
    return RealFunction::closed_form("unscale[" + f.label() + "]",
                                     [f, c](double x) { return f(x) / c; }, f.flag());
  };
  return LatticeIso{fwd, inv, "scaling(" + std::to_string(c) + ")"};
}

ordered_json IsoCheckReport::to_json() const {
  return ordered_json{{"roundtrip_defect", roundtrip_defect},
                      {"hom_defect", hom_defect},
                      {"positivity_dip", positivity_dip},
                      {"pass", pass}};
}

IsoCheckReport validate_iso(const LatticeIso& V, const std::vector<RealFunction>& corpus,
                            const GridSpec& grid, double tolerance) {
  if (corpus.size() < 2) throw precondition_error("validate_iso: corpus needs >= 2 functions");
  IsoCheckReport rep;
  auto sup_norm_diff = [&grid](const RealFunction& a, const RealFunction& b) {
    const std::vector<double> av = a.eval_on(grid);
    const std::vector<double> bv = b.eval_on(grid);
    double m = 0.0;
    for (std::size_t i = 0; i < av.size(); ++i) m = std::max(m, std::fabs(av[i] - bv[i]));
    return m;
  };
  for (const RealFunction& f : corpus) {
    rep.roundtrip_defect = std::max(rep.roundtrip_defect, sup_norm_diff(V.inverse(V.forward(f)), f));
    for (const RealFunction& dir_f : {V.forward(f), V.inverse(f)}) {
      if (!f.flag().positive) continue;
      const std::vector<double> v = dir_f.eval_on(grid);
      for (double y : v) rep.positivity_dip = std::max(rep.positivity_dip, -y);
    }
  }
  for (std::size_t a = 0; a < corpus.size(); ++a) {
    for (std::size_t b = a + 1; b < corpus.size(); ++b) {
      const RealFunction lhs = V.forward(rf_sup(corpus[a], corpus[b], grid));
      const RealFunction rhs = rf_sup(V.forward(corpus[a]), V.forward(corpus[b]), grid);
      rep.hom_defect = std::max(rep.hom_defect, sup_norm_diff(lhs, rhs));
    }
  }
  rep.positivity_dip = std::max(rep.positivity_dip, 0.0);
  rep.pass = rep.roundtrip_defect <= tolerance && rep.hom_defect <= tolerance &&
             rep.positivity_dip <= tolerance;
  return rep;
}

SemigroupOperator similar(const SemigroupOperator& S, const LatticeIso& V,
                          const std::vector<RealFunction>& iso_corpus, const GridSpec& grid) {
  const IsoCheckReport iso = validate_iso(V, iso_corpus, grid);
  if (!iso.pass)
    throw precondition_error("similar: '" + V.label + "' fails the lattice-iso checks (roundtrip " +
                             std::to_string(iso.roundtrip_defect) + ", hom " +
                             std::to_string(iso.hom_defect) + ")");
  auto fwd = V.forward;
  auto inv = V.inverse;
  auto base = S;
  ordered_json meta = {{"base", S.label()}, {"iso", V.label}, {"iso_check", iso.to_json()}};
  auto fn = [base, fwd, inv](double t, const RealFunction& f) {
    return inv(base.apply(t, fwd(f)));
  };
  return SemigroupOperator("similar", "similar(" + S.label() + "," + V.label + ")", fn, meta);
}

SemigroupOperator rescale(const SemigroupOperator& S, double mu, double alpha) {
  if (!(alpha > 0.0)) throw precondition_error("rescale: alpha must be positive");
  auto base = S;
  ordered_json meta = {{"base", S.label()}, {"mu", mu}, {"alpha", alpha}};
  auto fn = [base, mu, alpha](double t, const RealFunction& f) -> RealFunction {
    const RealFunction g = base.apply(alpha * t, f);
    const double c = std::exp(mu * t);
    if (c == 1.0) return g;
    const std::string label = "rescaled[" + g.label() + "]";
    ConeFlag flag = g.flag();  // c > 0 keeps the cone and the support
    if (const PiecewiseAffineFunction* pa = g.piecewise_affine())
      return RealFunction::piecewise(pa->scaled(c), label, flag);
    return RealFunction::closed_form(label, [g, c](double x) { return c * g(x); }, flag);
  };
  return SemigroupOperator("rescaled", "rescale(" + S.label() + ")", fn, meta);
}

double commutation_defect(const SemigroupOperator& S, const SemigroupOperator& R,
                          const RealFunction& f, double s, double t, const GridSpec& grid) {
  const std::vector<double> a = S.apply(t, R.apply(s, f)).eval_on(grid);
  const std::vector<double> b = R.apply(s, S.apply(t, f)).eval_on(grid);
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::fabs(a[i] - b[i]));
  return m;
}

SemigroupOperator product(const SemigroupOperator& S, const SemigroupOperator& R,
                          const std::vector<RealFunction>& corpus,
                          const std::vector<std::pair<double, double>>& commute_check_times,
                          const GridSpec& grid, double tolerance) {
  if (corpus.empty() || commute_check_times.empty())
    throw precondition_error("product: commutation check needs a corpus and time pairs");
  ordered_json checks = ordered_json::array();
  double worst = 0.0;
  for (const RealFunction& f : corpus) {
    for (const auto& [s, t] : commute_check_times) {
      const double d = commutation_defect(S, R, f, s, t, grid);
      checks.push_back({{"f", f.label()}, {"s", s}, {"t", t}, {"defect", d}});
      worst = std::max(worst, d);
    }
  }
  if (worst > tolerance)
    throw certificate_error("product: factors do not commute on the corpus (defect " +
                            std::to_string(worst) + " > " + std::to_string(tolerance) + ")");
  auto lhs = S;
  auto rhs = R;
  ordered_json meta = {{"left", S.label()},
                       {"right", R.label()},
                       {"commutation_checks", checks},
                       {"max_commutation_defect", worst},
                       {"tolerance", tolerance}};
  auto fn = [lhs, rhs](double t, const RealFunction& f) { return lhs.apply(t, rhs.apply(t, f)); };
  return SemigroupOperator("product", "product(" + S.label() + "," + R.label() + ")", fn, meta);
}

ordered_json ConditionRReport::to_json() const {
  ordered_json j;
  j["witness_verified"] = witness_verified;
  if (!lambdas.empty()) j["lambdas"] = lambdas;
  if (!bound_label.empty()) j["bound"] = bound_label;
  ordered_json rows = ordered_json::array();
  for (const FailureRow& r : failure_rows)
    rows.push_back({{"bound_index", r.bound_index},
                    {"witness_index", r.witness_index},
                    {"x", r.x},
                    {"value", r.value}});
  j["failure_rows"] = rows;
  j["supports_strictly_growing"] = supports_strictly_growing;
  j["failure_established"] = failure_established;
  return j;
}

ConditionRReport condition_r_witness(const std::vector<RealFunction>& family, const GridSpec& grid,
                                     const std::optional<RealFunction>& candidate_bound) {
  if (family.empty()) throw precondition_error("condition_r_witness: empty family");
  for (const RealFunction& u : family) {
    const std::vector<double> v = u.eval_on(grid);
    for (double y : v)
      if (y < -tol::zero)
        throw precondition_error("condition_r_witness: family member '" + u.label() +
                                 "' is not nonnegative on the grid");
  }

  ConditionRReport rep;
  if (candidate_bound) {
    rep.bound_label = candidate_bound->label();
    rep.witness_verified = true;
    for (std::size_t n = 0; n < family.size(); ++n) {
      const double norm = order_unit_norm(family[n], *candidate_bound, grid);
      const double lambda = 1.0 / std::max(1.0, norm);
      rep.lambdas.push_back(lambda);
      const DominanceResult dom =
          dominates(rf_scale(family[n], lambda, grid), *candidate_bound, grid, tol::arith);
      if (!dom.holds) {
        rep.witness_verified = false;
        rep.failure_rows.push_back({-1, static_cast<int>(n), 0.0, dom.worst_violation});
      }
    }
    return rep;
  }

  // Failure regime: compact supports that keep growing through the family.
  std::vector<SupportInterval> supports;
  for (const RealFunction& u : family) {
    if (!u.flag().compact_support)
      throw precondition_error(
          "condition_r_witness: no candidate bound and member '" + u.label() +
          "' lacks a compact-support flag");
    supports.push_back(*u.flag().compact_support);
  }
  rep.supports_strictly_growing = true;
  for (std::size_t n = 0; n + 1 < supports.size(); ++n)
    if (!(supports[n + 1].lo < supports[n].lo || supports[n + 1].hi > supports[n].hi))
      rep.supports_strictly_growing = false;

  rep.failure_established = rep.supports_strictly_growing;
  for (std::size_t m = 0; m + 1 < family.size(); ++m) {
    // Best witness against bound u_m: the largest later-member value at a
    // grid point outside supp u_m. Any positive scaling of that member stays
    // above the bound there (the bound vanishes).
    ConditionRReport::FailureRow row{static_cast<int>(m), -1, 0.0, 0.0};
    for (std::size_t n = m + 1; n < family.size(); ++n) {
      const std::vector<double> v = family[n].eval_on(grid);
      for (int i = 0; i < grid.n; ++i) {
        const double x = grid.point(i);
        if (supports[m].contains(x)) continue;
        if (v[static_cast<std::size_t>(i)] > row.value) {
          row.value = v[static_cast<std::size_t>(i)];
          row.x = x;
          row.witness_index = static_cast<int>(n);
        }
      }
      if (row.value > tol::zero) break;  // earliest escaping member
    }
    if (row.value > tol::zero)
      rep.failure_rows.push_back(row);
    else
      rep.failure_established = false;  // this member is never escaped in range
  }
  return rep;
}

}  // namespace latticeflow
