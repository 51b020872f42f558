#include "latticeflow/semiflow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "latticeflow/errors.hpp"

namespace latticeflow {

Semiflow make_shift_flow() {
  return Semiflow{[](double t, double x) { return t + x; }, "shift", 100.0};
}

Semiflow make_decay_flow(double rate) {
  if (!(rate > 0.0)) throw precondition_error("decay flow: rate must be positive");
  std::ostringstream label;
  label << "decay(" << rate << ")";
  return Semiflow{[rate](double t, double x) { return std::exp(-rate * t) * x; }, label.str(),
                  100.0};
}

Semiflow make_poly_drift_flow(int k) {
  if (k < 3 || k % 2 == 0)
    throw precondition_error("poly_drift flow: k must be odd and >= 3 (forward completeness)");
  const double km1 = static_cast<double>(k - 1);
  std::ostringstream label;
  label << "poly_drift(" << k << ")";
  return Semiflow{[km1](double t, double x) {
                    return x * std::pow(1.0 + km1 * t * std::pow(std::fabs(x), km1), -1.0 / km1);
                  },
                  label.str(), 100.0};
}

Semiflow compose_flows(const Semiflow& outer, const Semiflow& inner) {
  auto po = outer.phi;
  auto pi = inner.phi;
  return Semiflow{[po, pi](double t, double x) { return po(t, pi(t, x)); },
                  "compose(" + outer.label + "," + inner.label + ")",
                  std::min(outer.horizon, inner.horizon)};
}

namespace {

// Splits "name(arg1,arg2,...)" at top-level commas; arguments may themselves
// carry parentheses.
bool split_call(const std::string& spec, std::string& name, std::vector<std::string>& args) {
  const auto open = spec.find('(');
  if (open == std::string::npos) {
    name = spec;
    return true;
  }
  if (spec.back() != ')') return false;
  name = spec.substr(0, open);
  int depth = 0;
  std::string cur;
  for (std::size_t i = open + 1; i + 1 < spec.size(); ++i) {
    const char c = spec[i];
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == ',' && depth == 0) {
      args.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty() || !args.empty()) args.push_back(cur);
  return depth == 0;
}

}  // namespace

Semiflow semiflow_from_registry(const std::string& spec) {
  std::string name;
  std::vector<std::string> args;
  if (!split_call(spec, name, args)) throw parse_error("bad semiflow spec: " + spec);
  try {
    if (name == "shift" && args.empty()) return make_shift_flow();
    if (name == "decay" && args.size() == 1) return make_decay_flow(std::stod(args[0]));
    if (name == "poly_drift" && args.size() == 1) return make_poly_drift_flow(std::stoi(args[0]));
    if (name == "compose" && args.size() == 2)
      return compose_flows(semiflow_from_registry(args[0]), semiflow_from_registry(args[1]));
  } catch (const precondition_error&) {
    throw;
  } catch (const parse_error&) {
    throw;
  } catch (const std::exception&) {
    throw parse_error("bad semiflow arguments: " + spec);
  }
  throw parse_error("unknown semiflow: '" + spec + "'");
}

ordered_json FlowLawReport::to_json() const {
  ordered_json j;
  j["flow"] = flow_label;
  j["identity_defect"] = identity_defect;
  j["composition_defect"] = composition_defect;
  j["tolerance"] = tolerance;
  j["pass"] = pass;
  return j;
}

FlowLawReport check_semiflow_laws(const Semiflow& flow, const GridSpec& grid,
                                  const std::vector<double>& time_samples, double tolerance) {
  FlowLawReport rep;
  rep.flow_label = flow.label;
  rep.tolerance = tolerance;
  for (int i = 0; i < grid.n; ++i) {
    const double x = grid.point(i);
    rep.identity_defect = std::max(rep.identity_defect, std::fabs(flow.phi(0.0, x) - x));
  }
  for (double t : time_samples) {
    if (t < 0.0 || t > flow.horizon)
      throw precondition_error("check_semiflow_laws: time sample outside [0, horizon]");
    for (double s : time_samples) {
      if (t + s > flow.horizon) continue;
      for (int i = 0; i < grid.n; ++i) {
        const double x = grid.point(i);
        const double d = std::fabs(flow.phi(t + s, x) - flow.phi(t, flow.phi(s, x)));
        rep.composition_defect = std::max(rep.composition_defect, d);
      }
    }
  }
  rep.pass = rep.identity_defect <= tolerance && rep.composition_defect <= tolerance;
  return rep;
}

RegulatorReport check_criterion_C(const Semiflow& flow, const RealFunction& u,
                                  const std::vector<double>& eps_list, const GridSpec& grid,
                                  double t_hi, int n_samples, double floor_ratio) {
  {
    const std::vector<double> uv = u.eval_on(grid);
    for (std::size_t i = 0; i < uv.size(); ++i)
      if (!(uv[i] > 0.0))
        throw precondition_error("check_criterion_C: u must be strictly positive on the grid");
  }
  if (t_hi > flow.horizon)
    throw precondition_error("check_criterion_C: t_hi exceeds the flow horizon");
  auto phi = flow.phi;
  FunctionFamily fam = FunctionFamily::continuum(
      0.0, t_hi, n_samples,
      [phi](double h) {
        return RealFunction::closed_form("phi(h,.)", [phi, h](double x) { return phi(h, x); });
      },
      flow.label + "-displacement", floor_ratio);
  return verify_ru_convergence(fam, rf_identity(), u, eps_list, grid);
}

RegulatorReport check_criterion_LipUC(const Semiflow& flow, const std::vector<double>& eps_list,
                                      const GridSpec& grid, double t_hi, int n_samples,
                                      double floor_ratio) {
  return check_criterion_C(flow, rf_one_plus_abs(), eps_list, grid, t_hi, n_samples, floor_ratio);
}

SemigroupOperator make_koopman(const Semiflow& flow, const GridSpec& law_grid,
                               const std::vector<double>& law_times, double law_tolerance) {
  const FlowLawReport laws = check_semiflow_laws(flow, law_grid, law_times, law_tolerance);
  if (!laws.pass)
    throw precondition_error("make_koopman: '" + flow.label + "' fails the semiflow laws (identity " +
                             std::to_string(laws.identity_defect) + ", composition " +
                             std::to_string(laws.composition_defect) + ")");
  auto phi = flow.phi;
  const std::string label = "koopman[" + flow.label + "]";
  ordered_json meta = {{"flow", flow.label}, {"law_check", laws.to_json()}};
  auto fn = [phi](double t, const RealFunction& f) -> RealFunction {
    ConeFlag flag;
    flag.positive = f.flag().positive;  // composition preserves the cone
    return RealFunction::closed_form("koopman@" + std::to_string(t) + "[" + f.label() + "]",
                                     [phi, t, f](double x) { return f(phi(t, x)); }, flag);
  };
  return SemigroupOperator("koopman", label, fn, meta);
}

RealFunction max_over_orbit(const Semiflow& flow, const RealFunction& f, double s,
                            const GridSpec& grid, int t_samples) {
  if (s < 0.0 || s > flow.horizon)
    throw precondition_error("max_over_orbit: need 0 <= s <= horizon");
  if (t_samples < 1) throw precondition_error("max_over_orbit: need t samples");
  std::vector<double> g(static_cast<std::size_t>(grid.n), 0.0);
  for (int k = 0; k < t_samples; ++k) {
    const double t =
        (t_samples == 1 || s == 0.0)
            ? 0.0
            : s * static_cast<double>(k) / static_cast<double>(t_samples - 1);
    for (int i = 0; i < grid.n; ++i) {
      const double v = std::fabs(f(flow.phi(t, grid.point(i))));
      if (!std::isfinite(v)) throw eval_error("max_over_orbit: non-finite value");
      g[static_cast<std::size_t>(i)] = std::max(g[static_cast<std::size_t>(i)], v);
    }
    if (s == 0.0) break;
  }
  return RealFunction::sampled(grid, std::move(g), "orbit_max[" + f.label() + "]",
                               ConeFlag{true, std::nullopt});
}

ordered_json LpaRegulatorTrace::to_json() const {
  ordered_json j;
  ordered_json segs = ordered_json::array();
  for (const LpaSegmentTrace& s : segments)
    segs.push_back({{"j_lo", s.j_lo},
                    {"j_hi", s.j_hi},
                    {"slope", s.slope},
                    {"delta_n", s.delta_n},
                    {"M_n", s.M_n},
                    {"s_n", s.s_n},
                    {"c_n", s.c_n}});
  j["segments"] = segs;
  j["knot_x"] = knot_x;
  j["knot_d"] = knot_d;
  j["u"] = u_label;
  j["verification"] = verification.to_json();
  j["pass"] = pass;
  return j;
}

namespace {

// Grid abscissas inside [lo, hi], with the endpoints appended.
std::vector<double> segment_samples(const GridSpec& grid, double lo, double hi) {
  std::vector<double> xs;
  for (int i = 0; i < grid.n; ++i) {
    const double x = grid.point(i);
    if (x > lo && x < hi) xs.push_back(x);
  }
  xs.push_back(lo);
  xs.push_back(hi);
  return xs;
}

}  // namespace

LpaRegulatorTrace build_lpa_regulator(const Semiflow& flow, const PiecewiseAffineFunction& f,
                                      const RealFunction& u, const std::vector<double>& eps_list,
                                      const GridSpec& grid, const LpaBuildParams& params) {
  f.validate();
  if (f.knots.size() < 2)
    throw precondition_error("build_lpa_regulator: f needs at least two knots");
  // c_n takes a sup over t in [0, 1] past s_n, so the flow must stay valid
  // one unit beyond the s_n search range.
  if (!(flow.horizon > 1.0))
    throw precondition_error("build_lpa_regulator: flow horizon must exceed 1 + s_n; got horizon " +
                             std::to_string(flow.horizon));

  // Working knots: window ends bracket the interior knots, so the extension
  // segments take part in the construction as ordinary neighbors.
  std::vector<double> J;
  J.push_back(grid.x_lo);
  for (double k : f.knots)
    if (k > grid.x_lo && k < grid.x_hi) J.push_back(k);
  J.push_back(grid.x_hi);
  const int seg_count = static_cast<int>(J.size()) - 1;

  LpaRegulatorTrace trace;
  trace.u_label = u.label();
  auto phi = flow.phi;

  auto clamp_seg = [seg_count](int i) { return std::min(std::max(i, 0), seg_count - 1); };

  std::vector<double> slopes(static_cast<std::size_t>(seg_count));
  for (int n = 0; n < seg_count; ++n) {
    const double mid = 0.5 * (J[static_cast<std::size_t>(n)] + J[static_cast<std::size_t>(n) + 1]);
    // Slope of f's segment containing mid.
    const auto it = std::upper_bound(f.knots.begin(), f.knots.end(), mid);
    slopes[static_cast<std::size_t>(n)] = f.slopes[static_cast<std::size_t>(it - f.knots.begin())];
  }

  const double s_cap = flow.horizon - 1.0;
  std::vector<LpaSegmentTrace> segs(static_cast<std::size_t>(seg_count));
  for (int n = 0; n < seg_count; ++n) {
    LpaSegmentTrace st;
    st.j_lo = J[static_cast<std::size_t>(n)];
    st.j_hi = J[static_cast<std::size_t>(n) + 1];
    st.slope = slopes[static_cast<std::size_t>(n)];

    double delta_n = std::numeric_limits<double>::infinity();
    for (int i = n - 1; i <= n + 1; ++i) {
      const int ci = clamp_seg(i);
      delta_n = std::min(delta_n, 0.5 * (J[static_cast<std::size_t>(ci) + 1] -
                                         J[static_cast<std::size_t>(ci)]));
    }
    st.delta_n = delta_n;

    const std::vector<double> xs = segment_samples(grid, st.j_lo, st.j_hi);
    double M = -std::numeric_limits<double>::infinity();
    for (double x : xs) M = std::max(M, u(x));
    if (!(M > 0.0))
      throw precondition_error("build_lpa_regulator: u must be positive on every segment");
    st.M_n = M;

    // Largest s with |phi(t,x) - x| <= ratio * u(x) on the segment for all
    // t in [0, s]: log-spaced probes locate the boundary, bisection refines.
    const double ratio = st.delta_n / std::max(st.M_n, 1.0);
    auto disp_ok = [&](double t) {
      for (double x : xs)
        if (std::fabs(phi(t, x) - x) > ratio * u(x)) return false;
      return true;
    };
    const std::vector<double> probes = log_lattice(1e-6 * s_cap, s_cap, params.s_probes);
    double lo = 0.0, hi = -1.0;
    for (double t : probes) {
      if (disp_ok(t))
        lo = t;
      else {
        hi = t;
        break;
      }
    }
    if (lo == 0.0)
      throw precondition_error(
          "build_lpa_regulator: displacement certificate fails on segment [" +
          std::to_string(st.j_lo) + ", " + std::to_string(st.j_hi) + "]");
    if (hi > 0.0) {
      for (int it = 0; it < params.s_bisect; ++it) {
        const double midt = 0.5 * (lo + hi);
        (disp_ok(midt) ? lo : hi) = midt;
      }
    }
    st.s_n = lo;
    // Confirm the whole prefix [0, s_n], not just the probes.
    for (int k = 0; k <= 64; ++k) {
      const double t = st.s_n * static_cast<double>(k) / 64.0;
      if (!disp_ok(t)) {
        st.s_n = st.s_n * static_cast<double>(std::max(k - 1, 1)) / 64.0;
        break;
      }
    }

    double c_sup = 0.0;
    for (int k = 0; k < params.c_time_samples; ++k) {
      const double t = static_cast<double>(k) / static_cast<double>(params.c_time_samples - 1);
      for (double x : xs) {
        const double d = std::fabs(f(phi(st.s_n + t, x)) - f(phi(st.s_n, x)));
        c_sup = std::max(c_sup, d);
      }
    }
    st.c_n = c_sup / st.s_n;
    segs[static_cast<std::size_t>(n)] = st;
  }
  trace.segments = segs;

  // d at each working knot; the last knot reuses the final segment's data.
  trace.knot_x = J;
  trace.knot_d.resize(J.size());
  for (std::size_t k = 0; k < J.size(); ++k) {
    const int n = clamp_seg(static_cast<int>(k));
    double m = 0.0;
    for (int i = n - 1; i <= n + 1; ++i) {
      const int ci = clamp_seg(i);
      const LpaSegmentTrace& si = segs[static_cast<std::size_t>(ci)];
      m = std::max({m, std::fabs(si.slope),
                    std::fabs(si.slope - segs[static_cast<std::size_t>(n)].slope), si.c_n});
    }
    trace.knot_d[k] = std::max(segs[static_cast<std::size_t>(n)].M_n, 1.0) * m;
  }

  std::vector<std::pair<double, double>> pts;
  for (std::size_t k = 0; k < J.size(); ++k) pts.emplace_back(J[k], trace.knot_d[k]);
  trace.v = RealFunction::piecewise(PiecewiseAffineFunction::interpolating(pts), "lpa_regulator_v",
                                    ConeFlag{true, std::nullopt});

  const RealFunction f_rf = RealFunction::piecewise(f, "f");
  FunctionFamily fam = FunctionFamily::continuum(
      0.0, params.t_hi, params.family_samples,
      [phi, f_rf](double h) {
        return RealFunction::closed_form(
            "T(h)f", [phi, f_rf, h](double x) { return f_rf(phi(h, x)); });
      },
      flow.label + "-koopman-orbit[f]", params.floor_ratio);
  trace.verification = verify_ru_convergence(fam, f_rf, trace.v, eps_list, grid);
  trace.pass = trace.verification.converged;
  return trace;
}

}  // namespace latticeflow
