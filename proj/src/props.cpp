#include "latticeflow/props.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <sstream>

#include "latticeflow/constructions.hpp"
#include "latticeflow/errors.hpp"
#include "latticeflow/family.hpp"
#include "latticeflow/lattice_ops.hpp"
#include "latticeflow/ru_convergence.hpp"
#include "latticeflow/semiflow.hpp"
#include "latticeflow/semigroup.hpp"

namespace latticeflow {

GridSpec grid_from_json(const ordered_json& j) {
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    std::stringstream ss(s);
    std::string tok;
    std::vector<double> parts;
    while (std::getline(ss, tok, ',')) {
      try {
        parts.push_back(std::stod(tok));
      } catch (const std::exception&) {
        throw parse_error("bad grid spec '" + s + "' (want \"lo,hi,n\")");
      }
    }
    if (parts.size() != 3) throw parse_error("bad grid spec '" + s + "' (want \"lo,hi,n\")");
    return GridSpec(parts[0], parts[1], static_cast<int>(parts[2]));
  }
  if (j.is_object())
    return GridSpec(j.at("x_lo").get<double>(), j.at("x_hi").get<double>(), j.at("n").get<int>());
  throw parse_error("grid must be \"lo,hi,n\" or {x_lo, x_hi, n}");
}

std::vector<double> eps_from_json(const ordered_json& j) {
  if (!j.is_array() || j.empty()) throw parse_error("eps must be a nonempty array");
  return j.get<std::vector<double>>();
}

namespace {

ordered_json grid_json(const GridSpec& g) {
  return ordered_json{{"x_lo", g.x_lo}, {"x_hi", g.x_hi}, {"n", g.n}};
}

RealFunction fn_from_json(const ordered_json& j) {
  if (j.is_string()) return RealFunction::from_registry(j.get<std::string>());
  if (j.is_object()) return RealFunction::from_json(j);
  throw parse_error("function must be a registry name or a serialized object");
}

LatticeIso iso_from_json(const ordered_json& j) {
  const std::string spec = j.get<std::string>();
  std::string name = spec;
  double arg = 0.0;
  const auto open = spec.find('(');
  if (open != std::string::npos) {
    if (spec.back() != ')') throw parse_error("bad iso spec: " + spec);
    name = spec.substr(0, open);
    try {
      arg = std::stod(spec.substr(open + 1, spec.size() - open - 2));
    } catch (const std::exception&) {
      throw parse_error("bad iso argument: " + spec);
    }
  }
  if (name == "identity") return identity_iso();
  if (name == "dilation") {
    if (!(arg > 0.0)) throw parse_error("dilation iso needs a positive factor");
    // rho(x) = x / arg; conjugating translation gives speed multiplied by arg.
    return warp_iso([arg](double x) { return x / arg; }, [arg](double x) { return x * arg; },
                    "dilation(" + std::to_string(arg) + ")");
  }
  if (name == "scaling") return scaling_iso(arg);
  throw parse_error("unknown iso: '" + spec + "'");
}

SemigroupOperator operator_from_json(const ordered_json& j, const GridSpec& grid) {
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "translation") return make_translation();
    if (s == "heat") return make_heat();
    if (s.rfind("koopman:", 0) == 0) return make_koopman(semiflow_from_registry(s.substr(8)));
    throw parse_error("unknown operator: '" + s + "'");
  }
  if (!j.is_object() || !j.contains("op")) throw parse_error("operator must name an \"op\"");
  const std::string op = j.at("op").get<std::string>();
  if (op == "translation") return make_translation();
  if (op == "heat")
    return make_heat(j.value("quad_halfwidth_sigmas", 8.0), j.value("quad_points", 513));
  if (op == "koopman") return make_koopman(semiflow_from_registry(j.at("flow").get<std::string>()));
  if (op == "similar") {
    std::vector<RealFunction> corpus = {rf_hat(0.0, 1.0, 1.0), rf_gauss(1.0), rf_one()};
    return similar(operator_from_json(j.at("base"), grid), iso_from_json(j.at("iso")), corpus, grid);
  }
  if (op == "rescale")
    return rescale(operator_from_json(j.at("base"), grid), j.value("mu", 0.0), j.value("alpha", 1.0));
  if (op == "product") {
    std::vector<RealFunction> corpus = {rf_hat(0.0, 1.0, 1.0), rf_gauss(1.0)};
    if (j.contains("corpus")) {
      corpus.clear();
      for (const auto& f : j.at("corpus")) corpus.push_back(fn_from_json(f));
    }
    std::vector<std::pair<double, double>> pairs = {{0.1, 0.2}, {0.5, 0.3}};
    if (j.contains("pairs")) {
      pairs.clear();
      for (const auto& p : j.at("pairs")) pairs.emplace_back(p[0].get<double>(), p[1].get<double>());
    }
    return product(operator_from_json(j.at("left"), grid), operator_from_json(j.at("right"), grid),
                   corpus, pairs, grid, j.value("tolerance", tol::law));
  }
  throw parse_error("unknown operator op: '" + op + "'");
}

// Named families with explicit members; the limit rides along.
std::pair<FunctionFamily, RealFunction> family_from_json(const ordered_json& j) {
  if (!j.is_object() || !j.contains("kind")) throw parse_error("family must carry a \"kind\"");
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "shrinking_hats") {
    const int n_max = j.value("n_max", 12);
    auto fam = FunctionFamily::sequence(
        n_max,
        [](int n) {
          return rf_hat(0.0, 1.0, 1.0 / static_cast<double>(n))
              .with_label("hat/" + std::to_string(n));
        },
        "shrinking_hats(" + std::to_string(n_max) + ")");
    return {fam, rf_zero().with_flag(ConeFlag{true, SupportInterval{0.0, 0.0}})};
  }
  if (kind == "widening_hats") {
    const int n_max = j.value("n_max", 10);
    auto fam = FunctionFamily::sequence(
        n_max,
        [](int n) {
          const double dn = static_cast<double>(n);
          return rf_hat(0.0, dn, 1.0 / dn);
        },
        "widening_hats(" + std::to_string(n_max) + ")");
    return {fam, rf_zero().with_flag(ConeFlag{true, SupportInterval{0.0, 0.0}})};
  }
  if (kind == "constant_hat") {
    const int n_max = j.value("n_max", 8);
    const RealFunction h = rf_hat(0.0, 1.0, 1.0);
    auto fam = FunctionFamily::sequence(n_max, [h](int) { return h; },
                                        "constant_hat(" + std::to_string(n_max) + ")");
    return {fam, h};
  }
  if (kind == "translate") {
    const RealFunction f = fn_from_json(j.at("f"));
    const double t_hi = j.value("t_hi", 1.0);
    const int samples = j.value("samples", 128);
    const SemigroupOperator T = make_translation();
    auto fam = FunctionFamily::continuum(
        0.0, t_hi, samples, [T, f](double h) { return T.apply(h, f); },
        "translate[" + f.label() + "]");
    return {fam, f};
  }
  if (kind == "scaled_unit") {
    const RealFunction u = fn_from_json(j.value("u", ordered_json("one_plus_abs")));
    const int n_max = j.value("n_max", 128);
    auto fam = FunctionFamily::sequence(
        n_max,
        [u](int n) {
          const double c = 1.0 / static_cast<double>(n);
          const std::string label = u.label() + "/" + std::to_string(n);
          if (const PiecewiseAffineFunction* pa = u.piecewise_affine())
            return RealFunction::piecewise(pa->scaled(c), label, u.flag());
          return RealFunction::closed_form(label, [u, c](double x) { return c * u(x); }, u.flag());
        },
        "scaled_unit(" + u.label() + "," + std::to_string(n_max) + ")");
    return {fam, rf_zero()};
  }
  throw parse_error("unknown family kind: '" + kind + "'");
}

std::string csv_of_schedule(const RegulatorReport& rep) { return rep.to_csv(); }

using Runner = std::function<PropResult(const ordered_json&)>;

// ---------------------------------------------------------------------------
// Individual proposition runners.
// ---------------------------------------------------------------------------

PropResult run_order_unit_norm(const ordered_json& in) {
  const GridSpec grid = grid_from_json(in.value("grid", ordered_json("-100,100,20001")));
  const RealFunction f = fn_from_json(in.value("f", ordered_json("identity")));
  const RealFunction g = fn_from_json(in.value("g", ordered_json("abs")));
  const RealFunction u = fn_from_json(in.value("u", ordered_json("one_plus_abs")));
  const double nf = order_unit_norm(f, u, grid);
  const double ng = order_unit_norm(g, u, grid);
  const double lambda = -2.5;
  const double homog =
      std::fabs(order_unit_norm(rf_scale(f, lambda, grid), u, grid) - std::fabs(lambda) * nf);
  const double nsum = order_unit_norm(rf_add(f, g, grid), u, grid);
  const double subadd = std::max(0.0, nsum - (nf + ng));
  PropResult res;
  res.pass = homog <= tol::arith && subadd <= tol::arith;
  res.report = {{"config", {{"grid", grid_json(grid)}, {"f", f.label()}, {"g", g.label()}, {"u", u.label()}}},
                {"norm_f", nf},
                {"norm_g", ng},
                {"norm_sum", nsum},
                {"homogeneity_defect", homog},
                {"subadditivity_excess", subadd},
                {"pass", res.pass}};
  return res;
}

PropResult run_cc_characterization(const ordered_json& in) {
  const GridSpec grid = grid_from_json(in.value("grid", ordered_json("-50,50,20001")));
  auto [fam, limit] = family_from_json(in.value("family", ordered_json{{"kind", "shrinking_hats"}}));
  const bool expect = in.value("expect_verdict", true);
  const CcReport rep = check_cc_characterization(fam, limit, grid);
  PropResult res;
  res.pass = rep.verdict == expect;
  res.report = {{"config",
                 {{"grid", grid_json(grid)}, {"family", fam.label}, {"expect_verdict", expect}}},
                {"check", rep.to_json()},
                {"pass", res.pass}};
  return res;
}

PropResult run_lpa_density(const ordered_json& in) {
  const GridSpec grid = grid_from_json(in.value("grid", ordered_json("-50,50,20001")));
  const RealFunction f = fn_from_json(in.value("f", ordered_json("gauss(10)")));
  std::vector<int> budgets = in.value("budgets", std::vector<int>{9, 17, 33, 65, 129});
  // Lipschitz constant estimated from grid difference quotients.
  const std::vector<double> fv = f.eval_on(grid);
  double lip = 0.0;
  for (std::size_t i = 0; i + 1 < fv.size(); ++i)
    lip = std::max(lip, std::fabs(fv[i + 1] - fv[i]) / grid.spacing());
  ordered_json rows = ordered_json::array();
  std::ostringstream csv;
  csv.precision(17);
  csv << "budget,sup_error,bound\n";
  bool decreasing = true, bounded = true;
  double prev = std::numeric_limits<double>::infinity();
  for (int m : budgets) {
    const LpaApproxResult r = lpa_approximate(f, m, grid);
    const double bound = lip * grid.width() / static_cast<double>(m - 1);
    rows.push_back({{"budget", m}, {"sup_error", r.sup_error}, {"bound", bound}});
    csv << m << "," << r.sup_error << "," << bound << "\n";
    if (r.sup_error > prev + tol::arith) decreasing = false;
    if (r.sup_error > bound + tol::arith) bounded = false;
    prev = r.sup_error;
  }
  PropResult res;
  res.pass = decreasing && bounded;
  res.report = {{"config", {{"grid", grid_json(grid)}, {"f", f.label()}, {"budgets", budgets},
                            {"lipschitz_estimate", lip}}},
                {"rows", rows},
                {"error_decreasing", decreasing},
                {"within_lipschitz_bound", bounded},
                {"pass", res.pass}};
  res.csv = {{"lpa_density.csv", csv.str()}};
  return res;
}

PropResult run_translation_cc(const ordered_json& in) {
  const GridSpec grid = grid_from_json(in.value("grid", ordered_json("-50,50,20001")));
  const std::vector<double> eps = eps_from_json(in.value("eps", ordered_json{0.5, 0.1, 0.01}));
  std::vector<std::string> hats =
      in.value("hats", std::vector<std::string>{"hat(0,1,1)", "hat(2,0.5,2)", "hat(-3,2,0.5)"});
  const double t_hi = in.value("t_hi", 1.0);
  const int samples = in.value("samples", 128);
  PropResult res;
  res.pass = true;
  ordered_json per_hat = ordered_json::array();
  for (const std::string& spec : hats) {
    ordered_json famj = {{"kind", "translate"}, {"f", spec}, {"t_hi", t_hi}, {"samples", samples}};
    auto [fam, limit] = family_from_json(famj);
    const RegulatorReport ru = verify_ru_convergence(fam, limit, rf_one(), eps, grid);
    const CcReport cc = check_cc_characterization(fam, limit, grid);
    per_hat.push_back({{"f", spec}, {"ru", ru.to_json()}, {"cc", cc.to_json()}});
    if (!ru.converged || !cc.verdict) res.pass = false;
  }
  auto [wfam, wlimit] = family_from_json(ordered_json{{"kind", "widening_hats"}, {"n_max", 10}});
  const CcReport widening = check_cc_characterization(wfam, wlimit, grid);
  if (widening.verdict) res.pass = false;  // growing supports must be caught
  res.report = {{"config", {{"grid", grid_json(grid)}, {"eps", eps}, {"hats", hats},
                            {"t_hi", t_hi}, {"samples", samples}}},
                {"per_hat", per_hat},
                {"widening_family", widening.to_json()},
                {"pass", res.pass}};
  return res;
}

// Gamma at integers and half-integers by the recurrence from 1 and sqrt(pi);
// an oracle independent of the library gamma routine.
double gamma_half_integer(int twice_n) {
  if (twice_n <= 0) throw precondition_error("gamma oracle: argument must be positive");
  if (twice_n % 2 == 0) {
    double g = 1.0;  // Gamma(1)
    for (int k = 1; k < twice_n / 2; ++k) g *= static_cast<double>(k);
    return g;
  }
  double g = std::sqrt(M_PI);  // Gamma(1/2)
  for (int k = 1; k < twice_n; k += 2) g *= static_cast<double>(k) / 2.0;
  return g;
}

PropResult run_heat_constants(const ordered_json& in) {
  std::vector<int> ns = in.value("N_list", std::vector<int>{1, 2, 3, 4, 5});
  ordered_json rows = ordered_json::array();
  std::ostringstream csv;
  csv.precision(17);
  csv << "N,C_N,oracle,abs_err\n";
  bool pass = true;
  for (int N : ns) {
    const double got = gamma_constant(N);
    const double oracle = 2.0 * gamma_half_integer(N + 1) / gamma_half_integer(N);
    const double err = std::fabs(got - oracle);
    rows.push_back({{"N", N}, {"C_N", got}, {"oracle", oracle}, {"abs_err", err}});
    csv << N << "," << got << "," << oracle << "," << err << "\n";
    if (err > 1e-10) pass = false;
  }
  PropResult res;
  res.pass = pass;
  res.report = {{"config", {{"N_list", ns}}}, {"rows", rows}, {"pass", pass}};
  res.csv = {{"heat_constants.csv", csv.str()}};
  return res;
}

PropResult run_heat_moments(const ordered_json& in) {
  const GridSpec grid = grid_from_json(in.value("grid", ordered_json("-10,10,2001")));
  std::vector<double> ts = in.value("t_list", std::vector<double>{0.01, 0.1, 1.0});
  const SemigroupOperator heat = make_heat(in.value("quad_halfwidth_sigmas", 8.0),
                                           in.value("quad_points", 513));
  const RealFunction one = rf_one();
  const RealFunction ident = rf_identity();
  const RealFunction sq = RealFunction::from_registry("square");
  ordered_json rows = ordered_json::array();
  std::ostringstream csv;
  csv.precision(17);
  csv << "t,mass_defect,first_moment_defect,second_moment_defect\n";
  bool pass = true;
  for (double t : ts) {
    const std::vector<double> m0 = heat.apply(t, one).eval_on(grid);
    const std::vector<double> m1 = heat.apply(t, ident).eval_on(grid);
    const std::vector<double> m2 = heat.apply(t, sq).eval_on(grid);
    double d0 = 0.0, d1 = 0.0, d2 = 0.0;
    for (int i = 0; i < grid.n; ++i) {
      const double x = grid.point(i);
      d0 = std::max(d0, std::fabs(m0[static_cast<std::size_t>(i)] - 1.0));
      d1 = std::max(d1, std::fabs(m1[static_cast<std::size_t>(i)] - x));
      d2 = std::max(d2, std::fabs(m2[static_cast<std::size_t>(i)] - (x * x + 2.0 * t)));
    }
    rows.push_back({{"t", t}, {"mass_defect", d0}, {"first_moment_defect", d1},
                    {"second_moment_defect", d2}});
    csv << t << "," << d0 << "," << d1 << "," << d2 << "\n";
    if (d0 > tol::quad || d1 > tol::quad || d2 > 1e-6) pass = false;
  }
  PropResult res;
  res.pass = pass;
  res.report = {{"config", {{"grid", grid_json(grid)}, {"t_list", ts},
                            {"heat", make_heat().metadata()}}},
                {"rows", rows},
                {"pass", pass}};
  res.csv = {{"heat_moments.csv", csv.str()}};
  return res;
}

PropResult run_heat_ruc(const ordered_json& in) {
  const GridSpec grid = grid_from_json(in.value("grid", ordered_json("-50,50,2001")));
  const std::vector<double> eps = eps_from_json(in.value("eps", ordered_json{0.5, 0.1, 0.05}));
  const RealFunction f = fn_from_json(in.value("f", ordered_json("clip_one_plus_abs(51)")));
  const SemigroupOperator heat = make_heat();
  const RegulatorReport rep =
      test_ruc_at_zero(heat, f, rf_one(), eps, grid, in.value("t_hi", 1.0),
                       in.value("samples", 256));
  // Guaranteed threshold from the convolution modulus bound: with Lipschitz
  // constant L the displacement obeys |f(x+y)-f(y)| <= (eps/2)(|x|/d + 1) for
  // d = eps/(2L), and the convolution then stays within eps*1 for
  // h <= d^2 / C_1^2.
  const std::vector<double> fv = f.eval_on(grid);
  double lip = 0.0;
  for (std::size_t i = 0; i + 1 < fv.size(); ++i)
    lip = std::max(lip, std::fabs(fv[i + 1] - fv[i]) / grid.spacing());
  const double c1 = gamma_constant(1);
  ordered_json rows = ordered_json::array();
  std::ostringstream csv;
  csv.precision(17);
  csv << "eps,delta,guaranteed_bound\n";
  bool pass = rep.converged;
  for (const EpsRow& row : rep.schedule) {
    const double d_mod = row.eps / (2.0 * lip);
    const double bound = d_mod * d_mod / (c1 * c1);
    rows.push_back({{"eps", row.eps}, {"delta", row.threshold}, {"guaranteed_bound", bound}});
    csv << row.eps << "," << row.threshold << "," << bound << "\n";
    if (!row.attained || row.threshold < bound) pass = false;
  }
  PropResult res;
  res.pass = pass;
  res.report = {{"config", {{"grid", grid_json(grid)}, {"eps", eps}, {"f", f.label()},
                            {"lipschitz_estimate", lip}, {"C_1", c1}}},
                {"schedule", rep.to_json()},
                {"rows", rows},
                {"pass", pass}};
  res.csv = {{"heat_ruc.csv", csv.str()}};
  return res;
}

PropResult run_lp_probe(const ordered_json& in) {
  const double p = in.value("p", 1.0);
  const double delta = in.value("delta", 0.25);
  std::vector<int> grids = in.value("grids", std::vector<int>{1000, 10000, 100000});
  const DivergenceTable table = lp_counterexample_probe(p, delta, grids);
  PropResult res;
  res.pass = table.unbounded_indicated;
  res.report = {{"config", {{"p", p}, {"delta", delta}, {"grids", grids}}},
                {"table", table.to_json()},
                {"pass", res.pass}};
  res.csv = {{"lp_probe.csv", table.to_csv()}};
  return res;
}

PropResult run_orbit_bound(const ordered_json& in) {
  const GridSpec grid = grid_from_json(in.value("grid", ordered_json("-50,50,2001")));
  const SemigroupOperator S = operator_from_json(in.value("op", ordered_json("translation")), grid);
  const RealFunction x = fn_from_json(in.value("x", ordered_json("hat(0,1,1)")));
  const RealFunction u = fn_from_json(in.value("u", ordered_json("one")));
  const double s = in.value("s", 2.0);
  const double delta = in.value("delta", 0.5);
  PropResult res;
  ordered_json body;
  try {
    const OrbitBound ob = orbit_order_bound(S, x, u, s, delta, grid, in.value("slack", 1e-8),
                                            in.value("orbit_samples", 64));
    body = ob.to_json();
    res.pass = true;
  } catch (const certificate_error& e) {
    body = {{"error", e.what()}};
    res.pass = false;
  }
  res.report = {{"config", {{"grid", grid_json(grid)}, {"op", S.label()}, {"x", x.label()},
                            {"u", u.label()}, {"s", s}, {"delta", delta}}},
                {"orbit_bound", body},
                {"pass", res.pass}};
  return res;
}

PropResult run_ruc_at_zero(const ordered_json& in) {
  const GridSpec grid = grid_from_json(in.value("grid", ordered_json("-50,50,2001")));
  const SemigroupOperator S = operator_from_json(in.value("op", ordered_json("translation")), grid);
  const RealFunction x = fn_from_json(in.value("x", ordered_json("hat(0,1,1)")));
  const RealFunction u = fn_from_json(in.value("regulator", ordered_json("one")));
  const std::vector<double> eps = eps_from_json(in.value("eps", ordered_json{0.5, 0.1, 0.01}));
  const RegulatorReport rep = test_ruc_at_zero(S, x, u, eps, grid, in.value("t_hi", 1.0),
                                               in.value("samples", 256));
  PropResult res;
  res.pass = rep.converged;
  res.report = {{"config", {{"grid", grid_json(grid)}, {"op", S.label()}, {"x", x.label()},
                            {"regulator", u.label()}, {"eps", eps}}},
                {"schedule", rep.to_json()},
                {"pass", res.pass}};
  res.csv = {{"ruc_schedule.csv", csv_of_schedule(rep)}};
  return res;
}

PropResult run_semigroup_law(const ordered_json& in) {
  const GridSpec grid = grid_from_json(in.value("grid", ordered_json("-50,50,1001")));
  const SemigroupOperator S = operator_from_json(in.value("op", ordered_json("translation")), grid);
  const RealFunction f = fn_from_json(in.value("f", ordered_json("gauss(1)")));
  std::vector<std::pair<double, double>> pairs = {{0.1, 0.2}, {0.0, 0.7}, {0.5, 0.5}};
  if (in.contains("pairs")) {
    pairs.clear();
    for (const auto& p : in.at("pairs")) pairs.emplace_back(p[0].get<double>(), p[1].get<double>());
  }
  const LawReport rep = check_semigroup_law(S, f, pairs, grid, in.value("tolerance", tol::law));
  std::ostringstream csv;
  csv.precision(17);
  csv << "s,t,defect\n";
  for (const LawRow& r : rep.rows) csv << r.s << "," << r.t << "," << r.defect << "\n";
  PropResult res;
  res.pass = rep.pass;
  res.report = {{"config", {{"grid", grid_json(grid)}, {"op", S.label()}, {"f", f.label()}}},
                {"law", rep.to_json()},
                {"pass", res.pass}};
  res.csv = {{"semigroup_law.csv", csv.str()}};
  return res;
}

PropResult run_semiflow_laws(const ordered_json& in) {
  const GridSpec grid = grid_from_json(in.value("grid", ordered_json("-50,50,2001")));
  const Semiflow flow = semiflow_from_registry(in.value("flow", std::string("decay(1.0)")));
  std::vector<double> times = in.value("times", std::vector<double>{0.1, 0.25, 0.5, 1.0});
  const FlowLawReport rep = check_semiflow_laws(flow, grid, times);
  PropResult res;
  res.pass = rep.pass;
  res.report = {{"config", {{"grid", grid_json(grid)}, {"flow", flow.label}, {"times", times}}},
                {"laws", rep.to_json()},
                {"pass", res.pass}};
  return res;
}

PropResult run_criterion_c(const ordered_json& in) {
  const GridSpec grid = grid_from_json(in.value("grid", ordered_json("-50,50,20001")));
  const Semiflow flow = semiflow_from_registry(in.value("flow", std::string("shift")));
  const RealFunction u = fn_from_json(in.value("u", ordered_json("one")));
  const std::vector<double> eps = eps_from_json(in.value("eps", ordered_json{0.5, 0.1}));
  const RegulatorReport rep =
      check_criterion_C(flow, u, eps, grid, in.value("t_hi", 1.0), in.value("samples", 256),
                        in.value("floor_ratio", 1e-6));
  PropResult res;
  res.pass = rep.converged;
  res.report = {{"config", {{"grid", grid_json(grid)}, {"flow", flow.label}, {"u", u.label()},
                            {"eps", eps}}},
                {"schedule", rep.to_json()},
                {"pass", res.pass}};
  res.csv = {{"criterion_c.csv", csv_of_schedule(rep)}};
  return res;
}

PropResult run_criterion_lipuc(const ordered_json& in) {
  const GridSpec grid = grid_from_json(in.value("grid", ordered_json("-50,50,20001")));
  const Semiflow flow = semiflow_from_registry(in.value("flow", std::string("shift")));
  const std::vector<double> eps = eps_from_json(in.value("eps", ordered_json{0.5, 0.1}));
  const RegulatorReport rep =
      check_criterion_LipUC(flow, eps, grid, in.value("t_hi", 1.0), in.value("samples", 256),
                            in.value("floor_ratio", 1e-6));
  PropResult res;
  res.pass = rep.converged;
  res.report = {{"config", {{"grid", grid_json(grid)}, {"flow", flow.label}, {"eps", eps}}},
                {"schedule", rep.to_json()},
                {"pass", res.pass}};
  res.csv = {{"criterion_lipuc.csv", csv_of_schedule(rep)}};
  return res;
}

PropResult run_koopman_vs_translation(const ordered_json& in) {
  const GridSpec grid = grid_from_json(in.value("grid", ordered_json("-50,50,2001")));
  const SemigroupOperator K = make_koopman(make_shift_flow());
  const SemigroupOperator T = make_translation();
  std::vector<std::string> corpus =
      in.value("corpus", std::vector<std::string>{"hat(0,1,1)", "gauss(1)", "identity"});
  std::vector<double> times = in.value("times", std::vector<double>{0.0, 0.3, 1.0});
  double worst = 0.0;
  for (const std::string& spec : corpus) {
    const RealFunction f = RealFunction::from_registry(spec);
    for (double t : times) {
      const std::vector<double> a = K.apply(t, f).eval_on(grid);
      const std::vector<double> b = T.apply(t, f).eval_on(grid);
      for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::fabs(a[i] - b[i]));
    }
  }
  PropResult res;
  res.pass = worst <= tol::arith;
  res.report = {{"config", {{"grid", grid_json(grid)}, {"corpus", corpus}, {"times", times}}},
                {"max_pointwise_gap", worst},
                {"pass", res.pass}};
  return res;
}

PropResult run_max_over_orbit(const ordered_json& in) {
  const GridSpec grid = grid_from_json(in.value("grid", ordered_json("-50,50,2001")));
  const Semiflow flow = semiflow_from_registry(in.value("flow", std::string("shift")));
  const RealFunction f = fn_from_json(in.value("f", ordered_json("hat(0,1,1)")));
  const double s = in.value("s", 1.0);
  const int t_samples = in.value("t_samples", 64);
  const RealFunction g = max_over_orbit(flow, f, s, grid, t_samples);
  const SemigroupOperator K = make_koopman(flow);
  double worst = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < t_samples; ++k) {
    const double t = t_samples == 1 ? 0.0
                                    : s * static_cast<double>(k) / static_cast<double>(t_samples - 1);
    const DominanceResult dom = dominates(rf_abs_of(K.apply(t, f), grid), g, grid, tol::arith);
    worst = std::max(worst, dom.worst_violation);
  }
  PropResult res;
  res.pass = worst <= tol::arith;
  res.report = {{"config", {{"grid", grid_json(grid)}, {"flow", flow.label}, {"f", f.label()},
                            {"s", s}, {"t_samples", t_samples}}},
                {"worst_violation", worst},
                {"pass", res.pass}};
  return res;
}

PropResult run_lpa_regulator(const ordered_json& in) {
  const GridSpec grid = grid_from_json(in.value("grid", ordered_json("-50,50,20001")));
  const Semiflow flow = semiflow_from_registry(in.value("flow", std::string("shift")));
  const RealFunction f = fn_from_json(in.value("f", ordered_json("hat(0,1,1)")));
  const RealFunction u = fn_from_json(in.value("u", ordered_json("one")));
  const std::vector<double> eps = eps_from_json(in.value("eps", ordered_json{0.5, 0.1}));
  if (!f.is_piecewise_affine())
    throw precondition_error("lpa_regulator: f must be piecewise affine");
  const LpaRegulatorTrace trace = build_lpa_regulator(flow, *f.piecewise_affine(), u, eps, grid);
  PropResult res;
  res.pass = trace.pass;
  res.report = {{"config", {{"grid", grid_json(grid)}, {"flow", flow.label}, {"f", f.label()},
                            {"u", u.label()}, {"eps", eps}}},
                {"trace", trace.to_json()},
                {"pass", res.pass}};
  res.csv = {{"lpa_regulator.csv", csv_of_schedule(trace.verification)}};
  return res;
}

// Shared corpus checks for the constructed semigroups. Law defects are
// measured on smooth corpus members: a kink under two stacked quadratures
// costs ~1e-4 at the default stencil, which would drown the 1e-6 law budget
// in discretization error. Positivity is checked on the kinked members too.
ordered_json construction_checks(const SemigroupOperator& S, const GridSpec& grid, bool& pass,
                                 double law_tolerance) {
  const std::vector<RealFunction> law_corpus = {rf_gauss(1.0), rf_one()};
  const std::vector<RealFunction> cone_corpus = {rf_hat(0.0, 1.0, 1.0), rf_gauss(1.0), rf_one()};
  const std::vector<std::pair<double, double>> pairs = {{0.1, 0.2}, {0.0, 0.5}, {0.4, 0.4}};
  ordered_json laws = ordered_json::array();
  double max_defect = 0.0;
  for (const RealFunction& f : law_corpus) {
    const LawReport rep = check_semigroup_law(S, f, pairs, grid, law_tolerance);
    laws.push_back(rep.to_json());
    max_defect = std::max(max_defect, rep.max_defect);
  }
  const double dip = positivity_dip(S, cone_corpus, {0.0, 0.3, 0.9}, grid);
  pass = max_defect <= law_tolerance && dip <= tol::arith;
  return ordered_json{{"max_law_defect", max_defect}, {"positivity_dip", dip}, {"laws", laws}};
}

PropResult run_similar(const ordered_json& in) {
  const GridSpec grid = grid_from_json(in.value("grid", ordered_json("-50,50,1001")));
  ordered_json op_spec = {{"op", "similar"},
                          {"base", in.value("base", ordered_json("translation"))},
                          {"iso", in.value("iso", ordered_json("dilation(2)"))}};
  const SemigroupOperator S = operator_from_json(op_spec, grid);
  PropResult res;
  const ordered_json checks = construction_checks(S, grid, res.pass, in.value("tolerance", tol::law));
  res.report = {{"config", {{"grid", grid_json(grid)}, {"op", op_spec}}},
                {"metadata", S.metadata()},
                {"checks", checks},
                {"pass", res.pass}};
  return res;
}

PropResult run_rescaled(const ordered_json& in) {
  const GridSpec grid = grid_from_json(in.value("grid", ordered_json("-50,50,1001")));
  const double mu = in.value("mu", std::log(2.0));
  const double alpha = in.value("alpha", 2.0);
  const SemigroupOperator base =
      operator_from_json(in.value("base", ordered_json("translation")), grid);
  const SemigroupOperator S = rescale(base, mu, alpha);
  PropResult res;
  bool law_ok = false;
  const ordered_json checks = construction_checks(S, grid, law_ok, in.value("tolerance", tol::law));
  // Composition identity: rescaling twice collapses to one rescaling.
  const SemigroupOperator twice = rescale(rescale(base, 0.3, 1.5), -0.2, 2.0);
  const SemigroupOperator once = rescale(base, 0.3 * 2.0 + (-0.2), 1.5 * 2.0);
  double comp_gap = 0.0;
  const RealFunction probe = rf_gauss(1.0);
  for (double t : {0.25, 0.8}) {
    const std::vector<double> a = twice.apply(t, probe).eval_on(grid);
    const std::vector<double> b = once.apply(t, probe).eval_on(grid);
    for (std::size_t i = 0; i < a.size(); ++i) comp_gap = std::max(comp_gap, std::fabs(a[i] - b[i]));
  }
  res.pass = law_ok && comp_gap <= tol::arith;
  res.report = {{"config", {{"grid", grid_json(grid)}, {"base", base.label()}, {"mu", mu},
                            {"alpha", alpha}}},
                {"checks", checks},
                {"rescale_composition_gap", comp_gap},
                {"pass", res.pass}};
  return res;
}

PropResult run_product(const ordered_json& in) {
  const GridSpec grid = grid_from_json(in.value("grid", ordered_json("-50,50,1001")));
  const bool expect_commute = in.value("expect_commute", true);
  ordered_json op_spec = {{"op", "product"},
                          {"left", in.value("left", ordered_json("heat"))},
                          {"right", in.value("right", ordered_json("translation"))}};
  if (in.contains("pairs")) op_spec["pairs"] = in.at("pairs");
  PropResult res;
  try {
    const SemigroupOperator S = operator_from_json(op_spec, grid);
    bool law_ok = false;
    const ordered_json checks =
        construction_checks(S, grid, law_ok, in.value("tolerance", tol::law));
    res.pass = expect_commute && law_ok;
    res.report = {{"config", {{"grid", grid_json(grid)}, {"op", op_spec},
                              {"expect_commute", expect_commute}}},
                  {"metadata", S.metadata()},
                  {"checks", checks},
                  {"pass", res.pass}};
  } catch (const certificate_error& e) {
    res.pass = !expect_commute;
    res.report = {{"config", {{"grid", grid_json(grid)}, {"op", op_spec},
                              {"expect_commute", expect_commute}}},
                  {"commutation_error", e.what()},
                  {"pass", res.pass}};
  }
  return res;
}

PropResult run_condition_r(const ordered_json& in) {
  const GridSpec grid = grid_from_json(in.value("grid", ordered_json("-50,50,20001")));
  const std::string family_kind = in.value("family", std::string("plateaus"));
  const int count = in.value("count", 10);
  std::vector<RealFunction> family;
  if (family_kind == "plateaus") {
    for (int n = 1; n <= count; ++n) family.push_back(rf_plateau(static_cast<double>(n)));
  } else if (family_kind == "scaled_constants") {
    for (int n = 1; n <= count; ++n) family.push_back(rf_const(static_cast<double>(n)));
  } else {
    throw parse_error("condition_r: unknown family '" + family_kind + "'");
  }
  std::optional<RealFunction> candidate;
  if (in.contains("candidate") && !in.at("candidate").is_null())
    candidate = fn_from_json(in.at("candidate"));
  const ConditionRReport rep = condition_r_witness(family, grid, candidate);
  PropResult res;
  res.pass = candidate ? rep.witness_verified : rep.failure_established;
  res.report = {{"config", {{"grid", grid_json(grid)}, {"family", family_kind}, {"count", count},
                            {"candidate", candidate ? candidate->label() : "none"}}},
                {"witness", rep.to_json()},
                {"pass", res.pass}};
  return res;
}

PropResult run_regulator_search(const ordered_json& in) {
  const GridSpec grid = grid_from_json(in.value("grid", ordered_json("-50,50,2001")));
  const SemigroupOperator S = operator_from_json(in.value("op", ordered_json("translation")), grid);
  const RealFunction x = fn_from_json(in.value("x", ordered_json("hat(0,1,1)")));
  const std::vector<double> eps = eps_from_json(in.value("eps", ordered_json{0.5, 0.1}));
  std::vector<RealFunction> candidates;
  for (const auto& c : in.value("candidates", ordered_json{"one", "one_plus_abs"}))
    candidates.push_back(fn_from_json(c));
  const bool expect_found = in.value("expect_found", true);
  const auto found = regulator_search(S, x, candidates, eps, grid, in.value("t_hi", 1.0),
                                      in.value("samples", 256), in.value("floor_ratio", 1e-6));
  PropResult res;
  res.pass = found.has_value() == expect_found;
  res.report = {{"config", {{"grid", grid_json(grid)}, {"op", S.label()}, {"x", x.label()},
                            {"eps", eps}, {"expect_found", expect_found}}},
                {"found", found.has_value()},
                {"regulator", found ? found->first.label() : "none"},
                {"pass", res.pass}};
  if (found) res.report["schedule"] = found->second.to_json();
  return res;
}

const std::map<std::string, Runner>& runner_map() {
  static const std::map<std::string, Runner> m = {
      {"order_unit_norm", run_order_unit_norm},
      {"cc_characterization", run_cc_characterization},
      {"lpa_density", run_lpa_density},
      {"translation_cc", run_translation_cc},
      {"heat_constants", run_heat_constants},
      {"heat_moments", run_heat_moments},
      {"heat_ruc", run_heat_ruc},
      {"lp_probe", run_lp_probe},
      {"orbit_bound", run_orbit_bound},
      {"ruc_at_zero", run_ruc_at_zero},
      {"regulator_search", run_regulator_search},
      {"semigroup_law", run_semigroup_law},
      {"semiflow_laws", run_semiflow_laws},
      {"criterion_c", run_criterion_c},
      {"criterion_lipuc", run_criterion_lipuc},
      {"koopman_vs_translation", run_koopman_vs_translation},
      {"max_over_orbit", run_max_over_orbit},
      {"lpa_regulator", run_lpa_regulator},
      {"similar", run_similar},
      {"rescaled", run_rescaled},
      {"product", run_product},
      {"condition_r", run_condition_r},
  };
  return m;
}

}  // namespace

const std::vector<PropSpec>& prop_registry() {
  static const std::vector<PropSpec> registry = {
      {"order_unit_norm",
       "norm from an order unit as a grid supremum: absolutely homogeneous and subadditive", ""},
      {"cc_characterization",
       "convergence with a regulator in the compactly-supported space equals uniform convergence "
       "plus an eventually common support",
       ""},
      {"lpa_density",
       "piecewise-affine interpolants approximate continuous functions with error <= L*W/(m-1)",
       "budget,sup_error,bound"},
      {"translation_cc",
       "the left translation semigroup is continuous with regulator 1 on compactly supported "
       "functions; growing supports break the common-support half",
       ""},
      {"heat_constants",
       "absolute first moment of the unit Gaussian kernel: 2*Gamma((N+1)/2)/Gamma(N/2)",
       "N,C_N,oracle,abs_err"},
      {"heat_moments", "Gaussian convolution preserves mass and adds 2t to the second moment",
       "t,mass_defect,first_moment_defect,second_moment_defect"},
      {"heat_ruc",
       "heat orbits leave the identity no faster than the modulus bound: measured delta(eps) >= "
       "delta_mod(eps)^2 / C_1^2",
       "eps,delta,guaranteed_bound"},
      {"lp_probe",
       "sampled orbit supremum of the translated inverse-square-root profile grows without bound "
       "under grid refinement",
       "grid_n,max_value"},
      {"orbit_bound",
       "the finite lattice supremum of T(delta)^k(|x|+u) dominates every sampled orbit point", ""},
      {"ruc_at_zero", "continuity at zero with an explicit regulator: per-eps threshold schedule",
       "eps,threshold"},
      {"regulator_search", "first regulator from a candidate list that certifies continuity at zero",
       ""},
      {"semigroup_law", "T(s+t) = T(t)T(s) on the corpus within tolerance", "s,t,defect"},
      {"semiflow_laws", "phi(0,x) = x and phi(t+s,x) = phi(t,phi(s,x)) on the grid", ""},
      {"criterion_c", "displacement criterion |phi(h,x)-x| <= eps*u(x) with per-eps thresholds",
       "eps,threshold"},
      {"criterion_lipuc", "displacement criterion against the fixed order unit 1+|x|",
       "eps,threshold"},
      {"koopman_vs_translation",
       "the composition operator of the shift flow equals the translation operator", ""},
      {"max_over_orbit",
       "the orbit maximum g(x) = max_t |f(phi(t,x))| dominates every sampled composition orbit",
       ""},
      {"lpa_regulator",
       "the constructed piecewise-affine regulator v validates |T(h)f - f| <= eps*v on the grid",
       "eps,threshold"},
      {"similar", "conjugation by a lattice isomorphism preserves the semigroup laws and the cone",
       ""},
      {"rescaled",
       "e^{mu t} T(alpha t) is again a semigroup; two rescalings collapse to one", ""},
      {"product",
       "the pointwise product of commuting semigroups is a semigroup; non-commuting factors are "
       "rejected",
       ""},
      {"condition_r",
       "scalar rescaling order-boundedness: verified witness for dominated families, escape "
       "evidence for growing plateaus",
       ""},
  };
  return registry;
}

ordered_json default_inputs(const std::string& prop_id) {
  if (runner_map().find(prop_id) == runner_map().end())
    throw parse_error("unknown proposition id: '" + prop_id + "'");
  return ordered_json::object();
}

PropResult run_prop(const std::string& id, const ordered_json& inputs) {
  const auto it = runner_map().find(id);
  if (it == runner_map().end()) throw parse_error("unknown proposition id: '" + id + "'");
  PropResult res = it->second(inputs);
  ordered_json wrapped;
  wrapped["prop"] = id;
  wrapped["verdict"] = res.pass ? "pass" : "fail";
  wrapped["inputs"] = inputs;
  wrapped["result"] = res.report;
  res.report = wrapped;
  return res;
}

PropResult run_job_document(const ordered_json& job) {
  if (!job.is_object() || !job.contains("prop"))
    throw parse_error("job document must carry a \"prop\" id");
  ordered_json inputs = job.value("inputs", ordered_json::object());
  if (job.contains("grid")) inputs["grid"] = job.at("grid");
  if (job.contains("eps")) inputs["eps"] = job.at("eps");
  return run_prop(job.at("prop").get<std::string>(), inputs);
}

}  // namespace latticeflow
