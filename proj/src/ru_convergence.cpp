#include "latticeflow/ru_convergence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "latticeflow/errors.hpp"

namespace latticeflow {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_eps_list(const std::vector<double>& eps_list) {
  if (eps_list.empty()) throw precondition_error("eps schedule must be nonempty");
  for (std::size_t i = 0; i < eps_list.size(); ++i) {
    if (!(eps_list[i] > 0.0)) throw precondition_error("eps values must be positive");
    if (i > 0 && !(eps_list[i] < eps_list[i - 1]))
      throw precondition_error("eps values must be strictly decreasing");
  }
}

}  // namespace

ordered_json RegulatorReport::to_json() const {
  ordered_json j;
  j["converged"] = converged;
  j["family"] = family_label;
  j["limit"] = limit_label;
  j["regulator"] = regulator_label;
  j["index_kind"] = index_kind;
  j["slack"] = slack;
  j["grid"] = {{"x_lo", grid.x_lo}, {"x_hi", grid.x_hi}, {"n", grid.n}};
  j["checked_range"] = {sample_index.front(), sample_index.back()};
  j["sample_count"] = sample_index.size();
  ordered_json rows = ordered_json::array();
  for (const EpsRow& r : schedule) {
    rows.push_back({{"eps", r.eps},
                    {"attained", r.attained},
                    {"threshold", r.threshold},
                    {"worst_slack", r.worst_slack}});
  }
  j["schedule"] = rows;
  return j;
}

std::string RegulatorReport::to_csv() const {
  std::ostringstream os;
  os.precision(17);
  os << "eps,threshold\n";
  for (const EpsRow& r : schedule) os << r.eps << "," << (r.attained ? r.threshold : -1.0) << "\n";
  return os.str();
}

RegulatorReport verify_ru_convergence(const FunctionFamily& family, const RealFunction& limit,
                                      const RealFunction& regulator,
                                      const std::vector<double>& eps_list, const GridSpec& grid,
                                      double slack) {
  check_eps_list(eps_list);
  if (slack < 0.0) throw precondition_error("verify_ru_convergence: slack must be nonnegative");

  const std::vector<double> reg = regulator.eval_on(grid);
  for (std::size_t i = 0; i < reg.size(); ++i)
    if (reg[i] < -tol::zero)
      throw precondition_error("verify_ru_convergence: regulator '" + regulator.label() +
                               "' is negative at x=" + std::to_string(grid.point(static_cast<int>(i))));
  const std::vector<double> lim = limit.eval_on(grid);

  const int count = family.member_count();
  const std::size_t n_eps = eps_list.size();
  // viol[k][e]: max over grid of |member_k - limit| - eps_e * u - slack.
  std::vector<std::vector<double>> viol(static_cast<std::size_t>(count),
                                        std::vector<double>(n_eps, kNegInf));
  for (int k = 0; k < count; ++k) {
    const std::vector<double> mv = family.member_at(k).eval_on(grid);
    for (std::size_t i = 0; i < mv.size(); ++i) {
      const double d = std::fabs(mv[i] - lim[i]);
      for (std::size_t e = 0; e < n_eps; ++e) {
        const double v = d - eps_list[e] * reg[i] - slack;
        if (v > viol[static_cast<std::size_t>(k)][e]) viol[static_cast<std::size_t>(k)][e] = v;
      }
    }
  }

  RegulatorReport rep;
  rep.family_label = family.label;
  rep.limit_label = limit.label();
  rep.regulator_label = regulator.label();
  rep.index_kind = family.index_kind();
  rep.slack = slack;
  rep.grid = grid;
  rep.sample_index.reserve(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) rep.sample_index.push_back(family.index_value(k));

  rep.converged = true;
  for (std::size_t e = 0; e < n_eps; ++e) {
    EpsRow row;
    row.eps = eps_list[e];
    if (family.kind == FunctionFamily::Kind::sequence) {
      // Smallest n0 whose whole checked suffix satisfies the bound.
      int first_ok = count;  // index into 0-based members
      double tail_worst = kNegInf;
      std::vector<double> suffix_worst(static_cast<std::size_t>(count) + 1, kNegInf);
      for (int k = count - 1; k >= 0; --k)
        suffix_worst[static_cast<std::size_t>(k)] =
            std::max(suffix_worst[static_cast<std::size_t>(k) + 1],
                     viol[static_cast<std::size_t>(k)][e]);
      for (int k = 0; k < count; ++k) {
        if (suffix_worst[static_cast<std::size_t>(k)] <= 0.0) {
          first_ok = k;
          tail_worst = suffix_worst[static_cast<std::size_t>(k)];
          break;
        }
      }
      row.attained = first_ok < count;
      row.threshold = row.attained ? family.index_value(first_ok) : -1.0;
      row.worst_slack = row.attained ? tail_worst : suffix_worst[static_cast<std::size_t>(count) - 1];
    } else {
      // Largest sampled prefix [0, delta] satisfying the bound; a row counts
      // as attained only when some positive sampled time qualifies.
      double delta = -1.0;
      double prefix_worst = kNegInf;
      bool any_positive = false;
      for (int k = 0; k < count; ++k) {
        if (viol[static_cast<std::size_t>(k)][e] > 0.0) break;
        prefix_worst = std::max(prefix_worst, viol[static_cast<std::size_t>(k)][e]);
        delta = family.index_value(k);
        if (delta > 0.0) any_positive = true;
      }
      row.attained = any_positive;
      row.threshold = std::max(delta, 0.0);
      row.worst_slack = row.attained ? prefix_worst : viol[0][e];
    }
    if (!row.attained) rep.converged = false;
    rep.schedule.push_back(row);
  }
  return rep;
}

namespace {

// Declared support clipped to the window, or nullopt when the member is
// numerically zero on the whole grid.
std::optional<SupportInterval> clipped_support(const RealFunction& f, const GridSpec& grid) {
  if (!f.flag().compact_support)
    throw precondition_error("check_cc_characterization: member '" + f.label() +
                             "' lacks a compact-support flag");
  const SupportInterval s = *f.flag().compact_support;
  const std::vector<double> v = f.eval_on(grid);
  double max_abs = 0.0;
  for (int i = 0; i < grid.n; ++i) {
    const double a = std::fabs(v[static_cast<std::size_t>(i)]);
    max_abs = std::max(max_abs, a);
    if (a > tol::zero && !s.contains(grid.point(i)))
      throw precondition_error("check_cc_characterization: '" + f.label() +
                               "' is nonzero outside its declared support at x=" +
                               std::to_string(grid.point(i)));
  }
  if (max_abs <= tol::zero) return std::nullopt;
  return SupportInterval{std::max(s.lo, grid.x_lo), std::min(s.hi, grid.x_hi)};
}

std::optional<SupportInterval> hull(const std::vector<std::optional<SupportInterval>>& supports,
                                    std::size_t from, std::size_t to) {
  std::optional<SupportInterval> h;
  for (std::size_t i = from; i < to; ++i) {
    if (!supports[i]) continue;
    if (!h) {
      h = supports[i];
    } else {
      h->lo = std::min(h->lo, supports[i]->lo);
      h->hi = std::max(h->hi, supports[i]->hi);
    }
  }
  return h;
}

}  // namespace

ordered_json CcReport::to_json() const {
  ordered_json j;
  j["uniform_conv"] = uniform_conv;
  j["has_common_support"] = has_common_support;
  if (has_common_support) j["common_support"] = {common_support.lo, common_support.hi};
  j["verdict"] = verdict;
  j["support_pad"] = support_pad;
  ordered_json sup = ordered_json::array();
  for (const auto& s : member_supports) {
    if (s)
      sup.push_back({s->lo, s->hi});
    else
      sup.push_back(nullptr);
  }
  j["member_supports"] = sup;
  j["uniform_report"] = uniform_report.to_json();
  return j;
}

CcReport check_cc_characterization(const FunctionFamily& family, const RealFunction& limit,
                                   const GridSpec& grid, const std::vector<double>& uniform_eps,
                                   double support_pad_fraction) {
  if (!limit.flag().compact_support)
    throw precondition_error("check_cc_characterization: limit lacks a compact-support flag");

  CcReport rep;
  rep.support_pad = support_pad_fraction * grid.width();
  rep.uniform_report = verify_ru_convergence(family, limit, rf_one(), uniform_eps, grid);
  rep.uniform_conv = rep.uniform_report.converged;

  // Member supports in net order: toward the limit. Sequences march with n;
  // continuum families approach as t decreases.
  const int count = family.member_count();
  for (int k = 0; k < count; ++k) {
    const int idx = family.kind == FunctionFamily::Kind::sequence ? k : count - 1 - k;
    rep.member_supports.push_back(clipped_support(family.member_at(idx), grid));
  }

  const std::size_t mid = (rep.member_supports.size() + 1) / 2;
  const auto head = hull(rep.member_supports, 0, mid);
  const auto tail = hull(rep.member_supports, mid, rep.member_supports.size());
  if (!tail) {
    rep.has_common_support = true;  // tail already vanished
    rep.common_support = head ? *head : SupportInterval{0.0, 0.0};
  } else if (head && tail->lo >= head->lo - rep.support_pad &&
             tail->hi <= head->hi + rep.support_pad) {
    rep.has_common_support = true;
    rep.common_support = *tail;
  } else {
    rep.has_common_support = false;  // supports still growing at truncation
  }
  rep.verdict = rep.uniform_conv && rep.has_common_support;
  return rep;
}

LpaApproxResult lpa_approximate(const RealFunction& f, int knot_budget, const GridSpec& grid) {
  if (knot_budget < 2) throw precondition_error("lpa_approximate: knot budget must be >= 2");
  std::vector<std::pair<double, double>> pts;
  pts.reserve(static_cast<std::size_t>(knot_budget));
  for (int i = 0; i < knot_budget; ++i) {
    const double x = i == knot_budget - 1
                         ? grid.x_hi
                         : grid.x_lo + grid.width() * static_cast<double>(i) /
                                           static_cast<double>(knot_budget - 1);
    const double y = f(x);
    if (!std::isfinite(y)) throw eval_error("lpa_approximate: non-finite value at knot");
    pts.emplace_back(x, y);
  }
  const double left_slope = (pts[1].second - pts[0].second) / (pts[1].first - pts[0].first);
  const std::size_t m = pts.size();
  const double right_slope =
      (pts[m - 1].second - pts[m - 2].second) / (pts[m - 1].first - pts[m - 2].first);
  LpaApproxResult res{PiecewiseAffineFunction::interpolating(pts, left_slope, right_slope), 0.0};
  const std::vector<double> fv = f.eval_on(grid);
  for (int i = 0; i < grid.n; ++i)
    res.sup_error =
        std::max(res.sup_error, std::fabs(fv[static_cast<std::size_t>(i)] - res.pa(grid.point(i))));
  return res;
}

}  // namespace latticeflow
