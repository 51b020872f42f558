#pragma once

#include <optional>
#include <string>
#include <vector>

#include "latticeflow/family.hpp"
#include "latticeflow/grid.hpp"
#include "latticeflow/real_function.hpp"
#include "latticeflow/tolerances.hpp"

namespace latticeflow {

struct EpsRow {
  double eps = 0.0;
  bool attained = false;
  // Sequence: the smallest index n0 with |x_m - x| <= eps*u + slack for all
  // checked m >= n0. Continuum: the largest sampled delta with the bound
  // holding for all sampled t <= delta.
  double threshold = 0.0;
  // Max over the qualifying tail/prefix and grid of |member - limit| - eps*u
  // - slack; <= 0 on an attained row.
  double worst_slack = 0.0;
};

struct RegulatorReport {
  bool converged = false;
  std::string family_label;
  std::string limit_label;
  std::string regulator_label;
  std::string index_kind;  // "n" or "t"
  std::vector<double> sample_index;
  double slack = 0.0;
  GridSpec grid;
  std::vector<EpsRow> schedule;

  ordered_json to_json() const;
  std::string to_csv() const;  // two columns: eps,threshold
};

// Checks |member - limit| <= eps * regulator + slack on the grid, eventually
// in the family's index, for each eps in the strictly decreasing schedule.
RegulatorReport verify_ru_convergence(const FunctionFamily& family, const RealFunction& limit,
                                      const RealFunction& regulator,
                                      const std::vector<double>& eps_list, const GridSpec& grid,
                                      double slack = tol::arith);

struct CcReport {
  bool uniform_conv = false;
  bool has_common_support = false;
  SupportInterval common_support;  // hull of the tail supports, when present
  bool verdict = false;
  double support_pad = 0.0;
  // Supports in net order (toward the limit), window-clipped; empty entries
  // are members that vanish on the whole grid.
  std::vector<std::optional<SupportInterval>> member_supports;
  RegulatorReport uniform_report;

  ordered_json to_json() const;
};

// Decides ru-convergence in the compactly-supported space: uniform
// convergence plus an eventually common support. Support growth that has not
// stopped by the end of the checked range counts as "no common support";
// the pad (a fraction of the window width) separates stabilizing supports
// from still-growing ones at finite truncation.
CcReport check_cc_characterization(const FunctionFamily& family, const RealFunction& limit,
                                   const GridSpec& grid,
                                   const std::vector<double>& uniform_eps = {0.5, 0.1},
                                   double support_pad_fraction = 0.01);

struct LpaApproxResult {
  PiecewiseAffineFunction pa;
  double sup_error = 0.0;  // max |f - pa| on the grid
};

// Piecewise-affine interpolant of f at knot_budget equally spaced knots
// across the window, extended with the edge chord slopes.
LpaApproxResult lpa_approximate(const RealFunction& f, int knot_budget, const GridSpec& grid);

}  // namespace latticeflow
