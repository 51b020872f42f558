#pragma once

#include <optional>

#include "latticeflow/grid.hpp"
#include "latticeflow/real_function.hpp"

namespace latticeflow {

enum class LatticeKind { sup, inf, abs, add, scale };

// Pointwise lattice algebra on the grid. Results are sampled on the grid,
// except that piecewise-affine operands combine exactly (merged knots, with
// breakpoints inserted at crossings).
RealFunction lattice_op(LatticeKind kind, const RealFunction& f,
                        const std::optional<RealFunction>& g, std::optional<double> lambda,
                        const GridSpec& grid);

RealFunction rf_sup(const RealFunction& f, const RealFunction& g, const GridSpec& grid);
RealFunction rf_inf(const RealFunction& f, const RealFunction& g, const GridSpec& grid);
RealFunction rf_abs_of(const RealFunction& f, const GridSpec& grid);
RealFunction rf_add(const RealFunction& f, const RealFunction& g, const GridSpec& grid);
RealFunction rf_scale(const RealFunction& f, double lambda, const GridSpec& grid);

// Grid approximation of the order-unit norm inf{lambda > 0 : |f| <= lambda u},
// i.e. max over grid of |f|/u. Requires u > 0 at every grid point.
double order_unit_norm(const RealFunction& f, const RealFunction& u, const GridSpec& grid);

struct DominanceResult {
  bool holds = false;
  double worst_violation = 0.0;  // max over grid of f - g
};

// Pointwise order f <= g + slack on the grid.
DominanceResult dominates(const RealFunction& f, const RealFunction& g, const GridSpec& grid,
                          double slack);

}  // namespace latticeflow
