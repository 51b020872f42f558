#include "latticeflow/lattice_ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "latticeflow/errors.hpp"

namespace latticeflow {

namespace {

ConeFlag combined_flag(LatticeKind kind, const ConeFlag& a, const ConeFlag* b, double lambda) {
  ConeFlag out;
  switch (kind) {
    case LatticeKind::sup:
      out.positive = a.positive || (b && b->positive);
      if (a.compact_support && b && b->compact_support && a.positive && b->positive)
        out.compact_support = SupportInterval{std::min(a.compact_support->lo, b->compact_support->lo),
                                              std::max(a.compact_support->hi, b->compact_support->hi)};
      break;
    case LatticeKind::inf:
      out.positive = a.positive && b && b->positive;
      if (out.positive && a.compact_support) out.compact_support = a.compact_support;
      break;
    case LatticeKind::abs:
      out.positive = true;
      out.compact_support = a.compact_support;
      break;
    case LatticeKind::add:
      out.positive = a.positive && b && b->positive;
      if (a.compact_support && b && b->compact_support)
        out.compact_support = SupportInterval{std::min(a.compact_support->lo, b->compact_support->lo),
                                              std::max(a.compact_support->hi, b->compact_support->hi)};
      break;
    case LatticeKind::scale:
      out.positive = (lambda >= 0.0 && a.positive) || (lambda == 0.0);
      out.compact_support = a.compact_support;
      break;
  }
  return out;
}

std::string op_label(LatticeKind kind, const RealFunction& f, const std::optional<RealFunction>& g,
                     std::optional<double> lambda) {
  switch (kind) {
    case LatticeKind::sup: return "sup(" + f.label() + "," + g->label() + ")";
    case LatticeKind::inf: return "inf(" + f.label() + "," + g->label() + ")";
    case LatticeKind::abs: return "abs(" + f.label() + ")";
    case LatticeKind::add: return "add(" + f.label() + "," + g->label() + ")";
    case LatticeKind::scale: return "scale(" + f.label() + "," + std::to_string(*lambda) + ")";
  }
  return "?";
}

}  // namespace

RealFunction lattice_op(LatticeKind kind, const RealFunction& f,
                        const std::optional<RealFunction>& g, std::optional<double> lambda,
                        const GridSpec& grid) {
  const bool binary = kind == LatticeKind::sup || kind == LatticeKind::inf || kind == LatticeKind::add;
  if (binary && !g) throw precondition_error("lattice_op: missing second operand");
  if (kind == LatticeKind::scale && !lambda)
    throw precondition_error("lattice_op: missing scale factor");

  const std::string label = op_label(kind, f, g, lambda);
  const ConeFlag flag =
      combined_flag(kind, f.flag(), g ? &g->flag() : nullptr, lambda.value_or(0.0));

  // Exact path: piecewise-affine operands stay piecewise affine.
  const PiecewiseAffineFunction* fp = f.piecewise_affine();
  const PiecewiseAffineFunction* gp = g ? g->piecewise_affine() : nullptr;
  if (fp && (!binary || gp)) {
    PiecewiseAffineFunction pa;
    switch (kind) {
      case LatticeKind::sup: pa = pa_sup(*fp, *gp); break;
      case LatticeKind::inf: pa = pa_inf(*fp, *gp); break;
      case LatticeKind::abs: pa = pa_abs(*fp); break;
      case LatticeKind::add: pa = pa_add(*fp, *gp); break;
      case LatticeKind::scale: pa = fp->scaled(*lambda); break;
    }
    return RealFunction::piecewise(std::move(pa), label, flag);
  }

  const std::vector<double> fv = f.eval_on(grid);
  std::vector<double> out(fv.size());
  if (binary) {
    const std::vector<double> gv = g->eval_on(grid);
    for (std::size_t i = 0; i < fv.size(); ++i) {
      switch (kind) {
        case LatticeKind::sup: out[i] = std::max(fv[i], gv[i]); break;
        case LatticeKind::inf: out[i] = std::min(fv[i], gv[i]); break;
        default: out[i] = fv[i] + gv[i]; break;
      }
    }
  } else if (kind == LatticeKind::abs) {
    for (std::size_t i = 0; i < fv.size(); ++i) out[i] = std::fabs(fv[i]);
  } else {
    for (std::size_t i = 0; i < fv.size(); ++i) out[i] = *lambda * fv[i];
  }
  return RealFunction::sampled(grid, std::move(out), label, flag);
}

RealFunction rf_sup(const RealFunction& f, const RealFunction& g, const GridSpec& grid) {
  return lattice_op(LatticeKind::sup, f, g, std::nullopt, grid);
}
RealFunction rf_inf(const RealFunction& f, const RealFunction& g, const GridSpec& grid) {
  return lattice_op(LatticeKind::inf, f, g, std::nullopt, grid);
}
RealFunction rf_abs_of(const RealFunction& f, const GridSpec& grid) {
  return lattice_op(LatticeKind::abs, f, std::nullopt, std::nullopt, grid);
}
RealFunction rf_add(const RealFunction& f, const RealFunction& g, const GridSpec& grid) {
  return lattice_op(LatticeKind::add, f, g, std::nullopt, grid);
}
RealFunction rf_scale(const RealFunction& f, double lambda, const GridSpec& grid) {
  return lattice_op(LatticeKind::scale, f, std::nullopt, lambda, grid);
}

double order_unit_norm(const RealFunction& f, const RealFunction& u, const GridSpec& grid) {
  const std::vector<double> fv = f.eval_on(grid);
  const std::vector<double> uv = u.eval_on(grid);
  double norm = 0.0;
  for (std::size_t i = 0; i < fv.size(); ++i) {
    if (!(uv[i] > 0.0))
      throw precondition_error("order_unit_norm: unit '" + u.label() + "' is not positive at x=" +
                               std::to_string(grid.point(static_cast<int>(i))));
    norm = std::max(norm, std::fabs(fv[i]) / uv[i]);
  }
  return norm;
}

DominanceResult dominates(const RealFunction& f, const RealFunction& g, const GridSpec& grid,
                          double slack) {
  if (slack < 0.0) throw precondition_error("dominates: slack must be nonnegative");
  const std::vector<double> fv = f.eval_on(grid);
  const std::vector<double> gv = g.eval_on(grid);
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < fv.size(); ++i) worst = std::max(worst, fv[i] - gv[i]);
  return DominanceResult{worst <= slack, worst};
}

}  // namespace latticeflow
