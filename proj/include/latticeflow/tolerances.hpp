#pragma once

namespace latticeflow::tol {

// Absolute tolerance for algebraic identities between exactly representable
// operations (lattice algebra, linearity, identity laws).
inline constexpr double arith = 1e-9;

// Continuity defect allowed at an interior knot of a piecewise-affine function.
inline constexpr double knot = 1e-12;

// Threshold below which a value counts as "vanishes" in support detection.
inline constexpr double zero = 1e-12;

// Semigroup-law defect budget for quadrature-backed operators.
inline constexpr double law = 1e-6;

// Mass-preservation budget for the truncated heat quadrature.
inline constexpr double quad = 1e-8;

// Semiflow identity/composition law budget.
inline constexpr double flow = 1e-8;

// Below this time the heat kernel is numerically a delta; apply falls back to
// the identity (error is O(t)-bounded for Lipschitz inputs at this scale).
inline constexpr double heat_t_min = 1e-6;

}  // namespace latticeflow::tol
