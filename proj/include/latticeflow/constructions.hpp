#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "latticeflow/grid.hpp"
#include "latticeflow/real_function.hpp"
#include "latticeflow/semigroup.hpp"
#include "latticeflow/tolerances.hpp"

namespace latticeflow {

// Invertible lattice homomorphism between function spaces; validated on a
// finite corpus (round trip, sup-preservation, positivity preservation).
struct LatticeIso {
  std::function<RealFunction(const RealFunction&)> forward;
  std::function<RealFunction(const RealFunction&)> inverse;
  std::string label;
};

LatticeIso identity_iso();
// Change of variable along an increasing bijection rho:
// forward(f) = f o rho^{-1}, inverse(f) = f o rho. The conjugated operator is
// then t -> (x -> f(rho^{-1}(rho(x) + t))) for the translation semigroup.
LatticeIso warp_iso(std::function<double(double)> rho, std::function<double(double)> rho_inverse,
                    std::string label);
LatticeIso scaling_iso(double c);  // forward = c*f (c > 0)

struct IsoCheckReport {
  double roundtrip_defect = 0.0;   // max |inverse(forward(f)) - f|
  double hom_defect = 0.0;         // max |forward(sup(f,g)) - sup(forward f, forward g)|
  double positivity_dip = 0.0;     // negative part introduced on nonnegative corpus members
  bool pass = false;
  ordered_json to_json() const;
};

IsoCheckReport validate_iso(const LatticeIso& V, const std::vector<RealFunction>& corpus,
                            const GridSpec& grid, double tolerance = tol::arith);

// Conjugated semigroup t -> V^{-1} T(t) V. The iso is validated on the given
// corpus before the operator is built.
SemigroupOperator similar(const SemigroupOperator& S, const LatticeIso& V,
                          const std::vector<RealFunction>& iso_corpus, const GridSpec& grid);

// Rescaled semigroup t -> e^{mu t} T(alpha t), alpha > 0.
SemigroupOperator rescale(const SemigroupOperator& S, double mu, double alpha);

// Product semigroup t -> T(t) R(t), gated on a commutation check:
// max defect of T(t)R(s)f vs R(s)T(t)f over the corpus and time pairs must
// stay within tolerance, else certificate_error (the operator is not built).
SemigroupOperator product(const SemigroupOperator& S, const SemigroupOperator& R,
                          const std::vector<RealFunction>& corpus,
                          const std::vector<std::pair<double, double>>& commute_check_times,
                          const GridSpec& grid, double tolerance = tol::law);

// Commutation defect table without the gate (used to demonstrate failures).
double commutation_defect(const SemigroupOperator& S, const SemigroupOperator& R,
                          const RealFunction& f, double s, double t, const GridSpec& grid);

struct ConditionRReport {
  bool witness_verified = false;       // candidate-bound regime succeeded
  std::vector<double> lambdas;         // scalars with lambda_n * u_n <= bound
  std::string bound_label;

  struct FailureRow {
    int bound_index = 0;    // member used as the tentative order bound
    int witness_index = 0;  // member whose support escapes it
    double x = 0.0;         // point outside the bound's support
    double value = 0.0;     // witness value there (any positive scaling stays above 0)
  };
  std::vector<FailureRow> failure_rows;
  bool supports_strictly_growing = false;
  bool failure_established = false;  // every member with an in-range successor is escaped

  ordered_json to_json() const;
};

// Scalar-rescaling order-bound witness on a finite positive family. With a
// candidate bound: lambda_n = 1 / max(1, ||u_n||_bound), verified pointwise.
// Without one: requires compact-support flags with strictly growing supports
// and returns escape evidence against every member taken as a bound.
ConditionRReport condition_r_witness(const std::vector<RealFunction>& family, const GridSpec& grid,
                                     const std::optional<RealFunction>& candidate_bound);

}  // namespace latticeflow
