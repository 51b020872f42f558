#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "latticeflow/constructions.hpp"
#include "latticeflow/errors.hpp"
#include "latticeflow/lattice_ops.hpp"
#include "latticeflow/semiflow.hpp"
#include "latticeflow/semigroup.hpp"
#include "latticeflow/tolerances.hpp"
#include "test_helpers.hpp"

using namespace latticeflow;
using lftest::sup_diff;
using lftest::sup_diff_fn;

namespace {

const std::vector<RealFunction>& iso_corpus() {
  static const std::vector<RealFunction> corpus = {rf_hat(0.0, 1.0, 1.0), rf_gauss(1.0), rf_one()};
  return corpus;
}

LatticeIso dilation_iso(double factor) {
  return warp_iso([factor](double x) { return x / factor; },
                  [factor](double x) { return x * factor; }, "dilation");
}

}  // namespace

TEST_CASE("lattice isos validate: identity, scaling, dilation; a sign flip fails") {
  const GridSpec g(-20.0, 20.0, 2001);
  CHECK(validate_iso(identity_iso(), iso_corpus(), g).pass);
  CHECK(validate_iso(scaling_iso(2.0), iso_corpus(), g).pass);
  CHECK(validate_iso(dilation_iso(2.0), iso_corpus(), g).pass);

  // f -> -f inverts the order: sup-preservation and positivity both break.
  LatticeIso flip;
  flip.forward = [](const RealFunction& f) {
    return RealFunction::closed_form("-f", [f](double x) { return -f(x); });
  };
  flip.inverse = flip.forward;
  flip.label = "flip";
  const IsoCheckReport rep = validate_iso(flip, iso_corpus(), g);
  CHECK_FALSE(rep.pass);
  CHECK(rep.hom_defect > 0.1);
  CHECK(rep.positivity_dip > 0.1);
  CHECK_THROWS_AS(similar(make_translation(), flip, iso_corpus(), g), precondition_error);
  CHECK_THROWS_AS(scaling_iso(0.0), precondition_error);
}

TEST_CASE("similar: identity iso reproduces the base operator") {
  const GridSpec g(-20.0, 20.0, 2001);
  const SemigroupOperator S = similar(make_translation(), identity_iso(), iso_corpus(), g);
  for (double t : {0.0, 0.4, 1.2})
    CHECK(sup_diff(S.apply(t, rf_gauss(1.0)), make_translation().apply(t, rf_gauss(1.0)), g) <=
          tol::arith);
}

TEST_CASE("similar: conjugating translation by a dilation doubles the speed") {
  const GridSpec g(-20.0, 20.0, 2001);
  const double factor = 2.0;
  const SemigroupOperator S = similar(make_translation(), dilation_iso(factor), iso_corpus(), g);
  const RealFunction f = rf_gauss(1.0);
  for (double t : {0.25, 1.0}) {
    // Oracle composed by hand: f(rho^{-1}(rho(x) + t)) with rho(x) = x/2.
    CHECK(sup_diff_fn(S.apply(t, f),
                      [&f, factor, t](double x) { return f((x / factor + t) * factor); }, g) <=
          tol::arith);
    CHECK(sup_diff_fn(S.apply(t, f), [&f, t](double x) { return f(x + 2.0 * t); }, g) <=
          tol::arith);
  }
}

TEST_CASE("similar: scalar scaling commutes with linear operators") {
  const GridSpec g(-20.0, 20.0, 2001);
  const SemigroupOperator S = similar(make_translation(), scaling_iso(2.0), iso_corpus(), g);
  for (double t : {0.3, 0.9})
    CHECK(sup_diff(S.apply(t, rf_gauss(1.0)), make_translation().apply(t, rf_gauss(1.0)), g) <=
          tol::arith);
}

TEST_CASE("rescale: trivial parameters, shift speed, exponential growth factor") {
  const GridSpec g(-20.0, 20.0, 2001);
  const SemigroupOperator T = make_translation();
  const SemigroupOperator trivial = rescale(T, 0.0, 1.0);
  for (double t : {0.0, 0.6})
    CHECK(sup_diff(trivial.apply(t, rf_hat(0.0, 1.0, 1.0)), T.apply(t, rf_hat(0.0, 1.0, 1.0)),
                   g) == 0.0);

  // alpha = 2 at t = 0.5 shifts by 1.
  const SemigroupOperator fast = rescale(T, 0.0, 2.0);
  CHECK(sup_diff(fast.apply(0.5, rf_hat(0.0, 1.0, 1.0)), rf_hat(-1.0, 1.0, 1.0), g) == 0.0);

  // mu = ln 2 doubles a constant by t = 1.
  const SemigroupOperator growing = rescale(T, std::log(2.0), 1.0);
  CHECK(sup_diff_fn(growing.apply(1.0, rf_one()), [](double) { return 2.0; }, g) <= 1e-12);

  CHECK_THROWS_AS(rescale(T, 0.0, 0.0), precondition_error);
  CHECK_THROWS_AS(rescale(T, 0.0, -1.0), precondition_error);
}

TEST_CASE("rescaling twice collapses to a single rescaling") {
  const GridSpec g(-20.0, 20.0, 2001);
  const SemigroupOperator T = make_translation();
  const double mu1 = 0.4, a1 = 1.5, mu2 = -0.3, a2 = 2.0;
  const SemigroupOperator twice = rescale(rescale(T, mu1, a1), mu2, a2);
  const SemigroupOperator once = rescale(T, mu1 * a2 + mu2, a1 * a2);
  for (double t : {0.2, 0.9})
    CHECK(sup_diff(twice.apply(t, rf_gauss(1.0)), once.apply(t, rf_gauss(1.0)), g) <= tol::arith);
}

TEST_CASE("product: translations compose to double speed, symmetric when built") {
  const GridSpec g(-20.0, 20.0, 2001);
  const SemigroupOperator T = make_translation();
  const SemigroupOperator P = product(T, T, {rf_hat(0.0, 1.0, 1.0)}, {{0.5, 0.25}}, g);
  CHECK(sup_diff(P.apply(0.5, rf_hat(0.0, 1.0, 1.0)), rf_hat(-1.0, 1.0, 1.0), g) == 0.0);

  const SemigroupOperator H = make_heat();
  const SemigroupOperator HT = product(H, T, {rf_gauss(1.0)}, {{0.3, 0.2}}, g);
  const SemigroupOperator TH = product(T, H, {rf_gauss(1.0)}, {{0.3, 0.2}}, g);
  CHECK(sup_diff(HT.apply(0.3, rf_gauss(1.0)), TH.apply(0.3, rf_gauss(1.0)), g) <= tol::law);
  CHECK(check_semigroup_law(HT, rf_gauss(1.0), {{0.1, 0.2}}, g).pass);
}

TEST_CASE("product: shift and dilation do not commute and are rejected") {
  const GridSpec g(-50.0, 50.0, 2001);
  const SemigroupOperator T = make_translation();
  const SemigroupOperator D = make_koopman(make_decay_flow(1.0));
  // T(1)D(1) maps x to e^{-1}x + 1; D(1)T(1) maps x to e^{-1}(x + 1).
  const double defect = commutation_defect(T, D, rf_identity(), 1.0, 1.0, g);
  CHECK(defect == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-9));
  CHECK(defect > 0.1);
  CHECK_THROWS_AS(product(T, D, {rf_identity()}, {{1.0, 1.0}}, g), certificate_error);
}

TEST_CASE("condition (R) witness: scaled constants against the unit bound") {
  const GridSpec g(-50.0, 50.0, 2001);
  std::vector<RealFunction> fam;
  for (int n = 1; n <= 10; ++n) fam.push_back(rf_const(static_cast<double>(n)));
  const ConditionRReport rep = condition_r_witness(fam, g, rf_one());
  REQUIRE(rep.witness_verified);
  REQUIRE(rep.lambdas.size() == 10);
  for (int n = 1; n <= 10; ++n) CHECK(rep.lambdas[n - 1] == 1.0 / static_cast<double>(n));

  // Single member, bounded by itself.
  const ConditionRReport self = condition_r_witness({rf_one_plus_abs()}, g, rf_one_plus_abs());
  REQUIRE(self.witness_verified);
  CHECK(self.lambdas == std::vector<double>{1.0});
}

TEST_CASE("condition (R) failure: growing plateaus escape every in-range bound") {
  const GridSpec g(-50.0, 50.0, 20001);
  std::vector<RealFunction> fam;
  for (int n = 1; n <= 10; ++n) fam.push_back(rf_plateau(static_cast<double>(n)));
  const ConditionRReport rep = condition_r_witness(fam, g, std::nullopt);
  CHECK(rep.supports_strictly_growing);
  CHECK(rep.failure_established);
  REQUIRE(rep.failure_rows.size() == 9);  // the widest member has no in-range successor
  for (const auto& row : rep.failure_rows) {
    CHECK(row.witness_index == row.bound_index + 1);
    // The escape point sits just past the bound's support edge, where the
    // next plateau is still near its full height.
    CHECK(std::fabs(row.x) > static_cast<double>(row.bound_index + 1) + 1.0);
    CHECK(row.value > 0.9);
  }
}

TEST_CASE("condition (R) preconditions") {
  const GridSpec g(-10.0, 10.0, 1001);
  CHECK_THROWS_AS(condition_r_witness({}, g, std::nullopt), precondition_error);
  CHECK_THROWS_AS(condition_r_witness({rf_identity()}, g, rf_one()), precondition_error);
  // No candidate and no compact-support structure.
  CHECK_THROWS_AS(condition_r_witness({rf_one(), rf_one()}, g, std::nullopt), precondition_error);
  // Equal supports are not "strictly growing": failure cannot be established.
  const ConditionRReport rep =
      condition_r_witness({rf_plateau(2.0), rf_plateau(2.0)}, g, std::nullopt);
  CHECK_FALSE(rep.supports_strictly_growing);
  CHECK_FALSE(rep.failure_established);
}

TEST_CASE("constructed operators keep the semigroup laws and the cone") {
  const GridSpec g(-20.0, 20.0, 1001);
  const std::vector<std::pair<double, double>> pairs = {{0.1, 0.2}, {0.0, 0.5}};
  std::vector<SemigroupOperator> built;
  built.push_back(similar(make_translation(), dilation_iso(2.0), iso_corpus(), g));
  built.push_back(rescale(make_translation(), 0.25, 2.0));
  built.push_back(product(make_translation(), make_translation(), {rf_gauss(1.0)}, pairs, g));
  for (const SemigroupOperator& S : built) {
    CAPTURE(S.label());
    CHECK(check_semigroup_law(S, rf_gauss(1.0), pairs, g).pass);
    CHECK(positivity_dip(S, {rf_hat(0.0, 1.0, 1.0), rf_one()}, {0.0, 0.3, 0.9}, g) <= tol::arith);
  }
}
