#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "latticeflow/errors.hpp"
#include "latticeflow/lattice_ops.hpp"
#include "latticeflow/ru_convergence.hpp"
#include "latticeflow/semigroup.hpp"
#include "latticeflow/tolerances.hpp"
#include "test_helpers.hpp"

using namespace latticeflow;
using lftest::sup_diff_fn;

namespace {

FunctionFamily scaled_unit_family(int n_max) {
  const RealFunction u = rf_one_plus_abs();
  return FunctionFamily::sequence(
      n_max,
      [u](int n) {
        return RealFunction::piecewise(u.piecewise_affine()->scaled(1.0 / n), "u/n", u.flag());
      },
      "u_over_n");
}

FunctionFamily translate_family(const RealFunction& f, double t_hi, int samples) {
  const SemigroupOperator T = make_translation();
  return FunctionFamily::continuum(0.0, t_hi, samples,
                                   [T, f](double h) { return T.apply(h, f); },
                                   "translate[" + f.label() + "]");
}

double largest_time_at_most(const FunctionFamily& fam, double cap) {
  double best = 0.0;
  for (double t : fam.times)
    if (t <= cap) best = t;
  return best;
}

}  // namespace

TEST_CASE("x_n = u/n converges with regulator u at n0 = ceil(1/eps)") {
  const GridSpec g(-50.0, 50.0, 2001);
  // Slack at the "vanishes" scale absorbs the one-ulp association gap between
  // (u/n)(x) and eps*u(x) at n = 1/eps without moving any threshold.
  const RegulatorReport rep = verify_ru_convergence(scaled_unit_family(128), rf_zero(),
                                                    rf_one_plus_abs(), {1.0, 0.1, 0.01}, g,
                                                    /*slack=*/tol::zero);
  REQUIRE(rep.converged);
  CHECK(rep.schedule[0].threshold == 1.0);
  CHECK(rep.schedule[1].threshold == 10.0);
  CHECK(rep.schedule[2].threshold == 100.0);
  for (const EpsRow& r : rep.schedule) CHECK(r.worst_slack <= 0.0);
}

TEST_CASE("hats marching off the window converge there (truncation is explicit)") {
  const GridSpec g(-50.0, 50.0, 2001);
  auto fam = FunctionFamily::sequence(
      128, [](int n) { return rf_hat(static_cast<double>(n), 1.0, 1.0); }, "marching_hats");
  const RegulatorReport rep = verify_ru_convergence(fam, rf_zero(), rf_one(), {0.5, 0.1}, g);
  REQUIRE(rep.converged);
  // The peak leaves the window once the support [n-1, n+1] clears x = 50.
  CHECK(rep.schedule[0].threshold == 51.0);
  CHECK(rep.schedule[1].threshold == 51.0);
  CHECK(rep.sample_index.back() == 128.0);  // checked range is visible
}

TEST_CASE("translated hats: threshold is eps * halfwidth / height on the time lattice") {
  const GridSpec g(-50.0, 50.0, 2001);
  for (const auto& [hw, ht] : std::vector<std::pair<double, double>>{{1.0, 1.0}, {0.5, 2.0}}) {
    const RealFunction f = rf_hat(0.0, hw, ht);
    const FunctionFamily fam = translate_family(f, 1.0, 256);
    const RegulatorReport rep = verify_ru_convergence(fam, f, rf_one(), {0.5, 0.1}, g);
    REQUIRE(rep.converged);
    const double lip = ht / hw;
    for (const EpsRow& r : rep.schedule) {
      const double expected = largest_time_at_most(fam, r.eps / lip);
      CHECK(r.threshold == doctest::Approx(expected).epsilon(1e-12));
    }
  }
}

TEST_CASE("doubling the regulator can only improve the schedule") {
  const GridSpec g(-50.0, 50.0, 2001);
  const RealFunction f = rf_hat(0.0, 1.0, 1.0);
  const FunctionFamily fam = translate_family(f, 1.0, 128);
  const RegulatorReport one = verify_ru_convergence(fam, f, rf_one(), {0.5, 0.1, 0.02}, g);
  const RegulatorReport two =
      verify_ru_convergence(fam, f, rf_const(2.0), {0.5, 0.1, 0.02}, g);
  REQUIRE(one.converged);
  REQUIRE(two.converged);
  for (std::size_t i = 0; i < one.schedule.size(); ++i)
    CHECK(two.schedule[i].threshold >= one.schedule[i].threshold);

  // Pointwise larger regulators inherit convergence.
  const GridSpec gw(-50.0, 50.0, 501);
  const RealFunction bigger = rf_add(rf_one(), rf_hat(0.0, 2.0, 3.0), gw);
  CHECK(verify_ru_convergence(fam, f, bigger, {0.5, 0.1, 0.02}, gw).converged);
}

TEST_CASE("verify_ru_convergence rejects bad schedules and regulators") {
  const GridSpec g(-1.0, 1.0, 101);
  const FunctionFamily fam = scaled_unit_family(4);
  CHECK_THROWS_AS(verify_ru_convergence(fam, rf_zero(), rf_identity(), {0.5}, g),
                  precondition_error);  // negative regulator
  CHECK_THROWS_AS(verify_ru_convergence(fam, rf_zero(), rf_one(), {0.1, 0.5}, g),
                  precondition_error);  // eps not decreasing
  CHECK_THROWS_AS(verify_ru_convergence(fam, rf_zero(), rf_one(), {}, g), precondition_error);
}

TEST_CASE("compactly-supported characterization: shrinking, widening, constant") {
  const GridSpec g(-50.0, 50.0, 20001);
  const RealFunction zero_cc = rf_zero().with_flag(ConeFlag{true, SupportInterval{0.0, 0.0}});

  auto shrinking = FunctionFamily::sequence(
      12, [](int n) { return rf_hat(0.0, 1.0, 1.0 / n); }, "shrinking");
  const CcReport a = check_cc_characterization(shrinking, zero_cc, g);
  CHECK(a.uniform_conv);
  REQUIRE(a.has_common_support);
  CHECK(a.common_support.lo == doctest::Approx(-1.0));
  CHECK(a.common_support.hi == doctest::Approx(1.0));
  CHECK(a.verdict);

  auto widening = FunctionFamily::sequence(
      10, [](int n) { return rf_hat(0.0, static_cast<double>(n), 1.0 / n); }, "widening");
  const CcReport b = check_cc_characterization(widening, zero_cc, g);
  CHECK(b.uniform_conv);
  CHECK_FALSE(b.has_common_support);
  CHECK_FALSE(b.verdict);

  const RealFunction h = rf_hat(0.0, 1.0, 1.0);
  auto constant = FunctionFamily::sequence(8, [h](int) { return h; }, "constant");
  CHECK(check_cc_characterization(constant, h, g).verdict);
}

TEST_CASE("cc verdict agrees with an explicit compactly-supported regulator") {
  const GridSpec g(-50.0, 50.0, 20001);
  // Shrinking family: the plateau equal to 1 on the common support regulates.
  auto shrinking = FunctionFamily::sequence(
      12, [](int n) { return rf_hat(0.0, 1.0, 1.0 / n); }, "shrinking");
  const RegulatorReport ok =
      verify_ru_convergence(shrinking, rf_zero(), rf_plateau(1.0), {0.5, 0.25, 0.125}, g);
  CHECK(ok.converged);

  // Widening family: no compactly supported candidate inside the escape zone
  // can regulate; the tail member is positive where the candidate vanishes.
  auto widening = FunctionFamily::sequence(
      10, [](int n) { return rf_hat(0.0, static_cast<double>(n), 1.0 / n); }, "widening");
  const RegulatorReport bad =
      verify_ru_convergence(widening, rf_zero(), rf_plateau(5.0), {0.5, 0.25}, g);
  CHECK_FALSE(bad.converged);
}

TEST_CASE("cc characterization needs compact-support flags") {
  const GridSpec g(-50.0, 50.0, 501);
  auto unflagged = FunctionFamily::sequence(
      3, [](int) { return rf_gauss(1.0); }, "gaussians");
  CHECK_THROWS_AS(check_cc_characterization(unflagged, rf_hat(0.0, 1.0, 1.0), g),
                  precondition_error);
}

TEST_CASE("lpa_approximate: affine fixed point, chord error of x^2, exact kink") {
  const GridSpec g(-1.0, 1.0, 10001);
  CHECK(lpa_approximate(rf_identity(), 5, g).sup_error <= 1e-12);

  const LpaApproxResult sq = lpa_approximate(RealFunction::from_registry("square"), 3, g);
  CHECK(sq.sup_error == doctest::Approx(0.25).epsilon(1e-9));  // worst at x = +/- 1/2
  CHECK(sq.pa(0.5) == doctest::Approx(0.5));                   // the chord |x|

  CHECK(lpa_approximate(rf_abs(), 3, g).sup_error <= 1e-12);  // knot lands on the kink
  CHECK_THROWS_AS(lpa_approximate(rf_abs(), 1, g), precondition_error);
}

TEST_CASE("lpa_approximate obeys the Lipschitz budget and improves with knots") {
  const GridSpec g(-50.0, 50.0, 20001);
  const RealFunction f = rf_abs();  // Lipschitz constant 1
  for (int m : {3, 5, 9, 33}) {
    const LpaApproxResult r = lpa_approximate(f, m, g);
    CHECK(r.sup_error <= 1.0 * g.width() / (m - 1) + tol::arith);
  }
  double prev = 1e300;
  for (int m : {9, 17, 33, 65}) {
    const double err = lpa_approximate(rf_gauss(10.0), m, g).sup_error;
    CHECK(err <= prev + tol::arith);
    prev = err;
  }
}

TEST_CASE("regulator report serializes schedule and range") {
  const GridSpec g(-50.0, 50.0, 501);
  const RegulatorReport rep =
      verify_ru_convergence(scaled_unit_family(16), rf_zero(), rf_one_plus_abs(), {1.0, 0.25}, g);
  const ordered_json j = rep.to_json();
  CHECK(j["converged"] == true);
  CHECK(j["schedule"].size() == 2);
  CHECK(j["checked_range"][1] == 16.0);
  const std::string csv = rep.to_csv();
  CHECK(csv.rfind("eps,threshold\n", 0) == 0);
}
