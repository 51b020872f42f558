#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "latticeflow/errors.hpp"
#include "latticeflow/lattice_ops.hpp"
#include "latticeflow/real_function.hpp"
#include "latticeflow/tolerances.hpp"
#include "test_helpers.hpp"

using namespace latticeflow;
using lftest::pa_identity;
using lftest::random_pa;
using lftest::sup_diff;
using lftest::sup_diff_fn;

TEST_CASE("GridSpec validates its invariants") {
  CHECK_THROWS_AS(GridSpec(1.0, 1.0, 10), precondition_error);
  CHECK_THROWS_AS(GridSpec(2.0, 1.0, 10), precondition_error);
  CHECK_THROWS_AS(GridSpec(0.0, 1.0, 1), precondition_error);
  const GridSpec g(-1.0, 1.0, 5);
  CHECK(g.point(0) == -1.0);
  CHECK(g.point(4) == 1.0);
  CHECK(g.spacing() == doctest::Approx(0.5));
}

TEST_CASE("piecewise-affine validation catches discontinuities") {
  PiecewiseAffineFunction bad;
  bad.knots = {0.0};
  bad.slopes = {0.0, 0.0};
  bad.intercepts = {0.0, 1.0};  // jump at the knot
  CHECK_THROWS_AS(bad.validate(), precondition_error);

  PiecewiseAffineFunction unsorted;
  unsorted.knots = {1.0, 0.0};
  unsorted.slopes = {0.0, 0.0, 0.0};
  unsorted.intercepts = {0.0, 0.0, 0.0};
  CHECK_THROWS_AS(unsorted.validate(), precondition_error);

  CHECK_NOTHROW(rf_hat(0.0, 1.0, 1.0).piecewise_affine()->validate());
}

TEST_CASE("sup(f, -f) of the identity is |x| with a knot at zero") {
  const GridSpec g(-1.0, 1.0, 1001);
  const RealFunction f = pa_identity();
  const RealFunction a = rf_sup(f, rf_scale(f, -1.0, g), g);
  REQUIRE(a.is_piecewise_affine());
  CHECK(a.piecewise_affine()->knots == std::vector<double>{0.0});
  CHECK(sup_diff_fn(a, [](double x) { return std::fabs(x); }, g) == 0.0);

  // abs() goes through the same sup path.
  const RealFunction b = rf_abs_of(f, g);
  CHECK(sup_diff(a, b, g) == 0.0);
}

TEST_CASE("f + (-1) f is the zero function") {
  const GridSpec g(-3.0, 3.0, 301);
  const RealFunction f = rf_hat(0.5, 1.0, 2.0);
  const RealFunction z = rf_add(f, rf_scale(f, -1.0, g), g);
  CHECK(sup_diff_fn(z, [](double) { return 0.0; }, g) == 0.0);
}

TEST_CASE("sup of two hats is the W profile, checked against brute force") {
  const GridSpec g(-4.0, 4.0, 10001);
  const RealFunction h1 = rf_hat(-1.0, 1.0, 1.0);
  const RealFunction h2 = rf_hat(1.0, 1.0, 1.0);
  const RealFunction w = rf_sup(h1, h2, g);
  REQUIRE(w.is_piecewise_affine());
  CHECK(w.piecewise_affine()->knots == std::vector<double>{-2.0, -1.0, 0.0, 1.0, 2.0});
  CHECK(w(0.0) == 0.0);
  // Brute-force oracle: pointwise max of the two evaluators.
  double worst = 0.0;
  for (int i = 0; i < g.n; ++i) {
    const double x = g.point(i);
    worst = std::max(worst, std::fabs(w(x) - std::max(h1(x), h2(x))));
  }
  CHECK(worst <= tol::arith);
}

TEST_CASE("lattice identities hold for generated piecewise-affine pairs") {
  std::mt19937 rng(20240811);
  const GridSpec g(-10.0, 10.0, 4001);
  for (int trial = 0; trial < 25; ++trial) {
    const RealFunction f = RealFunction::piecewise(random_pa(rng), "f");
    const RealFunction h = RealFunction::piecewise(random_pa(rng), "h");

    const RealFunction hi = rf_sup(f, h, g);
    const RealFunction lo = rf_inf(f, h, g);
    REQUIRE(hi.is_piecewise_affine());
    CHECK_NOTHROW(hi.piecewise_affine()->validate(1e-9));

    // sup + inf = f + h pointwise.
    CHECK(sup_diff(rf_add(hi, lo, g), rf_add(f, h, g), g) <= tol::arith);

    // Exact piecewise-affine results agree with the sampled brute-force path.
    const RealFunction f_cf = RealFunction::closed_form("f_cf", [f](double x) { return f(x); });
    const RealFunction h_cf = RealFunction::closed_form("h_cf", [h](double x) { return h(x); });
    const RealFunction hi_sampled = rf_sup(f_cf, h_cf, g);
    CHECK_FALSE(hi_sampled.is_piecewise_affine());
    CHECK(sup_diff(hi, hi_sampled, g) <= tol::arith);

    // abs(f) = sup(f, -f).
    CHECK(sup_diff(rf_abs_of(f, g), rf_sup(f, rf_scale(f, -1.0, g), g), g) <= tol::arith);
  }
}

TEST_CASE("lattice_op rejects missing operands") {
  const GridSpec g(-1.0, 1.0, 11);
  CHECK_THROWS_AS(lattice_op(LatticeKind::sup, rf_one(), std::nullopt, std::nullopt, g),
                  precondition_error);
  CHECK_THROWS_AS(lattice_op(LatticeKind::scale, rf_one(), std::nullopt, std::nullopt, g),
                  precondition_error);
}

TEST_CASE("order-unit norm: constants, self, and the sup of |x|/(1+|x|)") {
  const GridSpec g(-100.0, 100.0, 20001);
  CHECK(order_unit_norm(rf_const(-3.5), rf_one(), g) == 3.5);
  CHECK(order_unit_norm(rf_one_plus_abs(), rf_one_plus_abs(), g) == 1.0);

  const double n100 = order_unit_norm(rf_identity(), rf_one_plus_abs(), g);
  CHECK(n100 >= 0.99);
  CHECK(n100 < 1.0);
  // Widening the window pushes the norm toward 1 from below.
  const double n10 = order_unit_norm(rf_identity(), rf_one_plus_abs(), GridSpec(-10, 10, 2001));
  const double n1000 =
      order_unit_norm(rf_identity(), rf_one_plus_abs(), GridSpec(-1000, 1000, 20001));
  CHECK(n10 < n100);
  CHECK(n100 < n1000);
  CHECK(n1000 < 1.0);
}

TEST_CASE("order-unit norm is homogeneous and subadditive on the grid") {
  const GridSpec g(-50.0, 50.0, 5001);
  const RealFunction u = rf_one_plus_abs();
  const RealFunction f = rf_gauss(2.0);
  const RealFunction h = rf_hat(1.0, 3.0, 2.0);
  const double nf = order_unit_norm(f, u, g);
  CHECK(std::fabs(order_unit_norm(rf_scale(f, -2.5, g), u, g) - 2.5 * nf) <= tol::arith);
  CHECK(order_unit_norm(rf_add(f, h, g), u, g) <= nf + order_unit_norm(h, u, g) + tol::arith);
}

TEST_CASE("order-unit norm rejects non-positive units") {
  const GridSpec g(-2.0, 2.0, 101);
  CHECK_THROWS_AS(order_unit_norm(rf_one(), rf_identity(), g), precondition_error);
  CHECK_THROWS_AS(order_unit_norm(rf_one(), rf_hat(0.0, 1.0, 1.0), g), precondition_error);
}

TEST_CASE("dominates reports the worst violation") {
  const GridSpec g01(0.0, 2.0, 2001);
  const auto zero_ok = dominates(rf_zero(), rf_zero(), g01, 0.0);
  CHECK(zero_ok.holds);
  CHECK(zero_ok.worst_violation == 0.0);

  const RealFunction sq = RealFunction::from_registry("square");
  const auto sq_vs_x = dominates(sq, rf_identity(), g01, 0.0);
  CHECK_FALSE(sq_vs_x.holds);
  CHECK(sq_vs_x.worst_violation == doctest::Approx(2.0));  // at x = 2

  const auto sin_le_1 =
      dominates(RealFunction::from_registry("sin"), rf_one(), GridSpec(-50.0, 50.0, 20001), 0.0);
  CHECK(sin_le_1.holds);

  CHECK_THROWS_AS(dominates(rf_one(), rf_one(), g01, -1.0), precondition_error);
}

TEST_CASE("sampled functions interpolate linearly and extend by their edges") {
  const GridSpec g(0.0, 1.0, 3);  // nodes 0, 0.5, 1
  const RealFunction s = RealFunction::sampled(g, {0.0, 1.0, 0.0}, "tent");
  CHECK(s(0.25) == doctest::Approx(0.5));
  CHECK(s(0.75) == doctest::Approx(0.5));
  CHECK(s(-5.0) == 0.0);
  CHECK(s(7.0) == 0.0);
  CHECK_THROWS_AS(RealFunction::sampled(g, {0.0, 1.0}, "short"), precondition_error);
}

TEST_CASE("function JSON round-trips for registry, pa, and sampled reprs") {
  const GridSpec g(-3.0, 3.0, 601);
  for (const std::string spec :
       {"hat(0,1,1)", "gauss(1)", "one_plus_abs", "clip_one_plus_abs(51)", "plateau(2)",
        "lp_singular(1)", "abs", "one", "identity"}) {
    const RealFunction f = RealFunction::from_registry(spec);
    const RealFunction back = RealFunction::from_json(f.to_json());
    const GridSpec check = spec == "lp_singular(1)" ? GridSpec(2.0, 3.0, 100) : g;
    CHECK(sup_diff(f, back, check) == 0.0);
  }
  const RealFunction s = RealFunction::sampled(g, std::vector<double>(601, 2.0), "flat");
  CHECK(sup_diff(s, RealFunction::from_json(s.to_json()), g) == 0.0);

  const RealFunction anon = RealFunction::closed_form("anon", [](double x) { return x; });
  CHECK_THROWS_AS(anon.to_json(), parse_error);
  CHECK_THROWS_AS(RealFunction::from_registry("nope(1)"), parse_error);
}

TEST_CASE("compact-support flags are attached by the registry shapes") {
  const RealFunction h = rf_hat(0.0, 1.0, 1.0);
  REQUIRE(h.flag().compact_support.has_value());
  CHECK(h.flag().compact_support->lo == -1.0);
  CHECK(h.flag().compact_support->hi == 1.0);
  CHECK(h.flag().positive);

  const GridSpec g(-5.0, 5.0, 101);
  const RealFunction scaled = rf_scale(h, 0.5, g);
  REQUIRE(scaled.flag().compact_support.has_value());
  CHECK(scaled.flag().positive);
}

TEST_CASE("non-finite evaluation is reported") {
  const GridSpec touching(0.0, 1.0, 3);  // node at 0.5 hits the pole
  CHECK_THROWS_AS(rf_lp_singular(1.0).eval_on(touching), eval_error);
}
