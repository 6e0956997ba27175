#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "malab/calculus.hpp"
#include "malab/legendre.hpp"
#include "malab/soliton.hpp"

// Legendre-Fenchel transform. Quadratics give closed-form conjugates
// (u* = 1/2 (xt-p)^T Q^-1 (xt-p) - q) that the two-stage transform must hit
// to round-off; e^x gives the smooth non-quadratic budget where finite
// differences and Newton interpolation actually earn their keep.

using namespace malab;

namespace {

double closed_conj(const Sym2& Q, const Point& p, double q, const Point& xt, int dim) {
  const Point d = xt - p;
  return 0.5 * dot(d, Q.inverse(dim).apply(d, dim)) - q;
}

ScalarField quad_field(const GridSpec& g, const Sym2& Q, const Point& p, double q) {
  return ScalarField::sample(g, [&](Point x) {
    return 0.5 * dot(x, Q.apply(x, 2)) + dot(p, x) + q;
  });
}

const GridSpec primal_2d = GridSpec::square_box(-3.0, 3.0, 65);

}  // namespace

TEST_CASE("conjugate of a quadratic matches the closed form to round-off") {
  const Sym2 Q = Sym2::diag(1.0, 2.0);
  const Point p{0.3, -0.1};
  const double q = 0.2;
  const ScalarField u = quad_field(primal_2d, Q, p, q);
  const GridSpec dual = suggest_dual_grid(u, {33, 33});
  const ConjugatePair pair = conjugate(u, dual);

  CHECK(pair.flagged() == 0);
  double verr = 0.0, merr = 0.0;
  const Sym2 Qi = Q.inverse(2);
  for (int jy = 0; jy < dual.m[1]; ++jy)
    for (int jx = 0; jx < dual.m[0]; ++jx) {
      const Point xt = dual.node(jx, jy);
      verr = std::fmax(verr,
                       std::fabs(pair.dual.at(jx, jy) - closed_conj(Q, p, q, xt, 2)));
      // maximizer solves Du(x) = Qx + p = xt
      const Point xm = pair.match[dual.index(jx, jy)];
      const Point xe = Qi.apply(xt - p, 2);
      merr = std::fmax(merr, std::fmax(std::fabs(xm[0] - xe[0]), std::fabs(xm[1] - xe[1])));
    }
  CHECK(verr <= 1e-9);
  CHECK(merr <= 1e-9);
}

TEST_CASE("1/2|x|^2 is its own conjugate") {
  const ScalarField u = quad_field(primal_2d, Sym2::identity(2), {0.0, 0.0}, 0.0);
  const GridSpec dual = suggest_dual_grid(u, {33, 33});
  const ConjugatePair pair = conjugate(u, dual);
  REQUIRE(pair.flagged() == 0);
  double verr = 0.0;
  for (int jy = 0; jy < dual.m[1]; ++jy)
    for (int jx = 0; jx < dual.m[0]; ++jx) {
      const Point xt = dual.node(jx, jy);
      verr = std::fmax(verr, std::fabs(pair.dual.at(jx, jy) - 0.5 * dot(xt, xt)));
    }
  CHECK(verr <= 1e-8);

  SUBCASE("symmetry transport: the dual of a rotation-invariant field is invariant") {
    const RotationSymmetry quarter =
        RotationSymmetry::from_matrix(Mat2{{0.0, -1.0, 1.0, 0.0}});
    const SymmetryReport rep =
        check_symmetry(pair.dual, quarter, annulus_node_samples(dual, 1.0, 2.0));
    CHECK(rep.max_deviation <= 1e-6);
  }
}

TEST_CASE("order reversal: conjugating kappa u divides the hessian by kappa") {
  // (kappa u)* (xt) = kappa u*(xt / kappa); for u = 1/2 x^T Q x this is the
  // closed form with Q -> kappa Q
  const double kappa = 2.0;
  const Sym2 Q{1.5, 0.25, 1.0};
  const ScalarField u = quad_field(primal_2d, Q * kappa, {0.0, 0.0}, 0.0);
  // the cross term shears the gradient image into a parallelogram, so pick an
  // explicit dual box inside it instead of the suggested bounding box
  const GridSpec dual = GridSpec::square_box(-2.0, 2.0, 25);
  const ConjugatePair pair = conjugate(u, dual);
  REQUIRE(pair.flagged() == 0);
  double verr = 0.0;
  for (int jy = 0; jy < dual.m[1]; ++jy)
    for (int jx = 0; jx < dual.m[0]; ++jx) {
      const Point xt = dual.node(jx, jy);
      const Point xs = (1.0 / kappa) * xt;
      const double expected = kappa * closed_conj(Q, {0.0, 0.0}, 0.0, xs, 2);
      verr = std::fmax(verr, std::fabs(pair.dual.at(jx, jy) - expected));
    }
  CHECK(verr <= 1e-8);
}

TEST_CASE("hessian duality: D^2u* is the pointwise inverse of D^2u") {
  SUBCASE("anisotropic quadratic") {
    const ScalarField u = quad_field(primal_2d, Sym2::diag(1.0, 2.0), {0.0, 0.0}, 0.0);
    const ConjugatePair pair = conjugate(u, suggest_dual_grid(u, {33, 33}));
    CHECK(hessian_duality_check(pair) <= 1e-8);
  }
  SUBCASE("identity quadratic") {
    const ScalarField u = quad_field(primal_2d, Sym2::identity(2), {0.0, 0.0}, 0.0);
    const ConjugatePair pair = conjugate(u, suggest_dual_grid(u, {33, 33}));
    CHECK(hessian_duality_check(pair) <= 1e-8);
  }
  SUBCASE("1D e^x at h = 1e-2: budget 2e-4 around xt = e") {
    const GridSpec g = GridSpec::box_1d(0.0, 2.0, 201);
    const ScalarField u = ScalarField::sample(g, [](Point x) { return std::exp(x[0]); });
    const ConjugatePair pair = conjugate(u, GridSpec::box_1d(2.2, 4.0, 41));
    REQUIRE(pair.flagged() == 0);
    CHECK(hessian_duality_check(pair) <= 2e-4);
  }
}

TEST_CASE("1D e^x conjugate: u* = xt log xt - xt on the attainable range") {
  const GridSpec g = GridSpec::box_1d(0.0, 2.0, 201);
  const ScalarField u = ScalarField::sample(g, [](Point x) { return std::exp(x[0]); });
  const GridSpec dual = GridSpec::box_1d(1.2, 6.8, 85);
  const ConjugatePair pair = conjugate(u, dual);
  REQUIRE(pair.flagged() == 0);

  double verr = 0.0, ferr = 0.0;
  for (int j = 0; j < dual.m[0]; ++j) {
    const double xt = dual.coord(0, j);
    verr = std::fmax(verr, std::fabs(pair.dual.at(j) - (xt * std::log(xt) - xt)));
    // Fenchel equality with u evaluated analytically at the stored match
    const double x = pair.match[j][0];
    ferr = std::fmax(ferr, std::fabs(std::exp(x) + pair.dual.at(j) - x * xt));
  }
  CHECK(verr <= 1e-5);
  CHECK(ferr <= 1e-5);
}

TEST_CASE("fenchel equality holds at matched points of quadratics") {
  const Sym2 Q{2.0, 0.4, 1.0};
  const Point p{-0.2, 0.5};
  const ScalarField u = quad_field(primal_2d, Q, p, 0.3);
  // explicit dual box inside the sheared gradient image (see order reversal)
  const GridSpec dual = GridSpec::square_box(-1.5, 1.5, 21);
  const ConjugatePair pair = conjugate(u, dual);
  REQUIRE(pair.flagged() == 0);
  double ferr = 0.0;
  for (int jy = 0; jy < dual.m[1]; ++jy)
    for (int jx = 0; jx < dual.m[0]; ++jx) {
      const Point xt = dual.node(jx, jy);
      const Point x = pair.match[dual.index(jx, jy)];
      const double ux = 0.5 * dot(x, Q.apply(x, 2)) + dot(p, x) + 0.3;
      ferr = std::fmax(ferr, std::fabs(ux + pair.dual.at(jx, jy) - dot(x, xt)));
    }
  CHECK(ferr <= 1e-8);
}

TEST_CASE("gradient inversion: Du* at dual nodes returns the maximizer") {
  const ScalarField u = quad_field(primal_2d, Sym2::diag(1.0, 2.0), {0.0, 0.0}, 0.0);
  const GridSpec dual = suggest_dual_grid(u, {33, 33});
  const ConjugatePair pair = conjugate(u, dual);
  REQUIRE(pair.flagged() == 0);
  const VectorField dual_grad = gradient(pair.dual);
  const IndexBox ib = interior_box(dual, 1);
  double gerr = 0.0;
  for (int jy = ib.first[1]; jy <= ib.last[1]; ++jy)
    for (int jx = ib.first[0]; jx <= ib.last[0]; ++jx) {
      const Point gs = dual_grad.at(jx, jy);
      const Point xm = pair.match[dual.index(jx, jy)];
      gerr = std::fmax(gerr, std::fmax(std::fabs(gs[0] - xm[0]), std::fabs(gs[1] - xm[1])));
    }
  CHECK(gerr <= 1e-9);
}

TEST_CASE("dual equation: drift data swaps sides under conjugation") {
  SUBCASE("compatible quadratic soliton") {
    // Q = diag(1,2), a = (1,1) -> b = (1,2), c = ln 2; det D^2u* = 1/2 and the
    // dual exponent collapses to <a,p> - c = -ln 2, so the residual vanishes
    const QuadraticSoliton s =
        make_quadratic_soliton(Sym2::diag(1.0, 2.0), {0.0, 0.0}, {1.0, 1.0});
    CHECK(s.params.b[0] == 1.0);
    CHECK(s.params.b[1] == 2.0);
    CHECK(std::fabs(s.params.c - std::log(2.0)) <= 1e-15);
    const ScalarField u = quad_field(primal_2d, s.u.Q, s.u.p, s.u.q);
    const ConjugatePair pair = conjugate(u, suggest_dual_grid(u, {33, 33}));
    REQUIRE(pair.flagged() == 0);
    CHECK(dual_pde_residual(pair, s.params) <= 1e-6);
  }
  SUBCASE("zero drift data with the self-dual quadratic") {
    const ScalarField u = quad_field(primal_2d, Sym2::identity(2), {0.0, 0.0}, 0.0);
    const ConjugatePair pair = conjugate(u, suggest_dual_grid(u, {33, 33}));
    SolitonParams params;  // a = b = 0, c = 0
    CHECK(dual_pde_residual(pair, params) <= 1e-8);
  }
  SUBCASE("a primal field violating the equation shows a bounded-away residual") {
    const GridSpec g1 = GridSpec::box_1d(-2.0, 2.0, 101);
    const ScalarField u =
        ScalarField::sample(g1, [](Point x) { return 0.5 * x[0] * x[0]; });
    SolitonParams params;
    params.dim = 1;
    params.a = {1.0, 0.0};
    const ConjugatePair pair = conjugate(u, suggest_dual_grid(u, {41, 1}));
    REQUIRE(pair.flagged() == 0);
    // det D^2u* = 1 but exp(a xt - ...) = e^{xt}: gap e^{xt_max} - 1 > 0.5
    CHECK(dual_pde_residual(pair, params) > 0.5);
  }
  SUBCASE("dimension mismatch is rejected") {
    const ScalarField u = quad_field(primal_2d, Sym2::identity(2), {0.0, 0.0}, 0.0);
    const ConjugatePair pair = conjugate(u, suggest_dual_grid(u, {21, 21}));
    SolitonParams params;
    params.dim = 1;
    CHECK_THROWS_AS(dual_pde_residual(pair, params), std::invalid_argument);
  }
}

TEST_CASE("biconjugation returns the original field on the central sub-box") {
  SUBCASE("identity quadratic") {
    const ScalarField u = quad_field(primal_2d, Sym2::identity(2), {0.0, 0.0}, 0.0);
    CHECK(involution_check(u, suggest_dual_grid(u, {33, 33})) <= 1e-6);
  }
  SUBCASE("anisotropic quadratic with a linear shift") {
    const ScalarField u = quad_field(primal_2d, Sym2::diag(1.0, 2.0), {0.3, 0.0}, 0.0);
    CHECK(involution_check(u, suggest_dual_grid(u, {33, 33})) <= 1e-5);
  }
  SUBCASE("1D e^x, compared on the central quarter box [0.5, 1.5]") {
    const GridSpec g = GridSpec::box_1d(0.0, 2.0, 201);
    const ScalarField u = ScalarField::sample(g, [](Point x) { return std::exp(x[0]); });
    CHECK(involution_check(u, GridSpec::box_1d(1.2, 6.8, 85)) <= 1e-4);
  }
  SUBCASE("a dual grid beyond the gradient image fails with a nesting error") {
    const ScalarField u = quad_field(primal_2d, Sym2::identity(2), {0.0, 0.0}, 0.0);
    CHECK_THROWS_AS(involution_check(u, GridSpec::square_box(-5.0, 5.0, 21)),
                    std::runtime_error);
  }
}

TEST_CASE("dual nodes outside the gradient image are flagged as boundary") {
  const ScalarField u = quad_field(primal_2d, Sym2::identity(2), {0.0, 0.0}, 0.0);
  // attainable interior gradient range is about [-2.9, 2.9] per axis
  const GridSpec wide = GridSpec::square_box(-5.0, 5.0, 21);
  const ConjugatePair pair = conjugate(u, wide);
  CHECK(pair.flagged() > 0);
  CHECK(pair.status[wide.index(0, 0)] == MatchStatus::boundary);
  CHECK(pair.dual.at(0, 0) == 0.0);
  // interior dual nodes still resolve
  CHECK(pair.status[wide.index(10, 10)] == MatchStatus::ok);

  SUBCASE("an entirely unattainable dual grid leaves nothing to check") {
    const ConjugatePair lost = conjugate(u, GridSpec::square_box(10.0, 12.0, 9));
    CHECK(lost.flagged() == lost.dual.grid.node_count());
    CHECK_THROWS_AS(hessian_duality_check(lost), std::runtime_error);
    SolitonParams params;
    CHECK_THROWS_AS(dual_pde_residual(lost, params), std::runtime_error);
  }
}

TEST_CASE("suggested dual grid shrinks the gradient-image box by 10%") {
  // gradient image of 1/2|x|^2 over the margin-1 interior of [-3,3], m=13 is
  // [-2.5, 2.5]^2; shrinking 10% of the length (5%, each end) gives +-2.25
  const GridSpec g = GridSpec::square_box(-3.0, 3.0, 13);
  const ScalarField u = quad_field(g, Sym2::identity(2), {0.0, 0.0}, 0.0);
  const GridSpec dual = suggest_dual_grid(u, {11, 11});
  for (int ax = 0; ax < 2; ++ax) {
    CHECK(std::fabs(dual.lo[ax] + 2.25) <= 1e-12);
    CHECK(std::fabs(dual.hi[ax] - 2.25) <= 1e-12);
    CHECK(dual.m[ax] == 11);
  }
  CHECK_THROWS_AS(suggest_dual_grid(u, {11, 11}, -0.1), std::invalid_argument);
  CHECK_THROWS_AS(suggest_dual_grid(u, {11, 11}, 1.0), std::invalid_argument);
}

TEST_CASE("transform preconditions: convex box fields only") {
  const GridSpec torus = GridSpec::square_torus(0.0, 1.0, 8);
  const ScalarField vt = ScalarField::zeros(torus);
  CHECK_THROWS_AS(conjugate(vt, GridSpec::square_box(0.0, 1.0, 9)), std::invalid_argument);

  const ScalarField concave = ScalarField::sample(
      primal_2d, [](Point x) { return -0.5 * dot(x, x); });
  CHECK_THROWS_AS(conjugate(concave, GridSpec::square_box(-1.0, 1.0, 9)), std::domain_error);
  CHECK_THROWS_AS(suggest_dual_grid(concave, {9, 9}), std::domain_error);
}
