#include <cmath>
#include <random>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "doctest.h"
#include "kernels.hpp"

// The parallel kernels and their serial twins must produce bit-identical
// output: every reduction is a max/min/integer add and per-node arithmetic is
// shared, so no tolerance is needed anywhere in this file.

using namespace malab;

namespace {

// deterministic rough field; parity must hold for arbitrary values
ScalarField random_field(const GridSpec& g, unsigned seed, double amp = 1.0) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> d(-amp, amp);
  ScalarField u = ScalarField::zeros(g);
  for (double& v : u.values) v = d(rng);
  return u;
}

// random values riding on a convex bowl, so flow_step and lf_coarse see a
// mostly-sane potential while the noise still exercises every code path
ScalarField noisy_bowl(const GridSpec& g, unsigned seed, double noise) {
  ScalarField u = random_field(g, seed, noise);
  for (int iy = 0; iy < g.m[1]; ++iy)
    for (int ix = 0; ix < g.m[0]; ++ix) {
      const Point x = g.node(ix, iy);
      u.at(ix, iy) += dot(x, x);
    }
  return u;
}

bool same(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] != b[i]) return false;
  return true;
}

}  // namespace

TEST_CASE("derivative kernels agree bitwise with the serial reference") {
  const GridSpec boxes[] = {GridSpec::square_box(-1.5, 2.0, 37),
                            GridSpec::square_torus(0.0, 3.0, 24)};
  unsigned seed = 101;
  for (const GridSpec& g : boxes) {
    const ScalarField u = random_field(g, seed++);

    VectorField g_omp = VectorField::zeros(g, 1), g_ser = VectorField::zeros(g, 1);
    kernels::gradient(u, g_omp);
    kernels::serial::gradient(u, g_ser);
    CHECK(same(g_omp.comp[0], g_ser.comp[0]));
    CHECK(same(g_omp.comp[1], g_ser.comp[1]));

    SymmetricMatrixField h_omp = SymmetricMatrixField::zeros(g, 2),
                         h_ser = SymmetricMatrixField::zeros(g, 2);
    kernels::hessian(u, h_omp);
    kernels::serial::hessian(u, h_ser);
    CHECK(same(h_omp.xx, h_ser.xx));
    CHECK(same(h_omp.xy, h_ser.xy));
    CHECK(same(h_omp.yy, h_ser.yy));

    CHECK(kernels::third_sup_sq(u) == kernels::serial::third_sup_sq(u));

    ScalarField e_omp = ScalarField::zeros(g, FieldRole::derived),
                e_ser = ScalarField::zeros(g, FieldRole::derived);
    kernels::min_eigenvalue(h_omp, e_omp);
    kernels::serial::min_eigenvalue(h_ser, e_ser);
    CHECK(same(e_omp.values, e_ser.values));

    const Sym2 bg = Sym2::diag(2.0, 0.5);
    for (const Sym2* b : {static_cast<const Sym2*>(nullptr), &bg}) {
      const kernels::EigRange r_omp = kernels::hessian_eig_range(u, b, 2);
      const kernels::EigRange r_ser = kernels::serial::hessian_eig_range(u, b, 2);
      CHECK(r_omp.lo == r_ser.lo);
      CHECK(r_omp.hi == r_ser.hi);
    }
  }
}

TEST_CASE("flow step agrees bitwise, including the first-bad-node index") {
  const GridSpec g = GridSpec::square_box(-2.0, 2.0, 41);
  SUBCASE("convex potential: identical updates, npos on both sides") {
    const ScalarField u = noisy_bowl(g, 7, 1e-3);
    std::vector<double> out_omp(u.values.size(), -1.0), out_ser(u.values.size(), -1.0);
    const std::size_t b_omp = kernels::flow_step(u, nullptr, 1e-4, 1.0, out_omp);
    const std::size_t b_ser = kernels::serial::flow_step(u, nullptr, 1e-4, 1.0, out_ser);
    CHECK(b_omp == kernels::npos);
    CHECK(b_ser == kernels::npos);
    CHECK(same(out_omp, out_ser));
  }
  SUBCASE("poisoned nodes: both variants report the lowest flat index") {
    ScalarField u = noisy_bowl(g, 8, 1e-3);
    u.at(30, 11) += 50.0;  // spike kills convexity around two separate nodes
    u.at(9, 25) += 50.0;
    std::vector<double> out_omp(u.values.size(), 0.0), out_ser(u.values.size(), 0.0);
    const std::size_t b_omp = kernels::flow_step(u, nullptr, 1e-4, 1.0, out_omp);
    const std::size_t b_ser = kernels::serial::flow_step(u, nullptr, 1e-4, 1.0, out_ser);
    CHECK(b_omp != kernels::npos);
    CHECK(b_omp == b_ser);
  }
  SUBCASE("perturbation on a background") {
    const GridSpec t = GridSpec::square_torus(0.0, 6.0, 24);
    const ScalarField v = random_field(t, 9, 1e-2);
    ScalarField vp = ScalarField::zeros(t, FieldRole::perturbation);
    vp.values = v.values;
    const Sym2 bg = Sym2::diag(1.0, 3.0);
    std::vector<double> out_omp(vp.values.size(), 0.0), out_ser(vp.values.size(), 0.0);
    CHECK(kernels::flow_step(vp, &bg, 1e-4, 1.0, out_omp) ==
          kernels::serial::flow_step(vp, &bg, 1e-4, 1.0, out_ser));
    CHECK(same(out_omp, out_ser));
  }
}

TEST_CASE("equation residual agrees bitwise, overflow census included") {
  const GridSpec g = GridSpec::square_box(-3.0, 3.0, 29);
  const ScalarField u = noisy_bowl(g, 21, 1e-2);
  const Point a{0.7, -0.4};
  const Point b{300.0, 0.0};  // large drift overflows the exponent on one side
  ScalarField r_omp = ScalarField::zeros(g, FieldRole::derived),
              r_ser = ScalarField::zeros(g, FieldRole::derived);
  long ovf_omp = -1, ovf_ser = -1;
  const double s_omp = kernels::ma_residual(u, a, b, 0.3, r_omp, ovf_omp);
  const double s_ser = kernels::serial::ma_residual(u, a, b, 0.3, r_ser, ovf_ser);
  CHECK(s_omp == s_ser);
  CHECK(ovf_omp == ovf_ser);
  CHECK(ovf_omp > 0);
  CHECK(same(r_omp.values, r_ser.values));
}

TEST_CASE("coarse conjugation scan picks identical argmax nodes") {
  const GridSpec g = GridSpec::square_box(-2.0, 2.0, 33);
  const GridSpec dual = GridSpec::square_box(-1.0, 1.0, 15);
  SUBCASE("smooth convex input") {
    const ScalarField u = noisy_bowl(g, 33, 0.0);
    std::vector<std::size_t> a_omp, a_ser;
    kernels::lf_coarse(u, dual, 2, a_omp);
    kernels::serial::lf_coarse(u, dual, 2, a_ser);
    REQUIRE(a_omp.size() == dual.node_count());
    CHECK(a_omp == a_ser);
  }
  SUBCASE("rough input with ties broken by scan order") {
    // piecewise-constant plateaus force exact ties in <x, xt> - u(x)
    ScalarField u = ScalarField::zeros(g);
    for (int iy = 0; iy < g.m[1]; ++iy)
      for (int ix = 0; ix < g.m[0]; ++ix) u.at(ix, iy) = (ix / 4 + iy / 4) % 3;
    std::vector<std::size_t> a_omp, a_ser;
    kernels::lf_coarse(u, dual, 2, a_omp);
    kernels::serial::lf_coarse(u, dual, 2, a_ser);
    CHECK(a_omp == a_ser);
  }
}

#ifdef _OPENMP
TEST_CASE("results are independent of the thread count") {
  const GridSpec g = GridSpec::square_box(-1.0, 1.0, 51);
  const ScalarField u = noisy_bowl(g, 55, 5e-3);
  const int saved = omp_get_max_threads();

  omp_set_num_threads(1);
  SymmetricMatrixField h1 = SymmetricMatrixField::zeros(g, 2);
  kernels::hessian(u, h1);
  const double t1 = kernels::third_sup_sq(u);
  std::vector<double> f1(u.values.size(), 0.0);
  const std::size_t b1 = kernels::flow_step(u, nullptr, 1e-4, 1.0, f1);

  omp_set_num_threads(3);
  SymmetricMatrixField h3 = SymmetricMatrixField::zeros(g, 2);
  kernels::hessian(u, h3);
  const double t3 = kernels::third_sup_sq(u);
  std::vector<double> f3(u.values.size(), 0.0);
  const std::size_t b3 = kernels::flow_step(u, nullptr, 1e-4, 1.0, f3);

  omp_set_num_threads(saved);
  CHECK(same(h1.xx, h3.xx));
  CHECK(same(h1.xy, h3.xy));
  CHECK(same(h1.yy, h3.yy));
  CHECK(t1 == t3);
  CHECK(b1 == b3);
  CHECK(same(f1, f3));
}
#endif
