#include "malab/legendre.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "detail/interp.hpp"
#include "detail/node_ops.hpp"
#include "detail/stencil.hpp"
#include "kernels.hpp"
#include "malab/calculus.hpp"

namespace malab {

namespace {

constexpr double newton_tol = 1e-12;
constexpr int newton_max_iters = 30;

void require_convex_box(const ScalarField& u, const char* op) {
  u.grid.validate();
  u.require_finite(op);
  if (u.grid.topology != Topology::box)
    throw std::invalid_argument(std::string(op) + ": needs a box grid");
  const kernels::EigRange r = kernels::hessian_eig_range(u, nullptr, 2);
  if (!(r.lo > 0.0))
    throw std::domain_error(std::string(op) +
                            ": field is not strictly convex on the interior (min eig = " +
                            std::to_string(r.lo) + ")");
}

Point clamp_to_hull(const GridSpec& g, Point x, int margin) {
  for (int ax = 0; ax < g.dim; ++ax) {
    const double lo = g.coord(ax, margin);
    const double hi = g.coord(ax, g.m[ax] - 1 - margin);
    x[ax] = std::fmin(std::fmax(x[ax], lo), hi);
  }
  return x;
}

// all dual nodes within Chebyshev distance `radius` carry ok status
bool stencil_clean(const std::vector<MatchStatus>& status, const GridSpec& g, int ix, int iy,
                   int radius) {
  const int y_lo = g.dim == 2 ? iy - radius : 0;
  const int y_hi = g.dim == 2 ? iy + radius : 0;
  for (int jy = y_lo; jy <= y_hi; ++jy)
    for (int jx = ix - radius; jx <= ix + radius; ++jx)
      if (status[g.index(jx, jy)] != MatchStatus::ok) return false;
  return true;
}

}  // namespace

std::size_t ConjugatePair::flagged() const {
  std::size_t n = 0;
  for (const MatchStatus s : status)
    if (s != MatchStatus::ok) ++n;
  return n;
}

GridSpec suggest_dual_grid(const ScalarField& u, std::array<int, 2> m, double shrink) {
  require_convex_box(u, "suggest_dual_grid");
  if (!(shrink >= 0.0) || shrink >= 1.0)
    throw std::invalid_argument("suggest_dual_grid: shrink must lie in [0, 1)");
  const VectorField g = gradient(u);
  const IndexBox ib = interior_box(u.grid, 1);
  Point lo{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  Point hi{-lo[0], -lo[1]};
  for (int iy = ib.first[1]; iy <= ib.last[1]; ++iy)
    for (int ix = ib.first[0]; ix <= ib.last[0]; ++ix) {
      const Point v = g.at(ix, iy);
      for (int ax = 0; ax < u.grid.dim; ++ax) {
        lo[ax] = std::fmin(lo[ax], v[ax]);
        hi[ax] = std::fmax(hi[ax], v[ax]);
      }
    }
  GridSpec dual;
  dual.dim = u.grid.dim;
  dual.topology = Topology::box;
  dual.m = u.grid.dim == 2 ? m : std::array<int, 2>{m[0], 1};
  for (int ax = 0; ax < u.grid.dim; ++ax) {
    const double len = hi[ax] - lo[ax];
    if (!(len > 0.0))
      throw std::domain_error("suggest_dual_grid: gradient image degenerate along axis " +
                              std::to_string(ax));
    dual.lo[ax] = lo[ax] + 0.5 * shrink * len;
    dual.hi[ax] = hi[ax] - 0.5 * shrink * len;
  }
  dual.validate();
  return dual;
}

ConjugatePair conjugate(const ScalarField& u, const GridSpec& dual_grid) {
  require_convex_box(u, "conjugate");
  dual_grid.validate();
  if (dual_grid.topology != Topology::box || dual_grid.dim != u.grid.dim)
    throw std::invalid_argument("conjugate: dual grid must be a box of the same dimension");

  const VectorField grad_f = gradient(u);
  const SymmetricMatrixField hess_f = hessian(u);
  std::vector<std::size_t> argmax;
  kernels::lf_coarse(u, dual_grid, 2, argmax);

  ConjugatePair pair;
  pair.primal = u;
  pair.dual = ScalarField::zeros(dual_grid, FieldRole::derived);
  pair.match.assign(dual_grid.node_count(), Point{0.0, 0.0});
  pair.status.assign(dual_grid.node_count(), MatchStatus::ok);

  const IndexBox scan = interior_box(u.grid, 2);
  const int mx = u.grid.m[0];
  const int djx = dual_grid.m[0];
  const int djy = dual_grid.m[1];

#pragma omp parallel for collapse(2)
  for (int jy = 0; jy < djy; ++jy)
    for (int jx = 0; jx < djx; ++jx) {
      const std::size_t j = dual_grid.index(jx, jy);
      const Point xt = dual_grid.node(jx, jy);
      const std::size_t flat = argmax[j];
      const int ix = static_cast<int>(flat % mx);
      const int iy = static_cast<int>(flat / mx);
      if (scan.on_edge(ix, iy)) {
        // the sup runs away to the scan boundary: xt is outside the gradient
        // range attained on the interior
        pair.status[j] = MatchStatus::boundary;
        continue;
      }
      Point x = u.grid.node(ix, iy);
      bool converged = false;
      for (int it = 0; it <= newton_max_iters; ++it) {
        const Point r = detail::interp_vector(grad_f, x) - xt;
        if (norm(r) <= newton_tol) {
          converged = true;
          break;
        }
        if (it == newton_max_iters) break;
        const Sym2 H = detail::interp_matrix(hess_f, x);
        if (!(H.det(u.grid.dim) > 0.0)) break;
        x = clamp_to_hull(u.grid, x - H.inverse(u.grid.dim).apply(r, u.grid.dim), 2);
      }
      if (!converged) {
        pair.status[j] = MatchStatus::no_converge;
        continue;
      }
      pair.match[j] = x;
      pair.dual.values[j] = dot(x, xt) - detail::taylor_value(u, grad_f, hess_f, x);
    }
  return pair;
}

double hessian_duality_check(const ConjugatePair& pair) {
  const GridSpec& dg = pair.dual.grid;
  const SymmetricMatrixField primal_hess = hessian(pair.primal);
  const detail::StencilView sv(pair.dual);
  const IndexBox ib = interior_box(dg, 2);
  const int dim = dg.dim;
  double sup = 0.0;
  std::size_t used = 0;
  for (int iy = ib.first[1]; iy <= ib.last[1]; ++iy)
    for (int ix = ib.first[0]; ix <= ib.last[0]; ++ix) {
      if (!stencil_clean(pair.status, dg, ix, iy, 1)) continue;
      const Sym2 Hd = sv.hess(ix, iy);
      const Sym2 Hm = detail::interp_matrix(primal_hess, pair.match[dg.index(ix, iy)]);
      // product of two symmetric matrices is not symmetric; check as Mat2
      const Mat2 prod{{Hd.xx * Hm.xx + Hd.xy * Hm.xy, Hd.xx * Hm.xy + Hd.xy * Hm.yy,
                       Hd.xy * Hm.xx + Hd.yy * Hm.xy, Hd.xy * Hm.xy + Hd.yy * Hm.yy}};
      sup = std::fmax(sup, prod.deviation_from_identity(dim));
      ++used;
    }
  if (used == 0)
    throw std::runtime_error("hessian_duality_check: no clean dual interior nodes to evaluate");
  return sup;
}

double dual_pde_residual(const ConjugatePair& pair, const SolitonParams& params) {
  params.validate();
  const GridSpec& dg = pair.dual.grid;
  if (params.dim != dg.dim)
    throw std::invalid_argument("dual_pde_residual: params and dual grid dimension mismatch");
  const detail::StencilView sv(pair.dual);
  const IndexBox ib = interior_box(dg, 2);
  double sup = 0.0;
  std::size_t used = 0;
  for (int iy = ib.first[1]; iy <= ib.last[1]; ++iy)
    for (int ix = ib.first[0]; ix <= ib.last[0]; ++ix) {
      if (!stencil_clean(pair.status, dg, ix, iy, 1)) continue;
      const Point xt = dg.node(ix, iy);
      const Point grad_star = sv.grad(ix, iy);
      const double e = dot(params.a, xt) - dot(params.b, grad_star) - params.c;
      if (e > detail::exp_overflow_limit) continue;  // diagnostic, not a crash
      const double det = sv.hess(ix, iy).det(dg.dim);
      sup = std::fmax(sup, std::fabs(det - std::exp(e)));
      ++used;
    }
  if (used == 0)
    throw std::runtime_error("dual_pde_residual: no clean dual interior nodes to evaluate");
  return sup;
}

double involution_check(const ScalarField& u, const GridSpec& dual_grid) {
  const ConjugatePair first = conjugate(u, dual_grid);
  if (const std::size_t n = first.flagged(); n > 0)
    throw std::runtime_error("involution_check: insufficient nesting, " + std::to_string(n) +
                             " dual nodes fall outside the attainable gradient range");

  // node-aligned central sub-box of the primal grid: (u*)* values compare
  // against primal node values directly
  const GridSpec& pg = u.grid;
  GridSpec ddual;
  ddual.dim = pg.dim;
  ddual.topology = Topology::box;
  std::array<int, 2> q{pg.m[0] / 4, pg.m[1] / 4};
  if (pg.dim == 1) q[1] = 0;
  for (int ax = 0; ax < pg.dim; ++ax) {
    ddual.lo[ax] = pg.coord(ax, q[ax]);
    ddual.hi[ax] = pg.coord(ax, pg.m[ax] - 1 - q[ax]);
    ddual.m[ax] = pg.m[ax] - 2 * q[ax];
  }
  if (pg.dim == 1) ddual.m[1] = 1;
  ddual.validate();

  const ConjugatePair second = conjugate(first.dual, ddual);
  if (const std::size_t n = second.flagged(); n > 0)
    throw std::runtime_error("involution_check: insufficient nesting, " + std::to_string(n) +
                             " double-dual nodes fall outside the attainable gradient range");

  double sup = 0.0;
  for (int jy = 0; jy < ddual.m[1]; ++jy)
    for (int jx = 0; jx < ddual.m[0]; ++jx)
      sup = std::fmax(sup, std::fabs(second.dual.at(jx, jy) - u.at(jx + q[0], jy + q[1])));
  return sup;
}

}  // namespace malab
