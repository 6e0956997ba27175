#include <cmath>
#include <limits>

#include "detail/node_ops.hpp"
#include "detail/stencil.hpp"
#include "kernels.hpp"

// OpenMP drivers. Loop bodies live in detail/node_ops.hpp and
// detail/stencil.hpp; kernels_serial.cpp runs the same bodies with plain
// loops. Reductions are restricted to max/min/integer-add, which are
// order-independent, so results do not depend on the thread partition.

namespace malab::kernels {

void gradient(const ScalarField& u, VectorField& out) {
  const detail::StencilView s(u);
  const IndexBox ib = interior_box(u.grid, 1);
  const int dim = u.grid.dim;
  const int mx = u.grid.m[0];
  double* gx = out.comp[0].data();
  double* gy = out.comp[1].data();
#pragma omp parallel for collapse(2)
  for (int iy = ib.first[1]; iy <= ib.last[1]; ++iy)
    for (int ix = ib.first[0]; ix <= ib.last[0]; ++ix) {
      const std::size_t idx = static_cast<std::size_t>(iy) * mx + ix;
      gx[idx] = s.d1(ix, iy, 0);
      if (dim == 2) gy[idx] = s.d1(ix, iy, 1);
    }
}

void hessian(const ScalarField& u, SymmetricMatrixField& out) {
  const detail::StencilView s(u);
  const IndexBox ib = interior_box(u.grid, 2);
  const int mx = u.grid.m[0];
  double* hxx = out.xx.data();
  double* hxy = out.xy.data();
  double* hyy = out.yy.data();
#pragma omp parallel for collapse(2)
  for (int iy = ib.first[1]; iy <= ib.last[1]; ++iy)
    for (int ix = ib.first[0]; ix <= ib.last[0]; ++ix) {
      const std::size_t idx = static_cast<std::size_t>(iy) * mx + ix;
      const Sym2 H = s.hess(ix, iy);
      hxx[idx] = H.xx;
      hxy[idx] = H.xy;
      hyy[idx] = H.yy;
    }
}

double third_sup_sq(const ScalarField& u) {
  const detail::StencilView s(u);
  const IndexBox ib = interior_box(u.grid, 3);
  double sup = 0.0;
#pragma omp parallel for collapse(2) reduction(max : sup)
  for (int iy = ib.first[1]; iy <= ib.last[1]; ++iy)
    for (int ix = ib.first[0]; ix <= ib.last[0]; ++ix)
      sup = std::fmax(sup, s.third_sq(ix, iy));
  return sup;
}

void min_eigenvalue(const SymmetricMatrixField& h, ScalarField& out) {
  const int dim = h.grid.dim;
  const int mx = h.grid.m[0];
  const int my = h.grid.m[1];
  const double* hxx = h.xx.data();
  const double* hxy = h.xy.data();
  const double* hyy = h.yy.data();
  double* o = out.values.data();
#pragma omp parallel for collapse(2)
  for (int iy = 0; iy < my; ++iy)
    for (int ix = 0; ix < mx; ++ix) {
      const std::size_t idx = static_cast<std::size_t>(iy) * mx + ix;
      o[idx] = Sym2{hxx[idx], hxy[idx], hyy[idx]}.eig_min(dim);
    }
}

EigRange hessian_eig_range(const ScalarField& u, const Sym2* background, int margin) {
  const detail::StencilView s(u);
  const IndexBox ib = interior_box(u.grid, margin);
  const int dim = u.grid.dim;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
#pragma omp parallel for collapse(2) reduction(min : lo) reduction(max : hi)
  for (int iy = ib.first[1]; iy <= ib.last[1]; ++iy)
    for (int ix = ib.first[0]; ix <= ib.last[0]; ++ix) {
      const Sym2 H = detail::effective_hessian_at(s, background, ix, iy);
      lo = std::fmin(lo, H.eig_min(dim));
      hi = std::fmax(hi, H.eig_max(dim));
    }
  return {lo, hi};
}

std::size_t flow_step(const ScalarField& u, const Sym2* background, double dt, double nu,
                      std::vector<double>& out) {
  const detail::StencilView s(u);
  const IndexBox ib = interior_box(u.grid, 2);
  const int dim = u.grid.dim;
  const int mx = u.grid.m[0];
  const double dt_nu = dt * nu;
  const double log_det_bg = background ? std::log(background->det(dim)) : 0.0;
  const double* uv = u.values.data();
  double* o = out.data();
  std::size_t bad = npos;
#pragma omp parallel for collapse(2) reduction(min : bad)
  for (int iy = ib.first[1]; iy <= ib.last[1]; ++iy)
    for (int ix = ib.first[0]; ix <= ib.last[0]; ++ix) {
      const std::size_t idx = static_cast<std::size_t>(iy) * mx + ix;
      if (!detail::flow_update_at(s, background, dim, dt_nu, log_det_bg, ix, iy, uv, o, idx))
        if (idx < bad) bad = idx;
    }
  return bad;
}

double ma_residual(const ScalarField& u, const Point& a, const Point& b, double c,
                   ScalarField& out, long& overflow_count) {
  const detail::StencilView s(u);
  const IndexBox ib = interior_box(u.grid, 2);
  const int dim = u.grid.dim;
  const int mx = u.grid.m[0];
  double* o = out.values.data();
  double sup = 0.0;
  long ovf = 0;
#pragma omp parallel for collapse(2) reduction(max : sup) reduction(+ : ovf)
  for (int iy = ib.first[1]; iy <= ib.last[1]; ++iy)
    for (int ix = ib.first[0]; ix <= ib.last[0]; ++ix) {
      const Point x = u.grid.node(ix, iy);
      const detail::ResidualNode r = detail::residual_at(s, a, b, c, dim, x, ix, iy);
      o[static_cast<std::size_t>(iy) * mx + ix] = r.value;
      if (r.overflow)
        ++ovf;
      else
        sup = std::fmax(sup, std::fabs(r.value));
    }
  overflow_count = ovf;
  return sup;
}

void lf_coarse(const ScalarField& u, const GridSpec& dual, int primal_margin,
               std::vector<std::size_t>& argmax) {
  const IndexBox ib = interior_box(u.grid, primal_margin);
  const int mx = u.grid.m[0];
  const double* uv = u.values.data();
  std::vector<double> xs(u.grid.m[0]), ys(u.grid.m[1]);
  for (int i = 0; i < u.grid.m[0]; ++i) xs[i] = u.grid.coord(0, i);
  ys[0] = 0.0;
  if (u.grid.dim == 2)
    for (int j = 0; j < u.grid.m[1]; ++j) ys[j] = u.grid.coord(1, j);
  argmax.assign(dual.node_count(), npos);
  const int djy_n = dual.m[1];
  const int djx_n = dual.m[0];
  // parallel over dual nodes; the inner primal scan stays sequential, so the
  // tie-break (first node in scan order) is partition-independent
#pragma omp parallel for collapse(2)
  for (int jy = 0; jy < djy_n; ++jy)
    for (int jx = 0; jx < djx_n; ++jx) {
      const Point xt = dual.node(jx, jy);
      double best = -std::numeric_limits<double>::infinity();
      std::size_t bi = npos;
      for (int iy = ib.first[1]; iy <= ib.last[1]; ++iy)
        for (int ix = ib.first[0]; ix <= ib.last[0]; ++ix) {
          const double val = detail::lf_score(xs.data(), ys.data(), uv, mx, xt, ix, iy);
          if (val > best) {
            best = val;
            bi = static_cast<std::size_t>(iy) * mx + ix;
          }
        }
      argmax[dual.index(jx, jy)] = bi;
    }
}

}  // namespace malab::kernels
