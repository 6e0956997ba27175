#pragma once

#include <cmath>

#include "detail/stencil.hpp"
#include "malab/grid.hpp"

// Node-level bodies of the compound kernels (flow step, PDE residual,
// Legendre coarse score). Shared between the OpenMP and serial drivers so
// the pair can never drift apart arithmetically.

namespace malab::detail {

// exp() overflows just above this; exponents beyond it are flagged as
// diagnostics instead of producing inf in residual fields.
inline constexpr double exp_overflow_limit = 709.0;

struct ResidualNode {
  double value;
  bool overflow;
};

inline ResidualNode residual_at(const StencilView& s, const Point& a, const Point& b, double c,
                                int dim, const Point& x, int ix, int iy) {
  const Point g = s.grad(ix, iy);
  const Sym2 H = s.hess(ix, iy);
  const double e = -(a[0] * g[0] + a[1] * g[1]) + (b[0] * x[0] + b[1] * x[1]) + c;
  if (e > exp_overflow_limit) return {0.0, true};
  return {H.det(dim) - std::exp(e), false};
}

// Effective Hessian at a node: D^2 of the stored field plus the quadratic
// background (perturbation mode), or the plain Hessian for full potentials.
inline Sym2 effective_hessian_at(const StencilView& s, const Sym2* bg, int ix, int iy) {
  Sym2 H = s.hess(ix, iy);
  if (bg) H = *bg + H;
  return H;
}

// Explicit Euler update of one node; false when convexity is lost there.
inline bool flow_update_at(const StencilView& s, const Sym2* bg, int dim, double dt_nu,
                           double log_det_bg, int ix, int iy, const double* uv, double* out,
                           std::size_t idx) {
  const Sym2 H = effective_hessian_at(s, bg, ix, iy);
  const double det = H.det(dim);
  if (!std::isfinite(det) || det <= 0.0) return false;
  out[idx] = uv[idx] + dt_nu * (std::log(det) - log_det_bg);
  return true;
}

// <x, xt> - u(x) with per-axis coordinates hoisted by the caller.
inline double lf_score(const double* xs, const double* ys, const double* uv, int mx,
                       const Point& xt, int ix, int iy) {
  return xs[ix] * xt[0] + ys[iy] * xt[1] - uv[static_cast<std::size_t>(iy) * mx + ix];
}

}  // namespace malab::detail
