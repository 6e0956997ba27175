#pragma once

#include "malab/grid.hpp"

// Per-node centered finite-difference stencils. Both the OpenMP and the
// serial kernel drivers call into these, so any fix lands in one place and
// the two drivers can only differ in loop scheduling, never in arithmetic.
//
// Margin contract (box grids): gradient needs 1 ring, hessian 2, third
// derivatives 3. Torus grids wrap and have no margin. Callers guarantee the
// margins; nothing here range-checks.

namespace malab::detail {

inline int wrap(int i, int m) {
  i %= m;
  return i < 0 ? i + m : i;
}

// Read-only view binding a scalar field's raw values to its grid.
struct StencilView {
  const GridSpec* g;
  const double* v;
  bool torus;
  int mx, my;
  double hx, hy;

  explicit StencilView(const ScalarField& f)
      : g(&f.grid),
        v(f.values.data()),
        torus(f.grid.topology == Topology::torus),
        mx(f.grid.m[0]),
        my(f.grid.m[1]),
        hx(f.grid.spacing(0)),
        hy(f.grid.dim == 2 ? f.grid.spacing(1) : 1.0) {}

  double at(int ix, int iy) const {
    if (torus) {
      ix = wrap(ix, mx);
      iy = wrap(iy, my);
    }
    return v[static_cast<std::size_t>(iy) * mx + ix];
  }

  // centered first derivative along `axis`
  double d1(int ix, int iy, int axis) const {
    if (axis == 0) return (at(ix + 1, iy) - at(ix - 1, iy)) / (2.0 * hx);
    return (at(ix, iy + 1) - at(ix, iy - 1)) / (2.0 * hy);
  }

  Point grad(int ix, int iy) const {
    Point p{d1(ix, iy, 0), 0.0};
    if (g->dim == 2) p[1] = d1(ix, iy, 1);
    return p;
  }

  // 3-point second derivative along `axis`
  double d2(int ix, int iy, int axis) const {
    if (axis == 0) return (at(ix + 1, iy) - 2.0 * at(ix, iy) + at(ix - 1, iy)) / (hx * hx);
    return (at(ix, iy + 1) - 2.0 * at(ix, iy) + at(ix, iy - 1)) / (hy * hy);
  }

  // 4-corner mixed derivative
  double dxy(int ix, int iy) const {
    return (at(ix + 1, iy + 1) - at(ix + 1, iy - 1) - at(ix - 1, iy + 1) + at(ix - 1, iy - 1)) /
           (4.0 * hx * hy);
  }

  Sym2 hess(int ix, int iy) const {
    Sym2 s;
    s.xx = d2(ix, iy, 0);
    if (g->dim == 2) {
      s.yy = d2(ix, iy, 1);
      s.xy = dxy(ix, iy);
    }
    return s;
  }

  // centered pure third derivative along x: radius-2 stencil, exact on cubics
  double d3_xxx(int ix, int iy) const {
    return (at(ix + 2, iy) - 2.0 * at(ix + 1, iy) + 2.0 * at(ix - 1, iy) - at(ix - 2, iy)) /
           (2.0 * hx * hx * hx);
  }

  double d3_yyy(int ix, int iy) const {
    return (at(ix, iy + 2) - 2.0 * at(ix, iy + 1) + 2.0 * at(ix, iy - 1) - at(ix, iy - 2)) /
           (2.0 * hy * hy * hy);
  }

  // mixed thirds as centered first differences of second derivatives
  double d3_xxy(int ix, int iy) const {
    return (d2(ix, iy + 1, 0) - d2(ix, iy - 1, 0)) / (2.0 * hy);
  }

  double d3_xyy(int ix, int iy) const {
    return (d2(ix + 1, iy, 1) - d2(ix - 1, iy, 1)) / (2.0 * hx);
  }

  // |D^3 u|^2 summed over all ordered index triples; the two mixed
  // derivatives each appear three times among the 8 triples in 2D.
  double third_sq(int ix, int iy) const {
    const double uxxx = d3_xxx(ix, iy);
    if (g->dim == 1) return uxxx * uxxx;
    const double uyyy = d3_yyy(ix, iy);
    const double uxxy = d3_xxy(ix, iy);
    const double uxyy = d3_xyy(ix, iy);
    return uxxx * uxxx + 3.0 * uxxy * uxxy + 3.0 * uxyy * uxyy + uyyy * uyyy;
  }
};

}  // namespace malab::detail
