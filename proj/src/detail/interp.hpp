#pragma once

#include <cmath>
#include <stdexcept>

#include "detail/stencil.hpp"
#include "malab/grid.hpp"

// Multilinear interpolation cells, shared by the public scalar interpolate()
// and the vector/matrix/Taylor evaluation the Legendre refinement needs.

namespace malab::detail {

struct InterpCell {
  std::array<int, 2> i0{0, 0};
  std::array<int, 2> i1{0, 0};
  std::array<double, 2> w{0.0, 0.0};
};

// Locate p in its grid cell. `min_node`/`max_node` restrict the base node per
// axis (used to keep stencil-margin fields away from undefined entries); the
// weight is then allowed outside [0,1] only by the caller clamping p first.
inline InterpCell locate(const GridSpec& g, const Point& p, int margin = 0) {
  InterpCell c;
  for (int ax = 0; ax < g.dim; ++ax) {
    const double h = g.spacing(ax);
    const int m = g.m[ax];
    if (g.topology == Topology::torus) {
      double t = (p[ax] - g.lo[ax]) / h;
      t -= std::floor(t / m) * m;  // wrap into [0, m)
      if (t >= m) t -= m;          // guard the fmod edge
      int i = static_cast<int>(std::floor(t));
      if (i >= m) i = m - 1;
      c.i0[ax] = i;
      c.i1[ax] = (i + 1) % m;
      c.w[ax] = t - i;
    } else {
      if (p[ax] < g.lo[ax] || p[ax] > g.hi[ax])
        throw std::domain_error("interpolate: point outside the grid hull");
      double t = (p[ax] - g.lo[ax]) / h;
      int i = static_cast<int>(std::floor(t));
      const int lo_i = margin;
      const int hi_i = m - 2 - margin;  // base of the last usable cell
      if (i < lo_i) i = lo_i;
      if (i > hi_i) i = hi_i;
      c.i0[ax] = i;
      c.i1[ax] = i + 1;
      c.w[ax] = t - i;
    }
  }
  return c;
}

template <typename At>
double bilinear(const GridSpec& g, const InterpCell& c, At&& value_at) {
  const double wx = c.w[0];
  if (g.dim == 1)
    return (1.0 - wx) * value_at(c.i0[0], 0) + wx * value_at(c.i1[0], 0);
  const double wy = c.w[1];
  return (1.0 - wx) * (1.0 - wy) * value_at(c.i0[0], c.i0[1]) +
         wx * (1.0 - wy) * value_at(c.i1[0], c.i0[1]) +
         (1.0 - wx) * wy * value_at(c.i0[0], c.i1[1]) +
         wx * wy * value_at(c.i1[0], c.i1[1]);
}

inline Point interp_vector(const VectorField& f, const Point& p) {
  const InterpCell c = locate(f.grid, p, f.margin);
  Point out{bilinear(f.grid, c, [&](int ix, int iy) { return f.comp[0][f.grid.index(ix, iy)]; }),
            0.0};
  if (f.grid.dim == 2)
    out[1] = bilinear(f.grid, c, [&](int ix, int iy) { return f.comp[1][f.grid.index(ix, iy)]; });
  return out;
}

inline Sym2 interp_matrix(const SymmetricMatrixField& f, const Point& p) {
  const InterpCell c = locate(f.grid, p, f.margin);
  Sym2 out;
  out.xx = bilinear(f.grid, c, [&](int ix, int iy) { return f.xx[f.grid.index(ix, iy)]; });
  if (f.grid.dim == 2) {
    out.xy = bilinear(f.grid, c, [&](int ix, int iy) { return f.xy[f.grid.index(ix, iy)]; });
    out.yy = bilinear(f.grid, c, [&](int ix, int iy) { return f.yy[f.grid.index(ix, iy)]; });
  }
  return out;
}

// Third-order Taylor evaluation of the field, blended over the corners of
// the enclosing cell with multilinear weights. Exact on quadratics (which
// plain multilinear interpolation of nodal values is not). The corner blend
// matters for smooth fields: anchoring at a single nearest node makes the
// value jump by O(h^3) whenever the anchor switches, and downstream second
// differences amplify such jumps by 1/spacing^2; with multilinear weights
// the corner offsets average to zero, cancelling the leading jump, and the
// explicit cubic term removes the next one.
inline double taylor_value(const ScalarField& u, const VectorField& g,
                           const SymmetricMatrixField& H, const Point& p) {
  const GridSpec& grid = u.grid;
  const int dim = grid.dim;
  const InterpCell c = locate(grid, p, H.margin);
  const StencilView sv(u);

  const auto corner = [&](int ix, int iy) {
    Point d = p - grid.node(ix, iy);
    if (grid.topology == Topology::torus) {
      // shortest wrapped offset
      for (int ax = 0; ax < dim; ++ax) {
        const double L = grid.length(ax);
        d[ax] -= std::round(d[ax] / L) * L;
      }
    }
    double val = u.at(ix, iy) + dot(g.at(ix, iy), d) +
                 0.5 * dot(d, H.at(ix, iy).apply(d, dim));
    double cubic = sv.d3_xxx(ix, iy) * d[0] * d[0] * d[0];
    if (dim == 2)
      cubic += 3.0 * sv.d3_xxy(ix, iy) * d[0] * d[0] * d[1] +
               3.0 * sv.d3_xyy(ix, iy) * d[0] * d[1] * d[1] +
               sv.d3_yyy(ix, iy) * d[1] * d[1] * d[1];
    return val + cubic / 6.0;
  };

  const double wx = c.w[0];
  if (dim == 1) return (1.0 - wx) * corner(c.i0[0], 0) + wx * corner(c.i1[0], 0);
  const double wy = c.w[1];
  return (1.0 - wx) * (1.0 - wy) * corner(c.i0[0], c.i0[1]) +
         wx * (1.0 - wy) * corner(c.i1[0], c.i0[1]) +
         (1.0 - wx) * wy * corner(c.i0[0], c.i1[1]) +
         wx * wy * corner(c.i1[0], c.i1[1]);
}

}  // namespace malab::detail
