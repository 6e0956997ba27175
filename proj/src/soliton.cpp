#include "malab/soliton.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "detail/stencil.hpp"
#include "kernels.hpp"
#include "malab/calculus.hpp"

namespace malab {

namespace {

bool finite(double v) { return std::isfinite(v); }

std::string point_str(const Point& x, int dim) {
  std::string s = "(" + std::to_string(x[0]);
  if (dim == 2) s += ", " + std::to_string(x[1]);
  return s + ")";
}

}  // namespace

void SolitonParams::validate() const {
  if (dim != 1 && dim != 2) throw std::invalid_argument("SolitonParams: dim must be 1 or 2");
  if (!finite(a[0]) || !finite(a[1]) || !finite(b[0]) || !finite(b[1]) || !finite(c))
    throw std::invalid_argument("SolitonParams: non-finite entry");
  if (!(nu > 0.0)) throw std::invalid_argument("SolitonParams: nu must be positive");
  if (dim == 1 && (a[1] != 0.0 || b[1] != 0.0))
    throw std::invalid_argument("SolitonParams: 1D params must have zero second components");
}

double QuadraticForm::value(const Point& x) const {
  return 0.5 * dot(x, Q.apply(x, dim)) + dot(p, x) + q;
}

Point QuadraticForm::grad(const Point& x) const { return Q.apply(x, dim) + p; }

void QuadraticForm::validate() const {
  if (dim != 1 && dim != 2) throw std::invalid_argument("QuadraticForm: dim must be 1 or 2");
  if (!(Q.eig_min(dim) > 0.0))
    throw std::invalid_argument("QuadraticForm: Q must be positive definite (eig_min = " +
                                std::to_string(Q.eig_min(dim)) + ")");
}

QuadraticSoliton make_quadratic_soliton(const Sym2& Q, const Point& p, const Point& a, int dim,
                                        double nu) {
  QuadraticForm u;
  u.dim = dim;
  u.Q = Q;
  u.p = p;
  u.validate();
  SolitonParams params;
  params.dim = dim;
  params.nu = nu;
  params.a = a;
  params.b = Q.apply(a, dim);
  params.c = std::log(Q.det(dim)) + dot(a, p);
  params.validate();
  return {u, params};
}

ResidualReport pde_residual(const ScalarField& u, const SolitonParams& params) {
  params.validate();
  u.grid.validate();
  u.require_finite("pde_residual");
  if (params.dim != u.grid.dim)
    throw std::invalid_argument("pde_residual: params and field dimension mismatch");
  ResidualReport rep;
  rep.residual = ScalarField::zeros(u.grid, FieldRole::derived);
  rep.sup = kernels::ma_residual(u, params.a, params.b, params.c, rep.residual,
                                 rep.overflow_count);
  return rep;
}

RotationSymmetry RotationSymmetry::from_matrix(const Mat2& A, int dim, int max_order) {
  if (dim != 1 && dim != 2) throw std::invalid_argument("RotationSymmetry: dim must be 1 or 2");
  const double ortho_dev = A.transpose().mul(A).deviation_from_identity(dim);
  if (ortho_dev > 1e-12)
    throw std::invalid_argument("RotationSymmetry: matrix is not orthogonal (|A^T A - I| = " +
                                std::to_string(ortho_dev) + ")");
  Mat2 power = A;
  for (int l = 1; l <= max_order; ++l) {
    const double dev = power.deviation_from_identity(dim);
    if (dev <= 1e-10) return RotationSymmetry{dim, A, l};
    if (dev <= 1e-6)
      throw std::invalid_argument("RotationSymmetry: order ambiguous, |A^" + std::to_string(l) +
                                  " - I| = " + std::to_string(dev));
    power = power.mul(A);
  }
  throw std::invalid_argument("RotationSymmetry: no power up to " + std::to_string(max_order) +
                              " returns to the identity");
}

RotationSymmetry RotationSymmetry::rotation(double theta, int max_order) {
  return from_matrix(Mat2::rotation(theta), 2, max_order);
}

SymmetryReport check_symmetry(const ScalarField& u, const RotationSymmetry& sym,
                              const std::vector<Point>& samples) {
  u.grid.validate();
  u.require_finite("check_symmetry");
  if (sym.dim != u.grid.dim)
    throw std::invalid_argument("check_symmetry: symmetry and field dimension mismatch");
  if (samples.empty()) throw std::invalid_argument("check_symmetry: empty sample set");
  SymmetryReport rep;
  rep.order = sym.order;
  rep.order_at_least_3 = sym.order >= 3;
  rep.samples_used = samples.size();
  for (const Point& x : samples) {
    const Point ax = sym.A.apply(x, sym.dim);
    if (!u.grid.contains(x) || !u.grid.contains(ax))
      throw std::invalid_argument("check_symmetry: sample " + point_str(x, sym.dim) +
                                  " or its image leaves the grid hull");
    const double dev = std::fabs(interpolate(u, ax) - interpolate(u, x));
    rep.max_deviation = std::fmax(rep.max_deviation, dev);
  }
  return rep;
}

std::vector<Point> orbit_annulus_samples(const RotationSymmetry& sym, double r_lo, double r_hi,
                                         int n_radii, int n_angles) {
  if (!(r_hi >= r_lo) || !(r_lo > 0.0))
    throw std::invalid_argument("orbit_annulus_samples: need 0 < r_lo <= r_hi");
  if (n_radii < 1 || n_angles < 1)
    throw std::invalid_argument("orbit_annulus_samples: need at least one radius and angle");
  std::vector<Point> pts;
  pts.reserve(static_cast<std::size_t>(n_radii) * n_angles * sym.order);
  for (int i = 0; i < n_radii; ++i) {
    // cell midpoints so a single radius lands mid-annulus
    const double r = r_lo + (r_hi - r_lo) * (i + 0.5) / n_radii;
    for (int j = 0; j < n_angles; ++j) {
      Point x{r, 0.0};
      if (sym.dim == 2) {
        const double th = 2.0 * std::numbers::pi * j / n_angles;
        x = {r * std::cos(th), r * std::sin(th)};
      }
      for (int k = 0; k < sym.order; ++k) {
        pts.push_back(x);
        x = sym.A.apply(x, sym.dim);
      }
      if (sym.dim == 1) break;  // angles are meaningless on a line
    }
  }
  return pts;
}

std::vector<Point> annulus_node_samples(const GridSpec& g, double r_lo, double r_hi) {
  g.validate();
  std::vector<Point> pts;
  for (int iy = 0; iy < g.m[1]; ++iy)
    for (int ix = 0; ix < g.m[0]; ++ix) {
      const Point x = g.node(ix, iy);
      const double r = norm(x);
      if (r >= r_lo && r <= r_hi) pts.push_back(x);
    }
  return pts;
}

GrowthMarginReport eigen_growth_margin(const ScalarField& u, const Point& a, int order,
                                       double r_lo, double r_hi) {
  u.grid.validate();
  u.require_finite("eigen_growth_margin");
  if (u.grid.dim != 2)
    throw std::invalid_argument("eigen_growth_margin: needs a 2D field");
  const double anorm = norm(a);
  if (!(anorm > 0.0))
    throw std::invalid_argument("eigen_growth_margin: requires |a| > 0");
  if (order < 3)
    throw std::invalid_argument("eigen_growth_margin: symmetry order must be >= 3, got " +
                                std::to_string(order));
  if (!(r_hi > r_lo) || !(r_lo > 0.0))
    throw std::invalid_argument("eigen_growth_margin: need 0 < r_lo < r_hi");

  const detail::StencilView s(u);
  const IndexBox ib = interior_box(u.grid, 2);
  GrowthMarginReport rep;
  rep.inf_weighted_eig = std::numeric_limits<double>::infinity();
  for (int iy = ib.first[1]; iy <= ib.last[1]; ++iy)
    for (int ix = ib.first[0]; ix <= ib.last[0]; ++ix) {
      const Point x = u.grid.node(ix, iy);
      const double r = norm(x);
      if (r < r_lo || r > r_hi) continue;
      ++rep.nodes;
      const double w = r * s.hess(ix, iy).eig_min(2);
      rep.inf_weighted_eig = std::fmin(rep.inf_weighted_eig, w);
    }
  if (rep.nodes == 0)
    throw std::invalid_argument("eigen_growth_margin: annulus [" + std::to_string(r_lo) + ", " +
                                std::to_string(r_hi) + "] contains no interior nodes");
  rep.threshold = (u.grid.dim - 1) / (anorm * std::cos(std::numbers::pi / order));
  rep.margin = rep.inf_weighted_eig - rep.threshold;
  return rep;
}

RadialPsiReport radial_psi(const ScalarField& profile, int ambient_dim) {
  profile.grid.validate();
  profile.require_finite("radial_psi");
  if (profile.grid.dim != 1 || profile.grid.topology != Topology::box)
    throw std::invalid_argument("radial_psi: profile must live on a 1D box grid");
  if (!(profile.grid.lo[0] > 0.0))
    throw std::invalid_argument("radial_psi: radial samples must start at r > 0");
  if (ambient_dim < 2)
    throw std::invalid_argument("radial_psi: ambient dimension must be >= 2");

  const detail::StencilView s(profile);
  RadialPsiReport rep;
  rep.min = std::numeric_limits<double>::infinity();
  rep.max = -std::numeric_limits<double>::infinity();
  const int m = profile.grid.m[0];
  rep.r.reserve(m - 2);
  rep.psi.reserve(m - 2);
  for (int i = 1; i <= m - 2; ++i) {
    const double r = profile.grid.coord(0, i);
    const double ur = s.d1(i, 0, 0);
    const double urr = s.d2(i, 0, 0);
    if (!(ur > 0.0))
      throw std::domain_error("radial_psi: profile not strictly increasing at r = " +
                              std::to_string(r) + " (u_r = " + std::to_string(ur) + ")");
    if (!(urr > 0.0))
      throw std::domain_error("radial_psi: profile not strictly convex at r = " +
                              std::to_string(r) + " (u_rr = " + std::to_string(urr) + ")");
    const double psi = std::log(urr) + (ambient_dim - 1) * (std::log(ur) - std::log(r));
    rep.r.push_back(r);
    rep.psi.push_back(psi);
    rep.min = std::fmin(rep.min, psi);
    rep.max = std::fmax(rep.max, psi);
  }
  return rep;
}

}  // namespace malab
