#pragma once

#include <cstddef>
#include <vector>

#include "malab/grid.hpp"

// The elliptic side of the lab: data and diagnostics for potentials u with
//
//     det D^2 u = exp( -<a, Du> + <b, x> + c ).
//
// Quadratics u = 1/2 x^T Q x + <p, x> + q solve it exactly when b = Q a and
// c = log det Q + <a, p>; make_quadratic_soliton builds that family and the
// residual / symmetry / eigenvalue-growth helpers quantify how far an
// arbitrary field is from solving it, and whether the rigidity hypotheses
// (discrete rotational symmetry of order >= 3, radial eigenvalue growth)
// hold with margin.

namespace malab {

struct SolitonParams {
  int dim = 2;
  Point a{0.0, 0.0};
  Point b{0.0, 0.0};
  double c = 0.0;
  double nu = 1.0;  // time normalization of the parabolic side; 1 by default

  void validate() const;  // throws std::invalid_argument
};

// u(x) = 1/2 x^T Q x + <p, x> + q, Q symmetric positive definite
struct QuadraticForm {
  int dim = 2;
  Sym2 Q = Sym2::identity(2);
  Point p{0.0, 0.0};
  double q = 0.0;

  double value(const Point& x) const;
  Point grad(const Point& x) const;
  void validate() const;
};

struct QuadraticSoliton {
  QuadraticForm u;
  SolitonParams params;
};

// exact solution family: b = Q a, c = log det Q + <a, p>
QuadraticSoliton make_quadratic_soliton(const Sym2& Q, const Point& p, const Point& a, int dim = 2,
                                        double nu = 1.0);

struct ResidualReport {
  ScalarField residual;      // det D^2 u - exp(...) on the margin-2 interior
  double sup = 0.0;          // over nodes whose exponent stayed in range
  long overflow_count = 0;   // nodes where exp() would overflow, flagged not thrown
};

ResidualReport pde_residual(const ScalarField& u, const SolitonParams& params);

// Orthogonal matrix A together with its order l = min{ k >= 1 : A^k = I }.
struct RotationSymmetry {
  int dim = 2;
  Mat2 A;
  int order = 1;

  // Validates orthogonality (|A^T A - I| <= 1e-12) and determines the order:
  // the first power within 1e-10 of I; every earlier power must stay at
  // least 1e-6 away or the order is rejected as ambiguous.
  static RotationSymmetry from_matrix(const Mat2& A, int dim = 2, int max_order = 64);
  static RotationSymmetry rotation(double theta, int max_order = 64);  // 2D, ccw
};

struct SymmetryReport {
  double max_deviation = 0.0;  // sup |u(Ax) - u(x)| over the samples
  int order = 1;
  bool order_at_least_3 = false;
  std::size_t samples_used = 0;
};

// Samples must lie in the grid hull together with their images under A.
SymmetryReport check_symmetry(const ScalarField& u, const RotationSymmetry& sym,
                              const std::vector<Point>& samples);

// Full A-orbits of an annulus point set (n_radii x n_angles base points).
std::vector<Point> orbit_annulus_samples(const RotationSymmetry& sym, double r_lo, double r_hi,
                                         int n_radii, int n_angles);
// Grid nodes with |x| in [r_lo, r_hi]; exact sample points for symmetries
// that map the node set onto itself (e.g. quarter turns on a centered box).
std::vector<Point> annulus_node_samples(const GridSpec& g, double r_lo, double r_hi);

struct GrowthMarginReport {
  double inf_weighted_eig = 0.0;  // inf |x| * eig_min(D^2 u(x)) over the annulus
  double threshold = 0.0;         // (dim - 1) / (|a| cos(pi / order))
  double margin = 0.0;            // inf - threshold; > 0 means the growth condition holds
  std::size_t nodes = 0;
};

// Requires dim 2, |a| > 0, order >= 3, and at least one margin-2 interior
// node in the annulus (std::invalid_argument otherwise).
GrowthMarginReport eigen_growth_margin(const ScalarField& u, const Point& a, int order,
                                       double r_lo, double r_hi);

struct RadialPsiReport {
  std::vector<double> r, psi;
  double min = 0.0, max = 0.0;

  double variation() const { return max - min; }
};

// Psi(r) = log u_rr + (ambient_dim - 1)(log u_r - log r) of a 1D radial
// profile on a box grid with lo > 0, evaluated on the margin-1 interior.
// Constant Psi is what separates exact radial solitons from impostors.
// Throws std::domain_error when the profile fails monotonicity (u_r <= 0)
// or convexity (u_rr <= 0) at an evaluated node.
RadialPsiReport radial_psi(const ScalarField& profile, int ambient_dim);

}  // namespace malab
