#pragma once

#include <cstddef>
#include <vector>

#include "malab/grid.hpp"

// Grid-sweep kernels. The default entry points parallelize node loops with
// OpenMP; kernels::serial holds plain-loop twins kept as the reference
// implementation. Both delegate per-node arithmetic to detail::StencilView,
// and every reduction is a max/min/integer-add, so results are bit-identical
// across thread counts and between the two variants (test_kernels_parity.cpp
// pins that down; bench/ compares their throughput).
//
// Preconditions (validated by the public wrappers in calculus.cpp and the
// flow/soliton layers, not re-checked here): fields finite, margins fit.

namespace malab::kernels {

struct EigRange {
  double lo;
  double hi;
};

inline constexpr std::size_t npos = static_cast<std::size_t>(-1);

// centered gradient on interior_box(grid, 1)
void gradient(const ScalarField& u, VectorField& out);

// 3-point diagonal / 4-corner mixed Hessian on interior_box(grid, 2)
void hessian(const ScalarField& u, SymmetricMatrixField& out);

// sup over interior_box(grid, 3) of |D^3 u|^2
double third_sup_sq(const ScalarField& u);

// per-node smallest eigenvalue of a symmetric matrix field
void min_eigenvalue(const SymmetricMatrixField& h, ScalarField& out);

// (min eig_min, max eig_max) of D^2 u (+ background, if given) over
// interior_box(grid, margin)
EigRange hessian_eig_range(const ScalarField& u, const Sym2* background, int margin);

// One explicit Euler update of du/dt = nu log det D^2 u into `out` (pre-sized
// to u.values.size(); nodes outside the update region are left untouched).
// With `background` Q the update is the gauged perturbation form
//   v += dt * nu * (log det(Q + D^2 v) - log det Q).
// Returns the first flat index where det(D^2 u_eff) <= 0 (or is non-finite),
// npos when every node is convex.
std::size_t flow_step(const ScalarField& u, const Sym2* background, double dt, double nu,
                      std::vector<double>& out);

// residual det D^2 u - exp(-a.Du + b.x + c) on interior_box(grid, 2); writes
// per-node values into `out`, returns the sup of |residual| over nodes whose
// exponent did not overflow, and counts overflowed nodes.
double ma_residual(const ScalarField& u, const Point& a, const Point& b, double c,
                   ScalarField& out, long& overflow_count);

// Legendre coarse pass: per dual node, flat index of the primal node in
// interior_box(primal grid, primal_margin) maximizing <x, xt> - u(x).
// Ties break to the first node in scan order (y-major, x fastest).
void lf_coarse(const ScalarField& u, const GridSpec& dual, int primal_margin,
               std::vector<std::size_t>& argmax);

namespace serial {

void gradient(const ScalarField& u, VectorField& out);
void hessian(const ScalarField& u, SymmetricMatrixField& out);
double third_sup_sq(const ScalarField& u);
void min_eigenvalue(const SymmetricMatrixField& h, ScalarField& out);
EigRange hessian_eig_range(const ScalarField& u, const Sym2* background, int margin);
std::size_t flow_step(const ScalarField& u, const Sym2* background, double dt, double nu,
                      std::vector<double>& out);
double ma_residual(const ScalarField& u, const Point& a, const Point& b, double c,
                   ScalarField& out, long& overflow_count);
void lf_coarse(const ScalarField& u, const GridSpec& dual, int primal_margin,
               std::vector<std::size_t>& argmax);

}  // namespace serial

}  // namespace malab::kernels
