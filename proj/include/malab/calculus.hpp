#pragma once

#include "malab/grid.hpp"

// Centered finite-difference calculus on structured grids.
//
// Accuracy: every stencil is second order, and exact (to round-off) on
// polynomials up to its own order — gradients and Hessians reproduce
// quadratics exactly, the third-derivative stencils reproduce cubics.
//
// Box grids lose margin rings: gradient 1, hessian 2, third derivatives 3.
// Entries outside an output's interior stay zero; the `margin` member of the
// derived field records the convention. Torus grids wrap and keep every node.

namespace malab {

// centered first derivatives; out-field margin 1
VectorField gradient(const ScalarField& u);

// 3-point diagonal and 4-corner mixed second derivatives; out-field margin 2
SymmetricMatrixField hessian(const ScalarField& u);

// sup over evaluable nodes (margin 3) of |D^3 u|^2, the squared Frobenius
// norm over all ordered index triples
double third_derivative_sup_sq(const ScalarField& u);

// per-node smallest eigenvalue (closed form, dim <= 2)
ScalarField min_eigenvalue_field(const SymmetricMatrixField& h);

// Multilinear interpolation. Box grids require p inside the hull (throws
// std::domain_error otherwise); torus grids wrap p first. Exact on affine
// data and at nodes.
double interpolate(const ScalarField& u, const Point& p);

}  // namespace malab
