#pragma once

#include <cstddef>
#include <vector>

#include "malab/grid.hpp"
#include "malab/soliton.hpp"

// Discrete Legendre-Fenchel transform and the duality diagnostics built on
// it. For strictly convex u the transform
//
//     u*(xt) = sup_x ( <x, xt> - u(x) ),   Du(x_match) = xt
//
// inverts the Hessian pointwise (D^2 u*(xt) = (D^2 u(x_match))^-1) and swaps
// the roles of the drift data in the Monge-Ampere equation:
//
//     det D^2 u* = exp( <a, xt> - <b, Du*> - c ).
//
// Everything here works on box grids; dual nodes outside the attainable
// gradient range are flagged and excluded rather than extrapolated.

namespace malab {

enum class MatchStatus : unsigned char {
  ok = 0,
  boundary = 1,     // coarse maximizer on the scan-region edge: xt outside range
  no_converge = 2,  // Newton refinement did not reach tolerance
};

struct ConjugatePair {
  ScalarField primal;
  ScalarField dual;              // u* on the dual grid, zero at non-ok nodes
  std::vector<Point> match;      // maximizer x per dual node
  std::vector<MatchStatus> status;

  std::size_t flagged() const;   // number of non-ok dual nodes
};

// Bounding box of the discrete gradient image over the margin-1 interior,
// shrunk by `shrink` of each axis length (split between both ends), so every
// dual node stays strictly inside the attainable range.
GridSpec suggest_dual_grid(const ScalarField& u, std::array<int, 2> m, double shrink = 0.10);

// Coarse argmax over the margin-2 interior, then Newton on Du(x) = xt using
// the interpolated gradient/Hessian fields (tolerance 1e-12, at most 30
// iterations). u(x) at the refined point is evaluated by a second-order
// Taylor step from the nearest node, which keeps quadratics exact.
ConjugatePair conjugate(const ScalarField& u, const GridSpec& dual_grid);

// sup over clean margin-2 dual nodes of max-entry |D^2u*(xt) D^2u(x) - I|
double hessian_duality_check(const ConjugatePair& pair);

// sup over clean margin-2 dual nodes of |det D^2u* - exp(<a,xt> - <b,Du*> - c)|
double dual_pde_residual(const ConjugatePair& pair, const SolitonParams& params);

// Conjugate twice and compare against the original: the second dual grid is
// a node-aligned central sub-box of the primal grid, so (u*)* values compare
// against primal node values with no interpolation. Throws
// std::runtime_error on insufficient nesting (flagged nodes in the region
// either transform scans).
double involution_check(const ScalarField& u, const GridSpec& dual_grid);

}  // namespace malab
