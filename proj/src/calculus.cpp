#include "malab/calculus.hpp"

#include <stdexcept>
#include <string>

#include "detail/interp.hpp"
#include "kernels.hpp"

namespace malab {

namespace {

// boxes must keep at least one evaluable node once the margin is carved off
void require_margin(const GridSpec& g, int margin, const char* op) {
  g.validate();
  if (g.topology == Topology::torus) return;
  for (int ax = 0; ax < g.dim; ++ax)
    if (g.m[ax] < 2 * margin + 1)
      throw std::invalid_argument(std::string(op) + ": box grid too coarse for a " +
                                  std::to_string(margin) + "-node margin");
}

}  // namespace

VectorField gradient(const ScalarField& u) {
  require_margin(u.grid, 1, "gradient");
  u.require_finite("gradient");
  VectorField out = VectorField::zeros(u.grid, 1);
  kernels::gradient(u, out);
  return out;
}

SymmetricMatrixField hessian(const ScalarField& u) {
  require_margin(u.grid, 2, "hessian");
  u.require_finite("hessian");
  SymmetricMatrixField out = SymmetricMatrixField::zeros(u.grid, 2);
  kernels::hessian(u, out);
  return out;
}

double third_derivative_sup_sq(const ScalarField& u) {
  require_margin(u.grid, 3, "third_derivative_sup_sq");
  u.require_finite("third_derivative_sup_sq");
  return kernels::third_sup_sq(u);
}

ScalarField min_eigenvalue_field(const SymmetricMatrixField& h) {
  h.grid.validate();
  ScalarField out = ScalarField::zeros(h.grid, FieldRole::derived);
  kernels::min_eigenvalue(h, out);
  return out;
}

double interpolate(const ScalarField& u, const Point& p) {
  const detail::InterpCell c = detail::locate(u.grid, p);
  return detail::bilinear(u.grid, c, [&](int ix, int iy) { return u.at(ix, iy); });
}

}  // namespace malab
