#include "malab/grid.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace malab {

double dot(const Point& a, const Point& b) { return a[0] * b[0] + a[1] * b[1]; }
double norm(const Point& a) { return std::sqrt(dot(a, a)); }
Point operator+(const Point& a, const Point& b) { return {a[0] + b[0], a[1] + b[1]}; }
Point operator-(const Point& a, const Point& b) { return {a[0] - b[0], a[1] - b[1]}; }
Point operator*(double s, const Point& a) { return {s * a[0], s * a[1]}; }

Sym2 Sym2::identity(int dim) { return dim == 1 ? Sym2{1.0, 0.0, 0.0} : Sym2{1.0, 0.0, 1.0}; }

double Sym2::eig_min(int dim) const {
  if (dim == 1) return xx;
  const double mean = 0.5 * (xx + yy);
  const double off = 0.5 * (xx - yy);
  return mean - std::sqrt(off * off + xy * xy);
}

double Sym2::eig_max(int dim) const {
  if (dim == 1) return xx;
  const double mean = 0.5 * (xx + yy);
  const double off = 0.5 * (xx - yy);
  return mean + std::sqrt(off * off + xy * xy);
}

Sym2 Sym2::inverse(int dim) const {
  const double d = det(dim);
  if (d == 0.0 || !std::isfinite(d))
    throw std::domain_error("Sym2::inverse: singular matrix (det = " + std::to_string(d) + ")");
  if (dim == 1) return {1.0 / xx, 0.0, 0.0};
  return {yy / d, -xy / d, xx / d};
}

Point Sym2::apply(const Point& v, int dim) const {
  if (dim == 1) return {xx * v[0], 0.0};
  return {xx * v[0] + xy * v[1], xy * v[0] + yy * v[1]};
}

Mat2 Mat2::identity() { return Mat2{}; }

Mat2 Mat2::rotation(double theta) {
  const double c = std::cos(theta), s = std::sin(theta);
  return Mat2{{c, -s, s, c}};
}

Mat2 Mat2::mul(const Mat2& o) const {
  return Mat2{{a[0] * o.a[0] + a[1] * o.a[2], a[0] * o.a[1] + a[1] * o.a[3],
               a[2] * o.a[0] + a[3] * o.a[2], a[2] * o.a[1] + a[3] * o.a[3]}};
}

Mat2 Mat2::transpose() const { return Mat2{{a[0], a[2], a[1], a[3]}}; }

Point Mat2::apply(const Point& v, int dim) const {
  if (dim == 1) return {a[0] * v[0], 0.0};
  return {a[0] * v[0] + a[1] * v[1], a[2] * v[0] + a[3] * v[1]};
}

double Mat2::deviation_from_identity(int dim) const { return deviation_from(Mat2::identity(), dim); }

double Mat2::deviation_from(const Mat2& o, int dim) const {
  if (dim == 1) return std::abs(a[0] - o.a[0]);
  double dev = 0.0;
  for (int k = 0; k < 4; ++k) dev = std::max(dev, std::abs(a[k] - o.a[k]));
  return dev;
}

GridSpec GridSpec::box_1d(double lo, double hi, int m) {
  GridSpec g;
  g.dim = 1;
  g.topology = Topology::box;
  g.lo = {lo, 0.0};
  g.hi = {hi, 0.0};
  g.m = {m, 1};
  g.validate();
  return g;
}

GridSpec GridSpec::box_2d(Point lo, Point hi, std::array<int, 2> m) {
  GridSpec g;
  g.dim = 2;
  g.topology = Topology::box;
  g.lo = lo;
  g.hi = hi;
  g.m = m;
  g.validate();
  return g;
}

GridSpec GridSpec::square_box(double lo, double hi, int m) {
  return box_2d({lo, lo}, {hi, hi}, {m, m});
}

GridSpec GridSpec::torus_1d(double lo, double hi, int m) {
  GridSpec g;
  g.dim = 1;
  g.topology = Topology::torus;
  g.lo = {lo, 0.0};
  g.hi = {hi, 0.0};
  g.m = {m, 1};
  g.validate();
  return g;
}

GridSpec GridSpec::square_torus(double lo, double hi, int m) {
  GridSpec g;
  g.dim = 2;
  g.topology = Topology::torus;
  g.lo = {lo, lo};
  g.hi = {hi, hi};
  g.m = {m, m};
  g.validate();
  return g;
}

double GridSpec::spacing(int axis) const {
  const double len = hi[axis] - lo[axis];
  return topology == Topology::box ? len / (m[axis] - 1) : len / m[axis];
}

Point GridSpec::node(int ix, int iy) const {
  Point p{coord(0, ix), 0.0};
  if (dim == 2) p[1] = coord(1, iy);
  return p;
}

std::size_t GridSpec::node_count() const {
  return static_cast<std::size_t>(m[0]) * static_cast<std::size_t>(m[1]);
}

bool GridSpec::contains(const Point& p) const {
  if (topology == Topology::torus) return true;
  for (int ax = 0; ax < dim; ++ax)
    if (p[ax] < lo[ax] || p[ax] > hi[ax]) return false;
  return true;
}

void GridSpec::validate() const {
  if (dim != 1 && dim != 2) throw std::invalid_argument("GridSpec: dim must be 1 or 2");
  if (dim == 1 && m[1] != 1) throw std::invalid_argument("GridSpec: 1D grid must have m[1] == 1");
  for (int ax = 0; ax < dim; ++ax) {
    if (m[ax] < 5)
      throw std::invalid_argument("GridSpec: need at least 5 nodes per axis, got " +
                                  std::to_string(m[ax]));
    if (!(hi[ax] > lo[ax])) throw std::invalid_argument("GridSpec: hi must exceed lo");
  }
  if (topology == Topology::torus && dim == 2) {
    // equal extents keep the wrapped metric isotropic in each axis pair
    if (length(0) != length(1) || m[0] != m[1])
      throw std::invalid_argument("GridSpec: torus grids need equal extents and node counts");
  }
}

bool IndexBox::on_edge(int ix, int iy) const {
  return ix == first[0] || ix == last[0] ||
         (last[1] > first[1] && (iy == first[1] || iy == last[1]));
}

IndexBox interior_box(const GridSpec& g, int margin) {
  IndexBox b;
  const int mg = g.topology == Topology::torus ? 0 : margin;
  b.first = {mg, 0};
  b.last = {g.m[0] - 1 - mg, 0};
  if (g.dim == 2) {
    b.first[1] = mg;
    b.last[1] = g.m[1] - 1 - mg;
  }
  return b;
}

ScalarField ScalarField::zeros(const GridSpec& g, FieldRole role) {
  g.validate();
  ScalarField f;
  f.grid = g;
  f.role = role;
  f.values.assign(g.node_count(), 0.0);
  return f;
}

ScalarField ScalarField::sample(const GridSpec& g, const std::function<double(Point)>& f,
                                FieldRole role) {
  ScalarField out = zeros(g, role);
  for (int iy = 0; iy < g.m[1]; ++iy)
    for (int ix = 0; ix < g.m[0]; ++ix) out.at(ix, iy) = f(g.node(ix, iy));
  return out;
}

bool ScalarField::all_finite() const {
  for (double v : values)
    if (!std::isfinite(v)) return false;
  return true;
}

void ScalarField::require_finite(const char* what) const {
  if (!all_finite()) throw std::invalid_argument(std::string(what) + ": field has non-finite values");
}

VectorField VectorField::zeros(const GridSpec& g, int margin) {
  VectorField f;
  f.grid = g;
  f.margin = g.topology == Topology::torus ? 0 : margin;
  f.comp[0].assign(g.node_count(), 0.0);
  f.comp[1].assign(g.node_count(), 0.0);
  return f;
}

Point VectorField::at(int ix, int iy) const {
  const std::size_t i = grid.index(ix, iy);
  return {comp[0][i], comp[1][i]};
}

void VectorField::set(int ix, int iy, const Point& v) {
  const std::size_t i = grid.index(ix, iy);
  comp[0][i] = v[0];
  comp[1][i] = v[1];
}

SymmetricMatrixField SymmetricMatrixField::zeros(const GridSpec& g, int margin) {
  SymmetricMatrixField f;
  f.grid = g;
  f.margin = g.topology == Topology::torus ? 0 : margin;
  f.xx.assign(g.node_count(), 0.0);
  f.xy.assign(g.node_count(), 0.0);
  f.yy.assign(g.node_count(), 0.0);
  return f;
}

Sym2 SymmetricMatrixField::at(int ix, int iy) const {
  const std::size_t i = grid.index(ix, iy);
  return {xx[i], xy[i], yy[i]};
}

void SymmetricMatrixField::set(int ix, int iy, const Sym2& s) {
  const std::size_t i = grid.index(ix, iy);
  xx[i] = s.xx;
  xy[i] = s.xy;
  yy[i] = s.yy;
}

}  // namespace malab
