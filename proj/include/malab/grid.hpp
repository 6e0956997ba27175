#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <vector>

// Structured grids (1D/2D, box or torus) and the small dense linear algebra
// used throughout: points, symmetric matrices up to 2x2, plain 2x2 matrices.
// Dimension is a runtime property of the grid; the unused slot of a Point is
// kept at zero so dot/norm helpers can run over both entries unconditionally.

namespace malab {

using Point = std::array<double, 2>;

double dot(const Point& a, const Point& b);
double norm(const Point& a);  // euclidean length
Point operator+(const Point& a, const Point& b);
Point operator-(const Point& a, const Point& b);
Point operator*(double s, const Point& a);

// Symmetric matrix; for dim==1 only xx is meaningful and must be the only
// nonzero entry. Operations that depend on the dimension take it explicitly.
struct Sym2 {
  double xx = 0.0;
  double xy = 0.0;
  double yy = 0.0;

  static Sym2 identity(int dim);
  static Sym2 diag(double a, double b) { return {a, 0.0, b}; }

  double det(int dim) const { return dim == 1 ? xx : xx * yy - xy * xy; }
  double trace(int dim) const { return dim == 1 ? xx : xx + yy; }
  // Closed-form eigenvalue bounds (2x2); no iteration involved.
  double eig_min(int dim) const;
  double eig_max(int dim) const;
  Sym2 inverse(int dim) const;  // throws std::domain_error if singular
  Point apply(const Point& v, int dim) const;
  bool spd(int dim) const { return eig_min(dim) > 0.0; }

  Sym2 operator+(const Sym2& o) const { return {xx + o.xx, xy + o.xy, yy + o.yy}; }
  Sym2 operator*(double s) const { return {s * xx, s * xy, s * yy}; }
};

// General (not necessarily symmetric) 2x2 matrix, row-major; dim==1 uses a[0].
struct Mat2 {
  std::array<double, 4> a{1.0, 0.0, 0.0, 1.0};

  static Mat2 identity();
  static Mat2 rotation(double theta);  // counter-clockwise, 2D

  Mat2 mul(const Mat2& o) const;
  Mat2 transpose() const;
  Point apply(const Point& v, int dim) const;
  // max |entry - identity| restricted to the leading dim x dim block
  double deviation_from_identity(int dim) const;
  double deviation_from(const Mat2& o, int dim) const;
};

enum class Topology { box, torus };

// Uniform structured grid. Box grids include both endpoints (spacing
// (hi-lo)/(m-1)); torus grids identify hi with lo (spacing (hi-lo)/m) and
// require equal extents per axis so wrapped coordinates stay consistent.
struct GridSpec {
  int dim = 2;
  Topology topology = Topology::box;
  std::array<double, 2> lo{0.0, 0.0};
  std::array<double, 2> hi{1.0, 1.0};
  std::array<int, 2> m{5, 1};  // nodes per axis; m[1]==1 when dim==1

  static GridSpec box_1d(double lo, double hi, int m);
  static GridSpec box_2d(Point lo, Point hi, std::array<int, 2> m);
  static GridSpec square_box(double lo, double hi, int m);
  static GridSpec torus_1d(double lo, double hi, int m);
  static GridSpec square_torus(double lo, double hi, int m);

  double spacing(int axis) const;
  double coord(int axis, int i) const { return lo[axis] + spacing(axis) * i; }
  Point node(int ix, int iy = 0) const;
  int extent(int axis) const { return m[axis]; }
  std::size_t node_count() const;
  // Flat index, x fastest.
  std::size_t index(int ix, int iy = 0) const {
    return static_cast<std::size_t>(iy) * static_cast<std::size_t>(m[0]) + static_cast<std::size_t>(ix);
  }
  bool contains(const Point& p) const;  // hull membership; torus always true
  double length(int axis) const { return hi[axis] - lo[axis]; }
  // throws std::invalid_argument on malformed specs (m < 5, hi <= lo, ...)
  void validate() const;
  bool operator==(const GridSpec&) const = default;
};

// Inclusive per-axis index ranges of the nodes an operation is defined on.
// Torus grids have no margin; box grids lose `margin` rings.
struct IndexBox {
  std::array<int, 2> first{0, 0};
  std::array<int, 2> last{0, 0};
  bool contains(int ix, int iy = 0) const {
    return ix >= first[0] && ix <= last[0] && iy >= first[1] && iy <= last[1];
  }
  bool on_edge(int ix, int iy = 0) const;
  bool empty() const { return last[0] < first[0] || last[1] < first[1]; }
};

IndexBox interior_box(const GridSpec& g, int margin);

// Distinguishes a full potential from a perturbation riding on a quadratic
// background (torus mode of the flow), plus derived per-node quantities.
enum class FieldRole { potential, perturbation, derived };

struct ScalarField {
  GridSpec grid;
  FieldRole role = FieldRole::potential;
  std::vector<double> values;

  static ScalarField zeros(const GridSpec& g, FieldRole role = FieldRole::potential);
  static ScalarField sample(const GridSpec& g, const std::function<double(Point)>& f,
                            FieldRole role = FieldRole::potential);

  double& at(int ix, int iy = 0) { return values[grid.index(ix, iy)]; }
  double at(int ix, int iy = 0) const { return values[grid.index(ix, iy)]; }
  bool all_finite() const;
  // throws std::invalid_argument naming `what` if any value is NaN/Inf
  void require_finite(const char* what) const;
};

// Per-node vectors (e.g. gradients), component-major storage. Values are
// written only on interior_box(grid, margin); other slots stay zero.
struct VectorField {
  GridSpec grid;
  int margin = 0;
  std::array<std::vector<double>, 2> comp;

  static VectorField zeros(const GridSpec& g, int margin);
  Point at(int ix, int iy = 0) const;
  void set(int ix, int iy, const Point& v);
};

// Per-node symmetric matrices (e.g. Hessians); same margin convention.
struct SymmetricMatrixField {
  GridSpec grid;
  int margin = 0;
  std::vector<double> xx, xy, yy;

  static SymmetricMatrixField zeros(const GridSpec& g, int margin);
  Sym2 at(int ix, int iy = 0) const;
  void set(int ix, int iy, const Sym2& s);
};

}  // namespace malab
