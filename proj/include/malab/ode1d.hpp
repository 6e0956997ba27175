#pragma once

#include <stdexcept>
#include <vector>

// One-dimensional reduction: the profile equation
//
//     u''(t) = exp( -a0 u'(t) + b0 t + c ),    a0 * b0 > 0.
//
// The even-about-t0 solution is the parabola u = (b0 / 2 a0)(t - t0)^2 + u_min,
// available when c takes the compatible value log(b0/a0) - b0 t0; solve_ivp
// integrates arbitrary initial data with classical RK4 both ways from t0 and
// symmetry_residual measures how far a computed profile is from evenness.

namespace malab {

struct Ode1dParams {
  double a0 = 1.0;
  double b0 = 1.0;
  double c = 0.0;
  double t0 = 0.0;
  double u_min = 0.0;

  void validate() const;  // throws std::invalid_argument unless a0 * b0 > 0
};

// the unique c for which the parabola centered at t0 solves the equation
double symmetric_c(double a0, double b0, double t0);

struct OdeOverflowError : std::runtime_error {
  double time;
  explicit OdeOverflowError(double t);
};

// Uniformly sampled profile; node 0 sits at t0 - left and t0 is always one
// of the nodes (index i0).
struct OdeProfile {
  double t0 = 0.0;
  double dt = 0.0;
  std::size_t i0 = 0;
  std::vector<double> t, u, w;  // w = u'

  double value(double tq) const;  // linear interpolation inside the span
};

// parabola (b0 / 2 a0)(t - t0)^2 + u_min sampled like solve_ivp would
OdeProfile exact_symmetric_solution(double a0, double b0, double t0, double u_min, double left,
                                    double right, double dt);

// classical RK4 from (t0, u0, w0), backward over [t0-left, t0] and forward
// over [t0, t0+right], fixed step dt (span rounded up to whole steps)
OdeProfile solve_ivp(const Ode1dParams& p, double u0, double w0, double left, double right,
                     double dt);

// max over sampled offsets s of |u(t0+s) - u(t0-s)|; requires a span
// symmetric about t0 (use equal left/right)
double symmetry_residual(const OdeProfile& prof);

}  // namespace malab
