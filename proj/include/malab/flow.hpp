#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "malab/grid.hpp"
#include "malab/soliton.hpp"

// The parabolic side: explicit time stepping of
//
//     du/dt = nu * log det D^2 u
//
// on box grids (full potential, two margin rings prescribed by boundary
// data) or torus grids (perturbation v riding on a quadratic background Q,
// gauged update v += dt * nu * (log det(Q + D^2 v) - log det Q) so the
// background itself is a fixed point). Convexity of the effective Hessian is
// a step invariant; losing it raises ConvexityLossError with the node and
// time. All per-step work runs through the kernels layer, so traces are
// bit-stable across thread counts.

namespace malab {

struct BoundaryData {
  std::function<double(Point, double)> value;  // u(x, t) on the margin rings
};

struct FlowState {
  ScalarField field;                       // potential (box) or perturbation v (torus)
  std::optional<QuadraticForm> background; // engaged iff perturbation mode
  double t = 0.0;
  long steps = 0;
  double nu = 1.0;

  static FlowState full_potential(ScalarField u, double nu = 1.0);
  static FlowState perturbation(ScalarField v, QuadraticForm bg, double nu = 1.0);
  bool perturbation_mode() const { return background.has_value(); }
  int dim() const { return field.grid.dim; }
  void validate() const;
};

struct ConvexityLossError : std::runtime_error {
  std::size_t node_index;
  double time;
  ConvexityLossError(std::size_t idx, const Point& x, int dim, double t);
};

// sigma * h^2 / (2 nu dim max_nodes lambda_max((D^2 u)^-1)), h the smallest
// spacing. Throws std::domain_error when the effective Hessian is not
// positive definite everywhere, std::invalid_argument when sigma <= 0.
double stable_dt(const FlowState& s, double sigma = 0.5);

// One explicit Euler step. Box mode requires boundary data (evaluated at
// t + dt on the two margin rings); torus mode forbids it.
void step_explicit(FlowState& s, double dt, const BoundaryData* boundary = nullptr);

// (min, max) eigenvalue of the effective Hessian over the evaluated interior
std::pair<double, double> condition_S_monitor(const FlowState& s);

struct TranslatingVerification {
  double sup_error = 0.0;  // against the closed-form translating profile at time T
  double dt = 0.0;
  long steps = 0;
};

// Builds the quadratic soliton for (Q, p, a), evolves it on the box grid with
// exact boundary data, and compares against the translating closed form.
TranslatingVerification run_translating_verification(const Sym2& Q, const Point& p, const Point& a,
                                                     double T, const GridSpec& grid,
                                                     double sigma = 0.5);

// product-mode perturbation amplitude * sin(kx x) * sin(ky y) (1D drops ky)
struct PerturbationSpec {
  double amplitude = 0.0;
  int kx = 1;
  int ky = 1;
};

struct DecayTrace {
  std::vector<double> t;
  std::vector<double> sup_d3_sq;   // sup |D^3 u|^2 at the sample time
  std::vector<double> lambda_min;  // effective-Hessian eigenvalue extremes
  std::vector<double> lambda_max;
  std::vector<double> rhs_sup;     // sup |log det(Q + D^2 v) - log det Q|
  double dt = 0.0;
  long total_steps = 0;

  // max of t * sup|D^3 u|^2 over samples with t in [eps0, 2 eps0]
  double window_max(double eps0) const;
};

// Torus relaxation run: background Q plus the trigonometric perturbation,
// sampled `samples` times over [0, T] (t = 0 included). Initial data must
// satisfy the uniform convexity sandwich (lambda_min > 0) or the run is
// rejected up front.
DecayTrace run_decay_experiment(const Sym2& Q, const PerturbationSpec& pert, const GridSpec& torus,
                                double T, int samples, double sigma = 0.5, double nu = 1.0);

}  // namespace malab
