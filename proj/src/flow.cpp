#include "malab/flow.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "detail/stencil.hpp"
#include "kernels.hpp"
#include "malab/calculus.hpp"

namespace malab {

namespace {

std::string node_str(const Point& x, int dim) {
  std::string s = "x = (" + std::to_string(x[0]);
  if (dim == 2) s += ", " + std::to_string(x[1]);
  return s + ")";
}

const Sym2* background_of(const FlowState& s) {
  return s.background ? &s.background->Q : nullptr;
}

}  // namespace

FlowState FlowState::full_potential(ScalarField u, double nu) {
  FlowState s;
  s.field = std::move(u);
  s.field.role = FieldRole::potential;
  s.nu = nu;
  s.validate();
  return s;
}

FlowState FlowState::perturbation(ScalarField v, QuadraticForm bg, double nu) {
  FlowState s;
  s.field = std::move(v);
  s.field.role = FieldRole::perturbation;
  s.background = std::move(bg);
  s.nu = nu;
  s.validate();
  return s;
}

void FlowState::validate() const {
  field.grid.validate();
  field.require_finite("FlowState");
  if (!(nu > 0.0) || !std::isfinite(nu))
    throw std::invalid_argument("FlowState: nu must be positive and finite");
  const bool torus = field.grid.topology == Topology::torus;
  if (torus != perturbation_mode())
    throw std::invalid_argument(
        "FlowState: torus grids carry perturbations on a quadratic background; "
        "box grids carry full potentials");
  if (background) {
    background->validate();
    if (background->dim != field.grid.dim)
      throw std::invalid_argument("FlowState: background dimension mismatch");
  }
}

ConvexityLossError::ConvexityLossError(std::size_t idx, const Point& x, int dim, double t)
    : std::runtime_error("convexity lost at node " + std::to_string(idx) + ", " +
                         node_str(x, dim) + ", t = " + std::to_string(t)),
      node_index(idx),
      time(t) {}

double stable_dt(const FlowState& s, double sigma) {
  s.validate();
  if (!(sigma > 0.0) || !std::isfinite(sigma))
    throw std::invalid_argument("stable_dt: sigma must be positive (got " +
                                std::to_string(sigma) + "); sigma = 0 would freeze the flow");
  const kernels::EigRange r = kernels::hessian_eig_range(s.field, background_of(s), 2);
  if (!(r.lo > 0.0))
    throw std::domain_error("stable_dt: effective Hessian not positive definite (min eig = " +
                            std::to_string(r.lo) + ")");
  double h = s.field.grid.spacing(0);
  if (s.dim() == 2) h = std::fmin(h, s.field.grid.spacing(1));
  // max lambda_max((D^2 u)^-1) == 1 / min lambda_min(D^2 u)
  return sigma * h * h * r.lo / (2.0 * s.nu * s.dim());
}

void step_explicit(FlowState& s, double dt, const BoundaryData* boundary) {
  if (!(dt > 0.0) || !std::isfinite(dt))
    throw std::invalid_argument("step_explicit: dt must be positive and finite");
  const bool box = s.field.grid.topology == Topology::box;
  if (box && (boundary == nullptr || !boundary->value))
    throw std::invalid_argument("step_explicit: box grids need boundary data");
  if (!box && boundary != nullptr)
    throw std::invalid_argument("step_explicit: torus grids take no boundary data");

  const GridSpec& g = s.field.grid;
  std::vector<double> next(s.field.values);  // margin rings overwritten below
  const std::size_t bad = kernels::flow_step(s.field, background_of(s), dt, s.nu, next);
  if (bad != kernels::npos) {
    const int ix = static_cast<int>(bad % g.m[0]);
    const int iy = static_cast<int>(bad / g.m[0]);
    throw ConvexityLossError(bad, g.node(ix, iy), g.dim, s.t);
  }
  const double t_next = s.t + dt;
  if (box) {
    const IndexBox ib = interior_box(g, 2);
    for (int iy = 0; iy < g.m[1]; ++iy)
      for (int ix = 0; ix < g.m[0]; ++ix)
        if (!ib.contains(ix, iy)) next[g.index(ix, iy)] = boundary->value(g.node(ix, iy), t_next);
  }
  s.field.values.swap(next);
  s.t = t_next;
  ++s.steps;
}

std::pair<double, double> condition_S_monitor(const FlowState& s) {
  s.validate();
  const kernels::EigRange r = kernels::hessian_eig_range(s.field, background_of(s), 2);
  return {r.lo, r.hi};
}

TranslatingVerification run_translating_verification(const Sym2& Q, const Point& p, const Point& a,
                                                     double T, const GridSpec& grid, double sigma) {
  grid.validate();
  if (grid.topology != Topology::box)
    throw std::invalid_argument("run_translating_verification: needs a box grid");
  if (!(T >= 0.0) || !std::isfinite(T))
    throw std::invalid_argument("run_translating_verification: T must be >= 0");

  // nu = 1 is the normalization in which the translating closed form below
  // moves with velocity exactly `a`
  const QuadraticSoliton sol = make_quadratic_soliton(Q, p, a, grid.dim, 1.0);
  const Point b = sol.params.b;
  const double c = sol.params.c;
  const auto exact = [&](const Point& x, double t) {
    return sol.u.value(x - t * a) + (dot(b, x) - 0.5 * dot(b, a) * t + c) * t;
  };

  FlowState state = FlowState::full_potential(
      ScalarField::sample(grid, [&](Point x) { return exact(x, 0.0); }), 1.0);
  const BoundaryData bc{[&](Point x, double t) { return exact(x, t); }};

  TranslatingVerification out;
  if (T > 0.0) {
    const double dt0 = stable_dt(state, sigma);
    out.steps = static_cast<long>(std::ceil(T / dt0));
    out.dt = T / static_cast<double>(out.steps);
    for (long k = 0; k < out.steps; ++k) step_explicit(state, out.dt, &bc);
  }
  double sup = 0.0;
  for (int iy = 0; iy < grid.m[1]; ++iy)
    for (int ix = 0; ix < grid.m[0]; ++ix) {
      const Point x = grid.node(ix, iy);
      sup = std::fmax(sup, std::fabs(state.field.at(ix, iy) - exact(x, state.t)));
    }
  out.sup_error = sup;
  return out;
}

double DecayTrace::window_max(double eps0) const {
  double m = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i)
    if (t[i] >= eps0 && t[i] <= 2.0 * eps0) m = std::fmax(m, t[i] * sup_d3_sq[i]);
  return m;
}

DecayTrace run_decay_experiment(const Sym2& Q, const PerturbationSpec& pert, const GridSpec& torus,
                                double T, int samples, double sigma, double nu) {
  torus.validate();
  if (torus.topology != Topology::torus)
    throw std::invalid_argument("run_decay_experiment: needs a torus grid");
  if (!(T > 0.0) || samples < 1)
    throw std::invalid_argument("run_decay_experiment: need T > 0 and samples >= 1");

  QuadraticForm bg;
  bg.dim = torus.dim;
  bg.Q = Q;
  bg.validate();

  const auto v0 = [&](Point x) {
    double v = pert.amplitude * std::sin(pert.kx * x[0]);
    if (torus.dim == 2) v *= std::sin(pert.ky * x[1]);
    return v;
  };
  FlowState state = FlowState::perturbation(
      ScalarField::sample(torus, v0, FieldRole::perturbation), bg, nu);

  // the uniform convexity sandwich must hold at t = 0 or decay is meaningless
  const auto [l0, h0] = condition_S_monitor(state);
  if (!(l0 > 0.0))
    throw std::invalid_argument(
        "run_decay_experiment: initial data violates uniform convexity (min eig = " +
        std::to_string(l0) + " <= 0); shrink the perturbation amplitude");
  (void)h0;

  const double dt0 = stable_dt(state, sigma);
  const double interval = T / samples;
  const long per_interval = static_cast<long>(std::ceil(interval / dt0));
  const double dt = interval / static_cast<double>(per_interval);

  DecayTrace trace;
  trace.dt = dt;
  const auto record = [&](double t_now) {
    trace.t.push_back(t_now);
    trace.sup_d3_sq.push_back(third_derivative_sup_sq(state.field));
    const auto [lmin, lmax] = condition_S_monitor(state);
    trace.lambda_min.push_back(lmin);
    trace.lambda_max.push_back(lmax);
    // gauged right side; its sup bounds the per-step drift of the mean
    const detail::StencilView s(state.field);
    const double log_det_bg = std::log(Q.det(torus.dim));
    double rhs = 0.0;
    for (int iy = 0; iy < torus.m[1]; ++iy)
      for (int ix = 0; ix < torus.m[0]; ++ix) {
        const Sym2 H = Q + s.hess(ix, iy);
        rhs = std::fmax(rhs, std::fabs(std::log(H.det(torus.dim)) - log_det_bg));
      }
    trace.rhs_sup.push_back(rhs);
  };

  record(0.0);
  for (int j = 1; j <= samples; ++j) {
    for (long k = 0; k < per_interval; ++k) step_explicit(state, dt, nullptr);
    trace.total_steps += per_interval;
    record(j * interval);
  }
  return trace;
}

}  // namespace malab
