#include "malab/ode1d.hpp"

#include <cmath>
#include <string>

namespace malab {

namespace {

long steps_covering(double span, double dt) {
  // whole steps covering the span; tolerate round-off in span/dt
  return static_cast<long>(std::ceil(span / dt - 1e-9));
}

void check_span(double left, double right, double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("ode1d: dt must be positive");
  if (left < 0.0 || right < 0.0 || (left == 0.0 && right == 0.0))
    throw std::invalid_argument("ode1d: need a nonempty span (left, right >= 0)");
}

}  // namespace

void Ode1dParams::validate() const {
  if (!std::isfinite(a0) || !std::isfinite(b0) || !std::isfinite(c) || !std::isfinite(t0) ||
      !std::isfinite(u_min))
    throw std::invalid_argument("Ode1dParams: non-finite entry");
  if (!(a0 * b0 > 0.0))
    throw std::invalid_argument("Ode1dParams: hypothesis a0 * b0 > 0 violated (a0 = " +
                                std::to_string(a0) + ", b0 = " + std::to_string(b0) + ")");
}

double symmetric_c(double a0, double b0, double t0) {
  if (!(a0 * b0 > 0.0)) throw std::invalid_argument("symmetric_c: requires a0 * b0 > 0");
  return std::log(b0 / a0) - b0 * t0;
}

OdeOverflowError::OdeOverflowError(double t)
    : std::runtime_error("ode1d: right side overflowed at t = " + std::to_string(t) +
                         "; solution blows up before the requested span"),
      time(t) {}

double OdeProfile::value(double tq) const {
  if (t.empty()) throw std::logic_error("OdeProfile::value: empty profile");
  if (tq < t.front() - 1e-12 || tq > t.back() + 1e-12)
    throw std::domain_error("OdeProfile::value: query outside the sampled span");
  const double pos = (tq - t.front()) / dt;
  std::size_t i = static_cast<std::size_t>(std::floor(pos));
  if (i >= t.size() - 1) i = t.size() - 2;
  const double w01 = pos - static_cast<double>(i);
  return (1.0 - w01) * u[i] + w01 * u[i + 1];
}

OdeProfile exact_symmetric_solution(double a0, double b0, double t0, double u_min, double left,
                                    double right, double dt) {
  if (!(a0 * b0 > 0.0)) throw std::invalid_argument("exact_symmetric_solution: requires a0 * b0 > 0");
  check_span(left, right, dt);
  const long nl = left > 0.0 ? steps_covering(left, dt) : 0;
  const long nr = right > 0.0 ? steps_covering(right, dt) : 0;
  OdeProfile prof;
  prof.t0 = t0;
  prof.dt = dt;
  prof.i0 = static_cast<std::size_t>(nl);
  const double k = b0 / (2.0 * a0);
  for (long i = -nl; i <= nr; ++i) {
    const double s = static_cast<double>(i) * dt;
    prof.t.push_back(t0 + s);
    prof.u.push_back(k * s * s + u_min);
    prof.w.push_back(2.0 * k * s);
  }
  return prof;
}

OdeProfile solve_ivp(const Ode1dParams& p, double u0, double w0, double left, double right,
                     double dt) {
  p.validate();
  check_span(left, right, dt);
  if (!std::isfinite(u0) || !std::isfinite(w0))
    throw std::invalid_argument("solve_ivp: non-finite initial data");

  const auto f = [&](double t, double w) {
    const double v = std::exp(-p.a0 * w + p.b0 * t + p.c);
    if (!std::isfinite(v)) throw OdeOverflowError(t);
    return v;
  };
  // one classical RK4 update of (u, w); h may be negative (backward sweep)
  const auto rk4 = [&](double t, double& u, double& w, double h) {
    const double k1w = f(t, w), k1u = w;
    const double k2w = f(t + 0.5 * h, w + 0.5 * h * k1w), k2u = w + 0.5 * h * k1w;
    const double k3w = f(t + 0.5 * h, w + 0.5 * h * k2w), k3u = w + 0.5 * h * k2w;
    const double k4w = f(t + h, w + h * k3w), k4u = w + h * k3w;
    u += h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
    w += h / 6.0 * (k1w + 2.0 * k2w + 2.0 * k3w + k4w);
  };

  const long nl = left > 0.0 ? steps_covering(left, dt) : 0;
  const long nr = right > 0.0 ? steps_covering(right, dt) : 0;
  OdeProfile prof;
  prof.t0 = p.t0;
  prof.dt = dt;
  prof.i0 = static_cast<std::size_t>(nl);
  const std::size_t n = static_cast<std::size_t>(nl + nr + 1);
  prof.t.assign(n, 0.0);
  prof.u.assign(n, 0.0);
  prof.w.assign(n, 0.0);
  for (long i = -nl; i <= nr; ++i)
    prof.t[static_cast<std::size_t>(static_cast<long>(prof.i0) + i)] =
        p.t0 + static_cast<double>(i) * dt;
  prof.u[prof.i0] = u0;
  prof.w[prof.i0] = w0;

  double u = u0, w = w0;
  for (long i = 0; i < nl; ++i) {  // backward sweep
    const double t = p.t0 - static_cast<double>(i) * dt;
    rk4(t, u, w, -dt);
    prof.u[prof.i0 - i - 1] = u;
    prof.w[prof.i0 - i - 1] = w;
  }
  u = u0;
  w = w0;
  for (long i = 0; i < nr; ++i) {  // forward sweep
    const double t = p.t0 + static_cast<double>(i) * dt;
    rk4(t, u, w, dt);
    prof.u[prof.i0 + i + 1] = u;
    prof.w[prof.i0 + i + 1] = w;
  }
  return prof;
}

double symmetry_residual(const OdeProfile& prof) {
  if (prof.t.empty()) throw std::invalid_argument("symmetry_residual: empty profile");
  const std::size_t n = prof.t.size();
  const std::size_t fwd = n - 1 - prof.i0;
  const std::size_t bwd = prof.i0;
  if (fwd != bwd)
    throw std::invalid_argument(
        "symmetry_residual: profile span is not symmetric about t0 (" + std::to_string(bwd) +
        " backward vs " + std::to_string(fwd) + " forward steps)");
  double res = 0.0;
  for (std::size_t s = 1; s <= fwd; ++s)
    res = std::fmax(res, std::fabs(prof.u[prof.i0 + s] - prof.u[prof.i0 - s]));
  return res;
}

}  // namespace malab
