#include <cmath>

#include "hwlab/evolution.hpp"

namespace hwlab {
namespace {

Field power_term(const Field& u_phys, double nu) {
  Field out = u_phys;
  for (auto& z : out.values()) {
    const double m = std::abs(z);
    z = m == 0.0 ? cplx(0.0) : z * std::pow(m, nu - 1.0);
  }
  return out;
}

}  // namespace

PicardReport picard_solve(const Field& u0, double T, int n_nodes, const EquationParams& params,
                          double tol, int max_iter) {
  params.validate();
  if (!(T > 0.0)) throw Error("picard_solve: T must be positive");
  if (n_nodes < 8) throw Error("picard_solve: at least 8 quadrature nodes are required");
  if (!(tol > 0.0) || max_iter < 1) throw Error("picard_solve: tol > 0 and max_iter >= 1 required");

  const double h = T / (n_nodes - 1);
  std::vector<double> times(n_nodes);
  for (int n = 0; n < n_nodes; ++n) times[n] = n * h;
  const Field u0_spec = to_space(u0, Space::spectral);

  // Start from the free evolution.
  std::vector<Field> iterate;
  iterate.reserve(n_nodes);
  for (double t : times) iterate.push_back(propagate_linear(u0_spec, t, params.delta));

  PicardReport report;
  const cplx coupling(0.0, static_cast<double>(params.mu));
  for (int it = 1; it <= max_iter; ++it) {
    std::vector<Field> next;
    next.reserve(n_nodes);
    // Interaction picture: u(t) = e^{it Lambda}(u0 + i mu int_0^t e^{-is Lambda} F(u(s)) ds).
    Field integral(u0_spec.grid(), Space::spectral);
    Field prev_integrand(u0_spec.grid(), Space::spectral);
    for (int n = 0; n < n_nodes; ++n) {
      Field integrand(u0_spec.grid(), Space::spectral);
      if (params.nonlinear) {
        Field f = forward_transform(power_term(to_space(iterate[n], Space::physical), params.nu));
        integrand = propagate_linear(f, -times[n], params.delta);
      }
      if (n > 0) integral = integral + cplx(0.5 * h) * (prev_integrand + integrand);
      prev_integrand = integrand;
      next.push_back(propagate_linear(u0_spec + coupling * integral, times[n], params.delta));
    }
    double inc = 0.0;
    for (int n = 0; n < n_nodes; ++n) inc = std::max(inc, l2_norm(next[n] - iterate[n]));
    if (!report.increments.empty() && report.increments.back() > 0.0) {
      report.contraction_factors.push_back(inc / report.increments.back());
    }
    report.increments.push_back(inc);
    report.iterations = it;
    iterate = std::move(next);
    if (!std::isfinite(inc)) break;
    if (inc < tol) {
      report.converged = true;
      break;
    }
  }

  for (int n = 0; n < n_nodes; ++n) {
    Field state = to_space(iterate[n], Space::physical);
    MonitorSample s;
    s.mass = mass(state);
    s.energy = energy(state, params);
    report.trajectory.times.push_back(times[n]);
    report.trajectory.monitors.push_back(s);
    report.trajectory.states.push_back(std::move(state));
  }
  return report;
}

}  // namespace hwlab
