#include "hwlab/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fft.hpp"
#include "hwlab/norms.hpp"

namespace hwlab {
namespace {

bool finite_values(const std::vector<cplx>& u) {
  return std::all_of(u.begin(), u.end(),
                     [](const cplx& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
}

double max_modulus(std::span<const cplx> u) {
  double m = 0.0;
  for (const auto& z : u) m = std::max(m, std::abs(z));
  return m;
}

std::string at_time(const char* what, double t) {
  std::ostringstream msg;
  msg << what << " at t = " << t;
  return msg.str();
}

}  // namespace

void EquationParams::validate() const {
  if (!(nu > 1.0) || !std::isfinite(nu)) throw Error("nonlinearity power nu must be > 1");
  if (mu != 1 && mu != -1) throw Error("mu must be +1 or -1");
  if (!(delta >= 0.0 && delta <= 1.0)) throw Error("dispersion delta must lie in [0, 1]");
}

Field zero_dispersion_flow(const Field& phi0, double t, const EquationParams& params) {
  params.validate();
  Field out = to_space(phi0, Space::physical);
  if (t == 0.0 || !params.nonlinear) return out;
  const double c = params.mu * t;
  for (auto& z : out.values()) {
    const double m = std::abs(z);
    if (m == 0.0) continue;
    z *= std::polar(1.0, c * std::pow(m, params.nu - 1.0));
  }
  return out;
}

SplitStepper::SplitStepper(const GridSpec& grid, double dt, const EquationParams& params)
    : grid_(grid), dt_(dt), params_(params) {
  grid_.validate();
  params_.validate();
  if (!(dt != 0.0) || !std::isfinite(dt)) throw Error("time step must be finite and nonzero");
  if (params_.delta != 0.0) {
    const auto kn = wavenumber_norms(grid_);
    const double inv_n = 1.0 / static_cast<double>(grid_.size());
    propagator_.resize(kn.size());
    for (std::size_t i = 0; i < kn.size(); ++i) {
      propagator_[i] = std::polar(inv_n, dt_ * params_.delta * kn[i]);
    }
  }
}

void SplitStepper::nonlinear_flow(std::vector<cplx>& u, double tau) const {
  if (!params_.nonlinear) return;
  const double c = params_.mu * tau;
  const double p = params_.nu - 1.0;
  for (auto& z : u) {
    const double m = std::abs(z);
    if (m == 0.0) continue;
    z *= std::polar(1.0, c * std::pow(m, p));
  }
}

void SplitStepper::linear_flow(std::vector<cplx>& u) const {
  if (propagator_.empty()) return;
  // The box-offset phase and the unitary scale cancel between the two transforms.
  detail::fft_inplace(u, grid_.dim, grid_.n, -1);
  for (std::size_t i = 0; i < u.size(); ++i) u[i] *= propagator_[i];
  detail::fft_inplace(u, grid_.dim, grid_.n, +1);
}

void SplitStepper::step(std::vector<cplx>& u) const {
  nonlinear_flow(u, 0.5 * dt_);
  linear_flow(u);
  nonlinear_flow(u, 0.5 * dt_);
}

Field strang_step(const Field& u, double dt, const EquationParams& params) {
  Field phys = to_space(u, Space::physical);
  SplitStepper stepper(phys.grid(), dt, params);
  std::vector<cplx> values(phys.values().begin(), phys.values().end());
  stepper.step(values);
  if (!finite_values(values)) throw SolverBlowup(at_time("solver blowup", dt), dt);
  return Field(phys.grid(), std::move(values), Space::physical);
}

double mass(const Field& u) {
  const double n = l2_norm(u);
  return n * n;
}

double energy(const Field& u, const EquationParams& params) {
  params.validate();
  Field spec = to_space(u, Space::spectral);
  const auto kn = wavenumber_norms(spec.grid());
  double kinetic = 0.0;
  for (std::size_t i = 0; i < spec.size(); ++i) kinetic += kn[i] * std::norm(spec[i]);
  kinetic *= spec.grid().spectral_cell_volume();
  double potential = 0.0;
  if (params.nonlinear) {
    Field phys = to_space(u, Space::physical);
    for (const auto& z : phys.values()) potential += std::pow(std::abs(z), params.nu + 1.0);
    potential *= phys.grid().cell_volume() * params.mu / (params.nu + 1.0);
  }
  return 0.5 * kinetic + potential;
}

namespace {

MonitorSample sample(const Field& u, const EquationParams& params, const MonitorSpec& spec,
                     double integral) {
  MonitorSample s;
  s.mass = mass(u);
  s.energy = energy(u, params);
  Field f = to_space(u, Space::spectral);
  for (double g : spec.gammas) s.norms.push_back(sobolev_norm(f, g, false, Exponent::finite(2)));
  s.linf = max_modulus(u.values());
  s.nonlinear_integral = integral;
  return s;
}

std::size_t step_count(double T, double dt) {
  if (!(T > 0.0) || !std::isfinite(T)) throw Error("final time T must be positive");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw Error("time step dt must be positive");
  const double ratio = T / dt;
  const double steps = std::round(ratio);
  if (steps < 1.0 || std::abs(ratio - steps) > 1e-9 * std::max(1.0, ratio)) {
    throw Error("time step dt does not divide T");
  }
  return static_cast<std::size_t>(steps);
}

}  // namespace

Trajectory evolve(const Field& u0, double T, double dt, const EquationParams& params,
                  const MonitorSpec& monitor) {
  if (monitor.stride < 1) throw Error("monitor stride must be >= 1");
  const std::size_t steps = step_count(T, dt);
  Field phys = to_space(u0, Space::physical);
  if (!phys.all_finite()) throw Error("evolve: non-finite initial data");
  SplitStepper stepper(phys.grid(), dt, params);
  std::vector<cplx> u(phys.values().begin(), phys.values().end());

  Trajectory traj;
  double integral = 0.0;
  double prev_sup = std::pow(max_modulus(u), params.nu - 1.0);
  auto record = [&](double t) {
    Field state(phys.grid(), u, Space::physical);
    traj.times.push_back(t);
    traj.monitors.push_back(sample(state, params, monitor, integral));
    if (monitor.keep_states) traj.states.push_back(std::move(state));
  };
  auto finish = [&] {
    if (!monitor.keep_states) traj.states.emplace_back(phys.grid(), u, Space::physical);
    return traj;
  };
  record(0.0);
  const std::vector<double> initial = traj.monitors.front().norms;

  for (std::size_t k = 1; k <= steps; ++k) {
    stepper.step(u);
    const double t = static_cast<double>(k) * dt;
    if (!finite_values(u)) throw SolverBlowup(at_time("solver blowup", t), t);
    const double sup = std::pow(max_modulus(u), params.nu - 1.0);
    integral += 0.5 * dt * (prev_sup + sup);
    prev_sup = sup;
    if (k % static_cast<std::size_t>(monitor.stride) != 0 && k != steps) continue;
    record(t);
    const auto& norms = traj.monitors.back().norms;
    for (std::size_t i = 0; i < norms.size(); ++i) {
      if (norms[i] > monitor.ceiling_factor * initial[i] && initial[i] > 0.0) {
        traj.halted = true;
        traj.halt_reason = at_time("norm ceiling exceeded", t);
        return finish();
      }
    }
  }
  return finish();
}

Field evolve_to(const Field& u0, double T, double dt, const EquationParams& params) {
  const std::size_t steps = step_count(T, dt);
  Field phys = to_space(u0, Space::physical);
  SplitStepper stepper(phys.grid(), dt, params);
  std::vector<cplx> u(phys.values().begin(), phys.values().end());
  for (std::size_t k = 1; k <= steps; ++k) {
    stepper.step(u);
    if (!finite_values(u)) {
      const double t = static_cast<double>(k) * dt;
      throw SolverBlowup(at_time("solver blowup", t), t);
    }
  }
  return Field(phys.grid(), std::move(u), Space::physical);
}

Field rescale_solution(const Field& phi, double lambda, double delta, double nu) {
  if (!(lambda > 0.0) || !(delta > 0.0)) throw Error("rescale_solution: lambda and delta must be positive");
  if (!(nu > 1.0)) throw Error("rescale_solution: nu must be > 1");
  const double amplitude = std::pow(lambda, -1.0 / (nu - 1.0));
  Field out = dilate(phi, delta / lambda);
  for (auto& z : out.values()) z *= amplitude;
  return out;
}

double persistence_constant(const Trajectory& traj, std::size_t norm_index) {
  if (traj.monitors.empty() || norm_index >= traj.monitors.front().norms.size()) {
    throw Error("persistence_constant: norm index not monitored");
  }
  const double base = traj.monitors.front().norms[norm_index];
  if (!(base > 0.0)) throw Error("persistence_constant: zero initial norm");
  double c = 0.0;
  for (const auto& m : traj.monitors) {
    if (m.nonlinear_integral <= 0.0) continue;
    c = std::max(c, std::log(m.norms[norm_index] / base) / m.nonlinear_integral);
  }
  return c;
}

}  // namespace hwlab
