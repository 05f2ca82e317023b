#pragma once

// Time evolution of
//   i u_t + delta Lambda u = -mu |u|^{nu-1} u,
// delta = 1 being the half-wave equation itself.

#include <string>
#include <vector>

#include "hwlab/grid.hpp"

namespace hwlab {

struct EquationParams {
  double nu = 3.0;
  int mu = 1;
  double delta = 1.0;
  /// false drops the power term (linear flow only).
  bool nonlinear = true;

  void validate() const;
};

/// Non-finite values after a step.
class SolverBlowup : public Error {
 public:
  SolverBlowup(const std::string& what, double time) : Error(what), time_(time) {}
  double time() const { return time_; }

 private:
  double time_;
};

/// Exact delta = 0 flow: phi0 * exp(i mu t |phi0|^{nu-1}); params.delta is ignored.
Field zero_dispersion_flow(const Field& phi0, double t, const EquationParams& params);

/// One Strang step: half nonlinear phase, full linear propagator, half nonlinear
/// phase. A negative dt steps backwards.
Field strang_step(const Field& u, double dt, const EquationParams& params);

/// In-place Strang stepper with precomputed propagator for repeated steps.
class SplitStepper {
 public:
  SplitStepper(const GridSpec& grid, double dt, const EquationParams& params);

  /// Advances physical samples by one step.
  void step(std::vector<cplx>& u) const;
  /// The exact nonlinear phase flow over `tau` applied in place.
  void nonlinear_flow(std::vector<cplx>& u, double tau) const;
  /// Linear propagation over dt in place.
  void linear_flow(std::vector<cplx>& u) const;

  const GridSpec& grid() const { return grid_; }
  double dt() const { return dt_; }
  const EquationParams& params() const { return params_; }

 private:
  GridSpec grid_;
  double dt_;
  EquationParams params_;
  std::vector<cplx> propagator_;
};

double mass(const Field& u);
/// 1/2 ||Lambda^{1/2} u||^2 + mu/(nu+1) int |u|^{nu+1}.
double energy(const Field& u, const EquationParams& params);

struct MonitorSpec {
  /// Sample every `stride` steps (the final time is always sampled).
  int stride = 1;
  /// Inhomogeneous H^gamma (q = 2) norms to record.
  std::vector<double> gammas;
  /// Halt once a monitored norm exceeds this multiple of its initial value.
  double ceiling_factor = 1e6;
  /// Keep every sampled state; otherwise only the last one is kept.
  bool keep_states = true;
};

struct MonitorSample {
  double mass = 0.0;
  double energy = 0.0;
  std::vector<double> norms;
  /// max |u| over the grid.
  double linf = 0.0;
  /// int_0^t ||u(s)||_inf^{nu-1} ds by the trapezoid rule over steps.
  double nonlinear_integral = 0.0;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<Field> states;  // one per time, or just the last without keep_states
  std::vector<MonitorSample> monitors;
  bool halted = false;
  std::string halt_reason;
};

/// Repeated strang_step from u0 to T. dt must divide T. Throws SolverBlowup.
Trajectory evolve(const Field& u0, double T, double dt, const EquationParams& params,
                  const MonitorSpec& monitor = {});

/// State at T only (no monitors).
Field evolve_to(const Field& u0, double T, double dt, const EquationParams& params);

struct PicardReport {
  Trajectory trajectory;
  /// sup over nodes of ||u^{k+1} - u^k||_{L^2}, per iteration.
  std::vector<double> increments;
  /// increments[k] / increments[k-1].
  std::vector<double> contraction_factors;
  int iterations = 0;
  bool converged = false;
};

/// Fixed-point iteration of the Duhamel map from the free evolution, with the
/// time integral by the trapezoid rule over n_nodes uniform nodes on [0, T].
PicardReport picard_solve(const Field& u0, double T, int n_nodes, const EquationParams& params,
                          double tol, int max_iter);

/// lambda^{-1/(nu-1)} phi(lambda^{-1} delta x) on a box of length L lambda / delta.
Field rescale_solution(const Field& phi, double lambda, double delta, double nu);

/// max_t log(||u(t)||_{H^beta} / ||u_0||_{H^beta}) / int_0^t ||u||_inf^{nu-1}, using
/// monitored norm `norm_index`. Samples with a zero integral are skipped.
double persistence_constant(const Trajectory& traj, std::size_t norm_index);

}  // namespace hwlab
