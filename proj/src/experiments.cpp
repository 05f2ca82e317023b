#include "hwlab/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <optional>
#include <sstream>

#include "hwlab/evolution.hpp"
#include "hwlab/norms.hpp"
#include "parallel.hpp"

namespace hwlab {
namespace {

using Clock = std::chrono::steady_clock;
constexpr double kInf = std::numeric_limits<double>::infinity();

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::vector<double> geomspace(double a, double b, int n) {
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    out[static_cast<std::size_t>(i)] = a * std::pow(b / a, n == 1 ? 0.0 : double(i) / (n - 1));
  }
  return out;
}

double hk_norm(const Field& f, double k) { return sobolev_norm(f, k, false, Exponent::finite(2.0)); }

Field gaussian_profile(const SweepConfig& cfg, const GridSpec& g) {
  return synthesize(g, GaussianRecipe{cfg.sigma, cfg.amplitude, {}});
}

EquationParams equation(const ProblemSetup& s, double delta) {
  EquationParams p;
  p.nu = s.nu;
  p.mu = s.mu;
  p.delta = delta;
  return p;
}

std::size_t steps_for(double t, double dt) {
  const double r = t / dt;
  const auto n = static_cast<std::size_t>(std::llround(r));
  if (std::abs(r - static_cast<double>(n)) > 1e-6 * std::max(1.0, r)) {
    std::ostringstream msg;
    msg << "time " << t << " is not a multiple of dt = " << dt;
    throw Error(msg.str());
  }
  return n;
}

/// Advances physical samples by `steps` Strang steps; `t_end` labels a blowup.
void advance(const SplitStepper& s, std::vector<cplx>& u, std::size_t steps, double t_end) {
  for (std::size_t k = 0; k < steps; ++k) s.step(u);
  for (const auto& z : u) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
      std::ostringstream msg;
      msg << "solver blowup before t = " << t_end;
      throw SolverBlowup(msg.str(), t_end);
    }
  }
}

std::vector<cplx> samples(const Field& f) {
  Field p = to_space(f, Space::physical);
  return {p.values().begin(), p.values().end()};
}

FitRecord make_fit(std::string name, std::string x, std::string y, const LinearFit& fit, double expected,
                   double lo, double hi) {
  return FitRecord{std::move(name), std::move(x), std::move(y), fit, expected, lo, hi};
}

nlohmann::ordered_json sweep_inputs(const SweepConfig& cfg) {
  nlohmann::ordered_json j;
  j["d"] = cfg.setup.dim;
  j["nu"] = cfg.setup.nu;
  j["mu"] = cfg.setup.mu;
  j["n"] = cfg.grid.n;
  j["L"] = cfg.grid.box_length;
  j["dt"] = cfg.dt;
  j["delta_list"] = cfg.deltas;
  j["sigma"] = cfg.sigma;
  j["amplitude"] = cfg.amplitude;
  j["tolerance"] = cfg.tolerance;
  return j;
}

ExperimentReport small_dispersion_impl(const SweepConfig& cfg, double t_eval, int k, bool weighted,
                                       double guard) {
  const auto t0 = Clock::now();
  cfg.validate(4);
  if (!(k > 0.5 * cfg.setup.dim)) throw Error("small-dispersion sweep needs an integer k > d/2");
  if (!is_odd_integer(cfg.setup.nu) && cfg.setup.nu < k + 1) {
    throw Error("small-dispersion sweep needs nu odd or nu >= k + 1");
  }
  if (!(t_eval > 0.0) || t_eval > 2.0) throw Error("evaluation time must lie in (0, 2]");
  if (weighted && !(guard > 0.0 && guard < 1.0)) throw Error("decay guard must lie in (0, 1)");

  ExperimentReport rep;
  rep.name = weighted ? "weighted-small-dispersion" : "small-dispersion";
  rep.inputs = sweep_inputs(cfg);
  rep.inputs["t_eval"] = t_eval;
  rep.inputs["k"] = k;
  if (weighted) rep.inputs["decay_guard"] = guard;
  rep.series.columns = {"delta", weighted ? "error_hkk" : "error_hk", "self_convergence"};
  if (weighted) rep.series.columns.push_back("error_hk");

  const Field phi0 = gaussian_profile(cfg, cfg.grid);
  const Field exact = zero_dispersion_flow(phi0, t_eval, equation(cfg.setup, 0.0));

  struct Leg {
    double error = 0.0;
    double error_hk = 0.0;
    double self = 0.0;
    std::string failure;
  };
  std::vector<Leg> legs(cfg.deltas.size());
  auto measure = [&](const Field& diff, double& hk_out) {
    hk_out = hk_norm(diff, k);
    return weighted ? weighted_norm_hkk(diff, k, guard) : hk_out;
  };
  detail::parallel_for(cfg.deltas.size(), cfg.threads, [&](std::size_t i) {
    const double delta = cfg.deltas[i];
    Leg& leg = legs[i];
    if (delta == 0.0) return;  // exact formula: phi^(0) - phi^(0) = 0
    try {
      const auto p = equation(cfg.setup, delta);
      const Field coarse = evolve_to(phi0, t_eval, cfg.dt, p);
      const Field fine = evolve_to(phi0, t_eval, 0.5 * cfg.dt, p);
      leg.error = measure(coarse - exact, leg.error_hk);
      double unused = 0.0;
      const double disc = measure(coarse - fine, unused);
      leg.self = leg.error > 0.0 ? disc / leg.error : kInf;
    } catch (const SolverBlowup& e) {
      std::ostringstream msg;
      msg << e.what() << " (delta = " << delta << ")";
      leg.failure = msg.str();
    } catch (const Error& e) {
      std::ostringstream msg;
      msg << e.what() << " (delta = " << delta << ")";
      leg.failure = msg.str();
    }
  });

  std::vector<double> xs, ys;
  double max_self = 0.0;
  double worst_monotone = 0.0;
  double domination = kInf;
  double prev = -1.0;
  for (std::size_t i = 0; i < legs.size(); ++i) {
    const double delta = cfg.deltas[i];
    const Leg& leg = legs[i];
    if (!leg.failure.empty()) {
      if (rep.inconclusive_reason.empty()) rep.inconclusive_reason = leg.failure;
      continue;
    }
    std::vector<double> row{delta, leg.error, delta == 0.0 ? 0.0 : leg.self};
    if (weighted) row.push_back(leg.error_hk);
    rep.series.add_row(std::move(row));
    if (delta == 0.0) {
      rep.add_check("zero_dispersion_leg_error", leg.error, -kInf, 0.0);
      continue;
    }
    max_self = std::max(max_self, leg.self);
    if (prev > 0.0) worst_monotone = std::max(worst_monotone, leg.error / prev);
    prev = leg.error;
    if (weighted) domination = std::min(domination, leg.error / leg.error_hk);
    if (delta >= cfg.fit_min && delta <= cfg.fit_max) {
      xs.push_back(delta);
      ys.push_back(leg.error);
    }
  }
  if (!rep.inconclusive_reason.empty()) {
    rep.finalize();
    rep.runtime_seconds = seconds_since(t0);
    return rep;
  }
  if (xs.size() < 2) {
    rep.inconclusive_reason = "fewer than two sweep points inside the fit window";
    rep.finalize();
    rep.runtime_seconds = seconds_since(t0);
    return rep;
  }
  const LinearFit fit = fit_loglog(xs, ys);
  const std::string ord = weighted ? "log error_hkk" : "log error_hk";
  if (weighted) {
    rep.fits.push_back(make_fit("error_slope", "log delta", ord, fit, 0.5, 0.5, kInf));
    rep.add_check("slope_at_least_half", fit.slope, 0.5, kInf);
    rep.add_check("weighted_dominates_hk", domination, 1.0, kInf);
    rep.headline = {"slope_at_least_half"};
  } else {
    rep.fits.push_back(make_fit("error_slope", "log delta", ord, fit, 1.0, 0.9, 1.15));
    rep.add_check("slope_at_least_half", fit.slope, 0.5, kInf);
    rep.add_check("slope_in_fixed_time_band", fit.slope, 0.9, 1.15);
    rep.headline = {"slope_at_least_half", "slope_in_fixed_time_band"};
  }
  rep.add_check("monotone_in_delta", worst_monotone, -kInf, 1.05);
  rep.add_check("self_convergence", max_self, -kInf, cfg.tolerance, CheckRole::validity);
  rep.finalize();
  rep.runtime_seconds = seconds_since(t0);
  return rep;
}

}  // namespace

void SweepConfig::validate(std::size_t min_points) const {
  setup.validate();
  grid.validate();
  if (setup.dim != grid.dim) throw Error("setup dimension differs from the grid dimension");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw Error("dt must be positive");
  if (!(tolerance > 0.0)) throw Error("tolerance must be positive");
  if (!(sigma > 0.0)) throw Error("sigma must be positive");
  if (!(fit_min <= fit_max)) throw Error("empty fit window");
  if (threads < 1) throw Error("threads must be >= 1");
  std::size_t positive = 0;
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    const double d = deltas[i];
    const bool last = i + 1 == deltas.size();
    if (!(d > 0.0 && d < 1.0) && !(last && d == 0.0 && i > 0)) {
      throw Error("delta values must lie in (0, 1) (a trailing 0 is allowed as a sanity leg)");
    }
    if (i > 0 && !(d < deltas[i - 1])) throw Error("delta list must be strictly decreasing");
    if (d > 0.0) ++positive;
  }
  if (positive < min_points) {
    throw Error("sweep needs at least " + std::to_string(min_points) + " positive delta values");
  }
}

ExperimentReport small_dispersion_sweep(const SweepConfig& cfg, double t_eval, int k) {
  return small_dispersion_impl(cfg, t_eval, k, false, 0.0);
}

ExperimentReport weighted_small_dispersion_check(const SweepConfig& cfg, double t_eval, int k,
                                                 double decay_guard) {
  return small_dispersion_impl(cfg, t_eval, k, true, decay_guard);
}

ExperimentReport initial_norm_scaling(const SweepConfig& cfg, double gamma, NormScalingOptions opt) {
  const auto t0 = Clock::now();
  cfg.validate(4);
  const int d = cfg.setup.dim;
  const double half = 0.5 * d;
  ProblemSetup setup = cfg.setup;
  setup.gamma = gamma;
  const double gc = critical_exponent(d, setup.nu);
  if (!(gamma < gc)) throw Error("initial-norm scaling needs gamma < gamma_c");
  int order = opt.moment_order;
  if (gamma <= -half) {
    const int needed = static_cast<int>(std::floor(0.5 * (-gamma - half))) + 1;
    if (order == 0) order = needed;
    if (2 * order <= -gamma - half) {
      throw Error("moment order m must satisfy 2m > -gamma - d/2");
    }
  }
  if (opt.refine < 2 || (opt.refine & (opt.refine - 1)) != 0) {
    throw Error("refinement factor must be a power of two >= 2");
  }

  ExperimentReport rep;
  rep.name = "norm-scaling";
  rep.inputs = sweep_inputs(cfg);
  rep.inputs["gamma"] = gamma;
  rep.inputs["moment_order"] = order;
  rep.inputs["refine"] = opt.refine;
  rep.series.columns = {"delta", "lambda", "norm", "predicted", "ratio", "ratio_refined"};

  auto profile = [&](const GridSpec& g) {
    if (order == 0) return gaussian_profile(cfg, g);
    return synthesize(g, MomentGaussianRecipe{order, cfg.sigma, cfg.amplitude});
  };
  const Field phi0 = profile(cfg.grid);
  GridSpec fine_grid = cfg.grid;
  fine_grid.n *= opt.refine;
  const Field phi0_fine = profile(fine_grid);
  const double phi0_l2 = l2_norm(phi0);

  std::vector<double> ratios, refine_changes, exact_errors;
  for (double delta : cfg.deltas) {
    if (delta == 0.0) continue;
    const auto sp = smalldisp_parameters(setup, delta);
    const Field u = rescale_solution(phi0, sp.lambda, delta, setup.nu);
    const Field uf = rescale_solution(phi0_fine, sp.lambda, delta, setup.nu);
    const double norm = hk_norm(u, gamma);
    const double ratio = norm / sp.epsilon_pred;
    const double ratio_fine = hk_norm(uf, gamma) / sp.epsilon_pred;
    rep.series.add_row({delta, sp.lambda, norm, sp.epsilon_pred, ratio, ratio_fine});
    ratios.push_back(ratio);
    refine_changes.push_back(std::abs(ratio_fine / ratio - 1.0));
    if (gamma == 0.0) {
      const double exact = std::pow(sp.lambda, -1.0 / (setup.nu - 1.0)) *
                           std::pow(sp.lambda / delta, half) * phi0_l2;
      exact_errors.push_back(std::abs(norm / exact - 1.0));
    }
  }
  const auto [lo, hi] = std::minmax_element(ratios.begin(), ratios.end());
  rep.add_check("flatness_max_over_min", *hi / *lo, 1.0, opt.flatness_band);
  rep.add_check("refinement_change", *std::max_element(refine_changes.begin(), refine_changes.end()), -kInf,
                0.01);
  if (gamma == 0.0) {
    rep.add_check("l2_change_of_variables_error",
                  *std::max_element(exact_errors.begin(), exact_errors.end()), -kInf, 1e-8);
  }
  rep.add_check("ratio_max", *hi, 0.0, kInf, CheckRole::info);
  rep.headline = {"flatness_max_over_min"};
  if (gamma <= -half) {
    rep.notes.push_back("gamma <= -d/2: only the upper bound direction is claimed; flatness is reported");
  }
  rep.finalize();
  rep.runtime_seconds = seconds_since(t0);
  return rep;
}

ExperimentReport norm_inflation_run(const SweepConfig& cfg, double gamma, InflationOptions opt) {
  const auto t0 = Clock::now();
  cfg.validate(1);
  ProblemSetup setup = cfg.setup;
  setup.gamma = gamma;
  const auto ill = illposed_range_check(setup);
  const double gc = critical_exponent(setup.dim, setup.nu);
  if (!(gc > 0.0) || !(gamma > 0.0 && gamma < gc)) {
    throw Error("norm inflation needs gamma in (0, gamma_c): " + ill.reason);
  }
  if (!is_odd_integer(setup.nu) && gamma > setup.nu - 1.0) {
    throw Error("norm inflation needs nu odd or gamma <= nu - 1");
  }
  const double delta = cfg.deltas.front();
  const auto sp = smalldisp_parameters(setup, delta);
  if (opt.t_list.empty()) opt.t_list = geomspace(5.0, 50.0, 10);
  if (opt.t_inner.empty()) {
    const double scale = std::pow(cfg.amplitude, -(setup.nu - 1.0));
    for (double t : geomspace(5.0, 50.0, 6)) opt.t_inner.push_back(t * scale);
  }
  for (auto& t : opt.t_inner) t = static_cast<double>(std::llround(t / cfg.dt)) * cfg.dt;
  for (std::size_t i = 0; i < opt.t_inner.size(); ++i) {
    if (!(opt.t_inner[i] > 0.0) || (i > 0 && !(opt.t_inner[i] > opt.t_inner[i - 1]))) {
      throw Error("inner times must be positive and increasing after rounding to dt");
    }
  }

  ExperimentReport rep;
  rep.name = "inflation";
  rep.inputs = sweep_inputs(cfg);
  rep.inputs["gamma"] = gamma;
  rep.inputs["theta"] = sp.theta;
  rep.inputs["lambda"] = sp.lambda;
  rep.inputs["t_list"] = opt.t_list;
  rep.inputs["n_fine"] = opt.n_fine;
  rep.inputs["t_inner_list"] = opt.t_inner;
  rep.series.columns = {"leg", "t", "norm_h_gamma", "ratio", "norm_l2"};

  // Leg (a): exact zero-dispersion flow.
  const GridSpec fine = make_grid(setup.dim, opt.n_fine, cfg.grid.box_length);
  const Field phi_fine = gaussian_profile(cfg, fine);
  const auto p0 = equation(setup, 0.0);
  const double n0 = hk_norm(phi_fine, gamma);
  const double l20 = l2_norm(phi_fine);
  const double ratio0 = hk_norm(zero_dispersion_flow(phi_fine, 0.0, p0), gamma) / n0;
  rep.series.add_row({0.0, 0.0, n0, ratio0, l20});
  std::vector<double> ya(opt.t_list.size());
  double l2_drift = 0.0;
  for (std::size_t i = 0; i < opt.t_list.size(); ++i) {
    const Field z = zero_dispersion_flow(phi_fine, opt.t_list[i], p0);
    ya[i] = hk_norm(z, gamma);
    const double l2 = l2_norm(z);
    l2_drift = std::max(l2_drift, std::abs(l2 / l20 - 1.0));
    rep.series.add_row({0.0, opt.t_list[i], ya[i], ya[i] / n0, l2});
  }
  const LinearFit fa = fit_loglog(opt.t_list, ya);
  rep.fits.push_back(make_fit("zero_dispersion_growth", "log t", "log ||phi0(t)||_{H^gamma}", fa, gamma,
                              gamma - opt.slope_band, gamma + opt.slope_band));
  rep.add_check("zero_dispersion_slope", fa.slope, gamma - opt.slope_band, gamma + opt.slope_band);
  rep.add_check("t0_ratio", ratio0, 1.0 - 1e-14, 1.0 + 1e-14);
  rep.add_check("l2_constant", l2_drift, -kInf, 1e-12);

  // Leg (b): the rescaled family under the equation with unit dispersion.
  const Field phi0 = gaussian_profile(cfg, cfg.grid);
  const Field u0 = rescale_solution(phi0, sp.lambda, delta, setup.nu);
  const double u0_norm = hk_norm(u0, gamma);
  rep.add_check("initial_norm_over_eps", u0_norm / (sp.epsilon_pred * hk_norm(phi0, gamma)), -kInf, 2.0);
  const auto p1 = equation(setup, 1.0);
  std::vector<std::vector<double>> ratios(2, std::vector<double>(opt.t_inner.size()));
  std::vector<std::string> failure(2);
  detail::parallel_for(2, cfg.threads, [&](std::size_t r) {
    const double dt_inner = r == 0 ? cfg.dt : 0.5 * cfg.dt;
    SplitStepper stepper(u0.grid(), dt_inner * sp.lambda, p1);
    auto u = samples(u0);
    double t_prev = 0.0;
    try {
      for (std::size_t i = 0; i < opt.t_inner.size(); ++i) {
        advance(stepper, u, steps_for(opt.t_inner[i] - t_prev, dt_inner), opt.t_inner[i]);
        t_prev = opt.t_inner[i];
        ratios[r][i] = hk_norm(Field(u0.grid(), u, Space::physical), gamma) / u0_norm;
      }
    } catch (const SolverBlowup& e) {
      std::ostringstream msg;
      msg << e.what() << "; attainable window t_inner < " << e.time();
      failure[r] = msg.str();
    }
  });
  for (const auto& f : failure) {
    if (!f.empty()) {
      rep.inconclusive_reason = f;
      rep.finalize();
      rep.runtime_seconds = seconds_since(t0);
      return rep;
    }
  }
  double self = 0.0;
  for (std::size_t i = 0; i < opt.t_inner.size(); ++i) {
    // The L2 column is only measured on leg (a).
    rep.series.add_row({1.0, opt.t_inner[i], ratios[0][i] * u0_norm, ratios[0][i],
                        std::numeric_limits<double>::quiet_NaN()});
    self = std::max(self, std::abs(ratios[0][i] - ratios[1][i]) / ratios[0][i]);
  }
  const LinearFit fb = fit_loglog(opt.t_inner, ratios[0]);
  const double lo = gamma * (1.0 - opt.relative_band);
  const double hi = gamma * (1.0 + opt.relative_band);
  rep.fits.push_back(make_fit("rescaled_growth", "log t_inner", "log ratio", fb, gamma, lo, hi));
  rep.add_check("rescaled_slope", fb.slope, lo, hi);
  rep.headline = {"zero_dispersion_slope", "rescaled_slope"};
  rep.add_check("self_convergence", self, -kInf, cfg.tolerance, CheckRole::validity);
  rep.notes.push_back("times are inner times t; the rescaled solution is evaluated at lambda * t");
  rep.finalize();
  rep.runtime_seconds = seconds_since(t0);
  return rep;
}

ExperimentReport decoherence_run(const SweepConfig& cfg, double a, double a_prime, DecoherenceOptions opt) {
  const auto t0 = Clock::now();
  cfg.validate(1);
  if (!(a >= 0.5 && a <= 2.0) || !(a_prime >= 0.5 && a_prime <= 2.0)) {
    throw Error("amplitudes must lie in [1/2, 2]");
  }
  ProblemSetup setup = cfg.setup;
  setup.gamma = 0.0;
  const double gc = critical_exponent(setup.dim, setup.nu);
  if (!(gc > 0.0)) throw Error("decoherence needs gamma_c > 0");
  if (!(opt.t_inner > 0.0)) throw Error("evaluation time must be positive");
  const double delta = cfg.deltas.front();
  const auto sp = smalldisp_parameters(setup, delta);
  constexpr int kSegments = 5;
  const double seg = opt.t_inner / kSegments;
  const std::size_t seg_steps = steps_for(seg, cfg.dt);

  ExperimentReport rep;
  rep.name = "decoherence";
  rep.inputs = sweep_inputs(cfg);
  rep.inputs["a"] = a;
  rep.inputs["a_prime"] = a_prime;
  rep.inputs["t_eval"] = opt.t_inner;
  rep.inputs["theta"] = sp.theta;
  rep.inputs["lambda"] = sp.lambda;
  rep.series.columns = {"t", "distance_over_eps", "oracle", "relative_error"};

  const Field phi0 = gaussian_profile(cfg, cfg.grid);
  const double phi0_l2 = l2_norm(phi0);
  const Field ua = rescale_solution(cplx(a) * phi0, sp.lambda, delta, setup.nu);
  const Field ub = rescale_solution(cplx(a_prime) * phi0, sp.lambda, delta, setup.nu);
  const double eps = sp.epsilon_pred;
  const double gap = std::abs(a - a_prime);

  // Zero-dispersion distance by quadrature of the explicit phase.
  auto oracle = [&](double t) {
    const double dphase = setup.mu * (std::pow(a_prime, setup.nu - 1.0) - std::pow(a, setup.nu - 1.0)) * t;
    double sum = 0.0;
    for (const auto& z : phi0.values()) {
      const double m = std::abs(z);
      sum += std::norm(a - a_prime * std::polar(1.0, dphase * std::pow(m, setup.nu - 1.0))) * m * m;
    }
    return std::sqrt(sum * phi0.grid().cell_volume());
  };

  rep.add_check("initial_l2_over_eps", std::max(l2_norm(ua), l2_norm(ub)) / (eps * phi0_l2), -kInf, 2.0);
  const double dist0 = l2_norm(ua - ub) / eps;
  if (gap > 0.0) {
    rep.add_check("initial_distance_over_eps_gap", dist0 / (gap * phi0_l2), -kInf, 1.0 + 1e-9);
  } else {
    rep.add_check("initial_distance", dist0, -kInf, 0.0);
  }

  const auto p1 = equation(setup, 1.0);
  // runs: (a, dt), (a', dt), (a, dt/2), (a', dt/2)
  std::vector<std::vector<double>> dist(2, std::vector<double>(kSegments + 1, 0.0));
  std::vector<std::vector<std::vector<cplx>>> snaps(4, std::vector<std::vector<cplx>>(kSegments + 1));
  std::vector<std::string> failure(4);
  detail::parallel_for(4, cfg.threads, [&](std::size_t r) {
    const bool refined = r >= 2;
    const double dt_inner = refined ? 0.5 * cfg.dt : cfg.dt;
    SplitStepper stepper(ua.grid(), dt_inner * sp.lambda, p1);
    auto u = samples(r % 2 == 0 ? ua : ub);
    snaps[r][0] = u;
    try {
      for (int s = 1; s <= kSegments; ++s) {
        advance(stepper, u, refined ? 2 * seg_steps : seg_steps, s * seg);
        snaps[r][static_cast<std::size_t>(s)] = u;
      }
    } catch (const SolverBlowup& e) {
      failure[r] = e.what();
    }
  });
  for (const auto& f : failure) {
    if (!f.empty()) {
      rep.inconclusive_reason = f;
      rep.finalize();
      rep.runtime_seconds = seconds_since(t0);
      return rep;
    }
  }
  for (int pass = 0; pass < 2; ++pass) {
    for (int s = 0; s <= kSegments; ++s) {
      const Field fa(ua.grid(), snaps[2 * pass][static_cast<std::size_t>(s)], Space::physical);
      const Field fb(ua.grid(), snaps[2 * pass + 1][static_cast<std::size_t>(s)], Space::physical);
      dist[static_cast<std::size_t>(pass)][static_cast<std::size_t>(s)] = l2_norm(fa - fb) / eps;
    }
  }
  double final_err = 0.0;
  for (int s = 0; s <= kSegments; ++s) {
    const double t = s * seg;
    const double o = oracle(t);
    const double dm = dist[0][static_cast<std::size_t>(s)];
    const double rel = o > 0.0 ? std::abs(dm / o - 1.0) : dm;
    rep.series.add_row({t, dm, o, rel});
    if (s == kSegments) final_err = rel;
  }
  const double d_end = dist[0][kSegments];
  if (gap > 0.0) {
    rep.add_check("oracle_relative_error", final_err, -kInf, opt.band);
    rep.add_check("self_convergence", std::abs(d_end - dist[1][kSegments]) / d_end, -kInf, cfg.tolerance,
                  CheckRole::validity);
  } else {
    rep.add_check("equal_amplitude_distance", d_end, -kInf, 0.0);
  }
  rep.headline = {"oracle_relative_error"};
  rep.add_check("triangle_ceiling", d_end / ((a + a_prime) * phi0_l2), -kInf, 1.0);
  rep.add_check("distance_over_eps_gap", gap > 0.0 ? d_end / (gap * phi0_l2) : 0.0, 0.0, kInf,
                CheckRole::info);
  rep.notes.push_back("distances are divided by the predicted size eps = lambda^{gamma_c} delta^{-d/2}");
  rep.finalize();
  rep.runtime_seconds = seconds_since(t0);
  return rep;
}

ExperimentReport negative_gamma_run(const SweepConfig& cfg, double gamma, NegativeGammaOptions opt) {
  const auto t0 = Clock::now();
  const int d = cfg.setup.dim;
  const double half = 0.5 * d;
  if (!(gamma <= -half)) throw Error("negative-gamma run needs gamma <= -d/2");
  if (!(2.0 * opt.moment_order > -gamma - half)) {
    throw Error("moment order m must satisfy 2m > -gamma - d/2");
  }
  ProblemSetup setup = cfg.setup;
  setup.gamma = gamma;
  const double gc = critical_exponent(d, setup.nu);
  const double theta = (half - gamma) / (gc - gamma);

  SweepConfig run = cfg;
  if (run.deltas.empty()) {
    if (opt.log2_s.empty()) opt.log2_s = {4, 5, 6, 7, 8};
    for (double l : opt.log2_s) run.deltas.push_back(std::pow(2.0, l / (1.0 - theta)));
  }
  run.validate(4);
  const bool log_branch = std::abs(gamma + half) <= 1e-12;

  ExperimentReport rep;
  rep.name = "negative-gamma";
  rep.inputs = sweep_inputs(run);
  rep.inputs["gamma"] = gamma;
  rep.inputs["theta"] = theta;
  rep.inputs["moment_order"] = opt.moment_order;
  rep.inputs["branch"] = log_branch ? "sqrt-log" : "power";
  rep.series.columns = {"delta", "lambda", "s", "norm", "predicted", "self_convergence"};

  std::vector<double> s_list;
  for (double delta : run.deltas) s_list.push_back(std::pow(delta, 1.0 - theta));
  const double s_max = *std::max_element(s_list.begin(), s_list.end());
  const double box_ratio = 2.0 * std::numbers::pi * s_max / run.grid.box_length;
  rep.add_check("box_guard", box_ratio, -kInf, opt.box_guard, CheckRole::validity);
  if (box_ratio > opt.box_guard) {
    std::ostringstream msg;
    msg << "box too small: 2 pi s_max / L = " << box_ratio << " exceeds " << opt.box_guard;
    rep.inconclusive_reason = msg.str();
    rep.finalize();
    rep.runtime_seconds = seconds_since(t0);
    return rep;
  }

  const Field phi0 = synthesize(run.grid, MomentGaussianRecipe{opt.moment_order, run.sigma, run.amplitude});
  struct Leg {
    double norm = 0.0;
    double self = 0.0;
    std::optional<Field> state;
    std::string failure;
  };
  std::vector<Leg> legs(run.deltas.size());
  const double T = 1.0;
  detail::parallel_for(run.deltas.size(), run.threads, [&](std::size_t i) {
    const double delta = run.deltas[i];
    try {
      const auto p = equation(setup, delta);
      const auto sp = smalldisp_parameters(setup, delta);
      const Field coarse = evolve_to(phi0, T, run.dt, p);
      legs[i].norm = hk_norm(rescale_solution(coarse, sp.lambda, delta, setup.nu), gamma);
      if (i == 0) {
        // The most dispersive leg carries the largest splitting error.
        const Field fine = evolve_to(phi0, T, 0.5 * run.dt, p);
        const double nf = hk_norm(rescale_solution(fine, sp.lambda, delta, setup.nu), gamma);
        legs[i].self = std::abs(legs[i].norm - nf) / legs[i].norm;
        legs[i].state = coarse;
      }
    } catch (const SolverBlowup& e) {
      legs[i].failure = e.what();
    }
  });
  for (const auto& l : legs) {
    if (!l.failure.empty()) {
      rep.inconclusive_reason = l.failure;
      rep.finalize();
      rep.runtime_seconds = seconds_since(t0);
      return rep;
    }
  }

  // Low-frequency floor of the most dispersive leg against the exact formula.
  const Field spec = forward_transform(*legs[0].state);
  const Field spec0 = forward_transform(zero_dispersion_flow(phi0, T, equation(setup, 0.0)));
  const double hat0 = std::abs(spec[0]);
  const double hat0_exact = std::abs(spec0[0]);
  const auto kn = wavenumber_norms(run.grid);
  constexpr double kFloorRadius = 0.25;
  double floor_min = kInf;
  for (std::size_t i = 0; i < kn.size(); ++i) {
    if (kn[i] <= kFloorRadius) floor_min = std::min(floor_min, std::abs(spec[i]));
  }
  rep.inputs["floor_radius"] = kFloorRadius;
  rep.add_check("floor_value_at_zero", hat0_exact, 1e-3, kInf);
  rep.add_check("floor_zero_mode_vs_exact", std::abs(hat0 / hat0_exact - 1.0), -kInf, 1e-2);
  rep.add_check("floor_min_over_zero_mode", floor_min / hat0, 0.5, kInf);

  std::vector<double> xs, ys, logs, sq;
  double self = 0.0;
  for (std::size_t i = 0; i < legs.size(); ++i) {
    const double delta = run.deltas[i];
    const auto sp = smalldisp_parameters(setup, delta);
    const double s = s_list[i];
    rep.series.add_row({delta, sp.lambda, s, legs[i].norm, sp.epsilon_pred, legs[i].self});
    self = std::max(self, legs[i].self);
    xs.push_back(sp.lambda / delta);
    ys.push_back(legs[i].norm / sp.epsilon_pred);
    logs.push_back(std::log(s));
    sq.push_back(ys.back() * ys.back());
  }
  if (!log_branch) {
    const double expected = gamma + half;
    const LinearFit fit = fit_loglog(xs, ys);
    rep.fits.push_back(make_fit("growth_exponent", "log(lambda/delta)", "log(norm/eps)", fit, expected,
                                expected - opt.slope_band, expected + opt.slope_band));
    rep.add_check("growth_exponent", fit.slope, expected - opt.slope_band, expected + opt.slope_band);
    rep.headline = {"growth_exponent"};
  } else {
    // ||u||^2 ~ |S^{d-1}| |phi^(1)(0)|^2 log s for data with a nonzero zero mode.
    const double sphere = d == 1 ? 2.0 : d == 2 ? 2.0 * std::numbers::pi : 4.0 * std::numbers::pi;
    const LinearFit fit = fit_line(logs, sq);
    const double predicted_b = sphere * hat0 * hat0;
    double mean = 0.0;
    for (double v : sq) mean += v;
    mean /= static_cast<double>(sq.size());
    double resid = 0.0;
    for (std::size_t i = 0; i < sq.size(); ++i) {
      resid = std::max(resid, std::abs(fit.intercept + fit.slope * logs[i] - sq[i]));
    }
    rep.fits.push_back(make_fit("log_growth", "log s", "(norm/eps)^2", fit, predicted_b,
                                predicted_b * (1.0 - opt.log_constant_band),
                                predicted_b * (1.0 + opt.log_constant_band)));
    rep.add_check("log_slope_positive", fit.slope, 0.0, kInf);
    rep.add_check("log_fit_residual", resid / mean, -kInf, opt.log_residual);
    rep.headline = {"log_fit_residual", "log_slope_vs_floor"};
    rep.add_check("log_slope_vs_floor", std::abs(fit.slope / predicted_b - 1.0), -kInf,
                  opt.log_constant_band);
  }
  rep.add_check("self_convergence", self, -kInf, run.tolerance, CheckRole::validity);
  rep.finalize();
  rep.runtime_seconds = seconds_since(t0);
  return rep;
}

SweepConfig default_sweep(const std::string& experiment, double gamma) {
  SweepConfig c;
  c.setup = ProblemSetup{1, 5.0, 1, gamma};
  c.grid = make_grid(1, 2048, 60.0);
  c.dt = 1e-3;
  if (experiment == "small-dispersion" || experiment == "weighted") {
    c.deltas = {1e-1, std::pow(10.0, -1.5), 1e-2, std::pow(10.0, -2.5), 1e-3};
  } else if (experiment == "norm-scaling") {
    c.deltas = {0x1p-4, 0x1p-5, 0x1p-6, 0x1p-7, 0x1p-8};
  } else if (experiment == "inflation") {
    c.deltas = {1e-3};
    c.grid = make_grid(1, 8192, 60.0);
    c.amplitude = 2.0;
  } else if (experiment == "decoherence") {
    c.deltas = {1e-3};
    c.sigma = 3.0;
  } else if (experiment == "negative-gamma") {
    c.grid = make_grid(1, 1 << 18, 16000.0);
    c.dt = 1e-2;
  } else {
    throw Error("no sweep defaults for experiment '" + experiment + "'");
  }
  return c;
}

}  // namespace hwlab
