#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include "fft.hpp"
#include "hwlab/evolution.hpp"
#include "hwlab/experiments.hpp"
#include "hwlab/norms.hpp"
#include "hwlab/probes.hpp"
#include "parallel.hpp"

namespace hwlab {
namespace {

using Clock = std::chrono::steady_clock;
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
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

double h_norm(const Field& f, double s) { return sobolev_norm(f, s, false, Exponent::finite(2.0)); }

/// Norms of v(t_{i+1}) - v(t_i), v(t) = e^{-it Lambda} u(t), in H^s. The
/// increments of v come only from the nonlinear substeps; they are summed
/// directly so that the small differences never arise from cancellation.
std::vector<double> scattering_ladder(const Field& u0, const ScatteringOptions& opt, double dt, double s) {
  const GridSpec& g = u0.grid();
  const std::size_t size = g.size();
  const auto kn = wavenumber_norms(g);
  const double inv_n = 1.0 / static_cast<double>(size);
  std::vector<cplx> prop(size);
  for (std::size_t i = 0; i < size; ++i) prop[i] = std::polar(inv_n, dt * kn[i]);

  Field phys = to_space(u0, Space::physical);
  std::vector<cplx> u(phys.values().begin(), phys.values().end());
  std::vector<cplx> acc(size, 0.0);
  std::vector<cplx> buf(size);
  const double nu = opt.nu;
  const double mu = opt.mu;

  auto nonlinear = [&](double tau, double t, bool record) {
    if (!opt.nonlinear) return;
    for (std::size_t i = 0; i < size; ++i) {
      const double th = mu * tau * std::pow(std::abs(u[i]), nu - 1.0);
      // u (e^{i th} - 1) without cancellation.
      const cplx inc = u[i] * cplx(0.0, 2.0 * std::sin(0.5 * th)) * std::polar(1.0, 0.5 * th);
      u[i] += inc;
      buf[i] = inc;
    }
    if (!record) return;
    detail::fft_inplace(buf, g.dim, g.n, -1);
    for (std::size_t i = 0; i < size; ++i) acc[i] += buf[i] * std::polar(1.0, -t * kn[i]);
  };
  auto linear = [&] {
    detail::fft_inplace(u, g.dim, g.n, -1);
    for (std::size_t i = 0; i < size; ++i) u[i] *= prop[i];
    detail::fft_inplace(u, g.dim, g.n, +1);
  };

  std::vector<std::size_t> marks;
  for (double t : opt.ladder) marks.push_back(steps_for(t, dt));
  std::vector<double> out;
  std::size_t next_mark = 0;
  bool recording = marks.front() == 0;
  if (recording) next_mark = 1;
  nonlinear(0.5 * dt, 0.0, recording);
  for (std::size_t j = 1; j <= marks.back(); ++j) {
    const double t = static_cast<double>(j) * dt;
    linear();
    if (next_mark < marks.size() && j == marks[next_mark]) {
      nonlinear(0.5 * dt, t, recording);
      if (recording) {
        std::vector<cplx> w = acc;
        detail::fft_inplace(w, g.dim, g.n, +1);
        for (auto& z : w) z *= inv_n;
        out.push_back(h_norm(Field(g, std::move(w), Space::physical), s));
        std::fill(acc.begin(), acc.end(), cplx(0.0));
      }
      recording = true;
      ++next_mark;
      if (j < marks.back()) nonlinear(0.5 * dt, t, true);
    } else {
      nonlinear(dt, t, recording);
    }
    for (const auto& z : u) {
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
        throw SolverBlowup("solver blowup in the scattering run", t);
      }
    }
  }
  return out;
}

}  // namespace

ExperimentReport scattering_probe(const ScatteringOptions& opt) {
  const auto t0 = Clock::now();
  opt.grid.validate();
  const int d = opt.grid.dim;
  if (d < 2) throw Error("scattering probe needs d >= 2");
  if ((d == 2 && !(opt.nu > 5.0)) || (d >= 3 && !(opt.nu > 3.0))) {
    throw Error("scattering probe needs nu > 5 (d = 2) or nu > 3 (d >= 3)");
  }
  if (opt.mu != 1 && opt.mu != -1) throw Error("mu must be +1 or -1");
  if (!(opt.eps0 >= 0.0)) throw Error("eps0 must be nonnegative");
  if (!(opt.dt > 0.0)) throw Error("dt must be positive");
  if (opt.ladder.size() < 3) throw Error("time ladder needs at least three times");
  for (std::size_t i = 0; i < opt.ladder.size(); ++i) {
    if (!(opt.ladder[i] > 0.0) || (i > 0 && !(opt.ladder[i] > opt.ladder[i - 1]))) {
      throw Error("time ladder must be positive and increasing");
    }
  }
  const double gc = critical_exponent(d, opt.nu);

  ExperimentReport rep;
  rep.name = "scattering";
  rep.inputs["d"] = d;
  rep.inputs["n"] = opt.grid.n;
  rep.inputs["L"] = opt.grid.box_length;
  rep.inputs["nu"] = opt.nu;
  rep.inputs["mu"] = opt.mu;
  rep.inputs["eps0"] = opt.eps0;
  rep.inputs["sigma"] = opt.sigma;
  rep.inputs["ladder"] = opt.ladder;
  rep.inputs["dt"] = opt.dt;
  rep.inputs["nonlinear"] = opt.nonlinear;
  rep.inputs["gamma_c"] = gc;
  rep.series.columns = {"t", "t_next", "difference", "decay_ratio", "difference_half_dt"};

  Field u0 = synthesize(opt.grid, GaussianRecipe{opt.sigma, 1.0, {}});
  const double scale = opt.eps0 / sobolev_norm(u0, gc, true, Exponent::finite(2.0));
  u0 = cplx(scale) * u0;

  std::vector<std::vector<double>> diffs(2);
  detail::parallel_for(2, 2, [&](std::size_t r) {
    diffs[r] = scattering_ladder(u0, opt, r == 0 ? opt.dt : 0.5 * opt.dt, gc);
  });
  const auto& D = diffs[0];
  double max_d = 0.0;
  double min_ratio = kInf;
  double self = 0.0;
  bool monotone = true;
  for (std::size_t i = 0; i < D.size(); ++i) {
    const double ratio = i + 1 < D.size() && D[i + 1] > 0.0 ? D[i] / D[i + 1] : kNaN;
    rep.series.add_row({opt.ladder[i], opt.ladder[i + 1], D[i], ratio, diffs[1][i]});
    max_d = std::max(max_d, D[i]);
    if (i + 1 < D.size()) {
      if (D[i + 1] > D[i]) monotone = false;
      if (D[i + 1] > 0.0) min_ratio = std::min(min_ratio, ratio);
    }
    if (D[i] > 0.0) self = std::max(self, std::abs(D[i] - diffs[1][i]) / D[i]);
  }
  if (max_d == 0.0) {
    rep.add_check("max_difference", max_d, -kInf, 0.0);
    rep.notes.push_back("differences vanish identically (linear flow or zero data)");
  } else {
    if (!monotone) {
      rep.inconclusive_reason =
          "difference ladder is not monotone; the periodic box weakens dispersion at late times";
    }
    rep.add_check("min_decay_ratio", min_ratio, opt.min_decay, kInf);
    rep.headline = {"min_decay_ratio"};
    rep.add_check("self_convergence", self, -kInf, 0.1, CheckRole::validity);
  }
  rep.notes.push_back(
      "the d = 2 space-time norm with a truncated index is read as the B^{gamma_c - gamma_{4,inf}}_inf "
      "norm; it is not computed here");
  rep.notes.push_back("periodic box: the dispersive decay of the whole space is only approximate");
  rep.finalize();
  rep.runtime_seconds = seconds_since(t0);
  return rep;
}

double strichartz_ratio(const Field& u0, const StrichartzOptions& opt) {
  const int d = u0.grid().dim;
  const double gpq = gamma_pq(d, opt.p, opt.q);
  const double denom = h_norm(u0, opt.gamma);
  if (!(denom > 0.0)) throw Error("Strichartz ratio needs nonzero data");
  if (opt.nodes < 2) throw Error("Strichartz ratio needs at least two time nodes");
  const double dt = opt.T / (opt.nodes - 1);
  const double s = opt.gamma - gpq;
  double acc = 0.0;
  double mx = 0.0;
  for (int i = 0; i < opt.nodes; ++i) {
    const Field ut = propagate_linear(u0, i * dt, 1.0);
    const Field ws = apply_symbol(to_space(ut, Space::spectral), SymbolSpec::inhomogeneous(s));
    const double v = lq_norm(ws, opt.q);
    mx = std::max(mx, v);
    if (!opt.p.is_infinite()) {
      const double w = (i == 0 || i == opt.nodes - 1) ? 0.5 : 1.0;
      acc += w * std::pow(v, opt.p.value()) * dt;
    }
  }
  const double lhs = opt.p.is_infinite() ? mx : std::pow(acc, 1.0 / opt.p.value());
  return lhs / denom;
}

ExperimentReport strichartz_probe(const StrichartzOptions& opt) {
  const auto t0 = Clock::now();
  opt.grid.validate();
  const int d = opt.grid.dim;
  if (d < 2) throw Error("Strichartz probe needs d >= 2");
  if (opt.q.is_infinite()) throw Error("Strichartz probe excludes q = inf");
  const auto adm = is_admissible(d, opt.p, opt.q);
  if (!adm.admissible) throw Error("inadmissible pair (" + opt.p.str() + ", " + opt.q.str() + "): " + adm.reason);
  if (!(opt.T > 0.0)) throw Error("probe window T must be positive");
  if (opt.samples < 4) throw Error("Strichartz probe needs at least four samples");
  const double gpq = gamma_pq(d, opt.p, opt.q);

  ExperimentReport rep;
  rep.name = "strichartz";
  rep.inputs["d"] = d;
  rep.inputs["n"] = opt.grid.n;
  rep.inputs["L"] = opt.grid.box_length;
  rep.inputs["p"] = opt.p.str();
  rep.inputs["q"] = opt.q.str();
  rep.inputs["gamma"] = opt.gamma;
  rep.inputs["gamma_pq"] = gpq;
  rep.inputs["T"] = opt.T;
  rep.inputs["nodes"] = opt.nodes;
  rep.inputs["samples"] = opt.samples;
  rep.inputs["seed"] = opt.seed;
  rep.series.columns = {"seed", "lhs", "rhs", "ratio"};

  const auto suite = run_probe_suite(
      [&](std::uint64_t seed) {
        const Field u0 = random_band_limited(opt.grid, seed);
        ProbeRecord r;
        r.probe = "strichartz";
        r.gamma = opt.gamma;
        r.exponents = {{"p", opt.p}, {"q", opt.q}};
        r.rhs = h_norm(u0, opt.gamma);
        r.ratio = strichartz_ratio(u0, opt);
        r.lhs = r.ratio * r.rhs;
        return r;
      },
      opt.samples, opt.seed, opt.threads);
  for (const auto& r : suite.records) {
    rep.series.add_row({static_cast<double>(r.seed), r.lhs, r.rhs, r.ratio});
  }
  rep.add_check("all_ratios_finite", suite.finite ? 1.0 : 0.0, 1.0, 1.0);
  rep.add_check("max_ratio_movement", suite.movement, -kInf, opt.stability_band);
  rep.headline = {"max_ratio_movement"};
  rep.add_check("max_ratio_first_half", suite.max_first_half, 0.0, kInf, CheckRole::info);
  rep.add_check("max_ratio_all", suite.max_all, 0.0, kInf, CheckRole::info);
  if (!adm.sharp) rep.notes.push_back("pair is admissible but not sharp");
  rep.finalize();
  rep.runtime_seconds = seconds_since(t0);
  return rep;
}

ExperimentReport continuous_dependence_probe(const DependenceOptions& opt) {
  const auto t0 = Clock::now();
  opt.grid.validate();
  const int d = opt.grid.dim;
  const ProblemSetup setup{d, opt.nu, opt.mu, opt.gamma};
  setup.validate();
  const auto sub = subcritical_check(setup);
  if (!sub.holds) throw Error("continuous dependence probe needs a subcritical setup: " + sub.reason);
  if (opt.etas.size() < 2) throw Error("need at least two perturbation sizes");
  for (double e : opt.etas) {
    if (!(e >= 0.0) || !std::isfinite(e)) throw Error("perturbation sizes must be nonnegative");
  }
  if (!(opt.eps > 0.0) || opt.eps > opt.gamma) throw Error("eps must lie in (0, gamma]");
  const std::size_t steps = steps_for(opt.T, opt.dt);

  ExperimentReport rep;
  rep.name = "dependence";
  rep.inputs["d"] = d;
  rep.inputs["n"] = opt.grid.n;
  rep.inputs["L"] = opt.grid.box_length;
  rep.inputs["nu"] = opt.nu;
  rep.inputs["mu"] = opt.mu;
  rep.inputs["gamma"] = opt.gamma;
  rep.inputs["T"] = opt.T;
  rep.inputs["dt"] = opt.dt;
  rep.inputs["eta_list"] = opt.etas;
  rep.inputs["eps"] = opt.eps;
  rep.inputs["sigma"] = opt.sigma;
  rep.inputs["nonlinear"] = opt.nonlinear;
  rep.series.columns = {"eta", "sup_l2_difference", "K", "weak_difference_at_T"};

  const Field u0 = synthesize(opt.grid, GaussianRecipe{opt.sigma, 1.0, {}});
  Field w = synthesize(opt.grid, GaussianRecipe{opt.sigma, 1.0, {1.0, 0.0, 0.0}});
  w = cplx(1.0 / h_norm(w, opt.gamma)) * w;
  const double w_l2 = l2_norm(w);
  rep.inputs["w_l2"] = w_l2;

  EquationParams params;
  params.nu = opt.nu;
  params.mu = opt.mu;
  params.delta = 1.0;
  params.nonlinear = opt.nonlinear;

  struct Leg {
    double sup = 0.0;
    double weak = 0.0;
  };
  // Legs 0..m-1 at dt, leg m repeats the largest eta at dt / 2.
  const std::size_t m = opt.etas.size();
  const std::size_t largest =
      static_cast<std::size_t>(std::max_element(opt.etas.begin(), opt.etas.end()) - opt.etas.begin());
  std::vector<Leg> legs(m + 1);
  detail::parallel_for(m + 1, opt.threads, [&](std::size_t i) {
    const bool refined = i == m;
    const double eta = opt.etas[refined ? largest : i];
    const double dt = refined ? 0.5 * opt.dt : opt.dt;
    SplitStepper stepper(opt.grid, dt, params);
    const Field v0 = u0 + cplx(eta) * w;
    std::vector<cplx> a(u0.values().begin(), u0.values().end());
    std::vector<cplx> b(v0.values().begin(), v0.values().end());
    const double cell = opt.grid.cell_volume();
    auto dist = [&] {
      double s = 0.0;
      for (std::size_t k = 0; k < a.size(); ++k) s += std::norm(a[k] - b[k]);
      return std::sqrt(s * cell);
    };
    double sup = dist();
    const std::size_t total = refined ? 2 * steps : steps;
    for (std::size_t k = 0; k < total; ++k) {
      stepper.step(a);
      stepper.step(b);
      sup = std::max(sup, dist());
    }
    if (!std::isfinite(sup)) throw SolverBlowup("solver blowup in the dependence probe", opt.T);
    legs[i].sup = sup;
    const Field diff = Field(opt.grid, b, Space::physical) - Field(opt.grid, a, Space::physical);
    legs[i].weak = h_norm(diff, opt.gamma - opt.eps);
  });

  std::vector<double> pos_eta, pos_k, pos_weak;
  for (std::size_t i = 0; i < m; ++i) {
    const double eta = opt.etas[i];
    const double K = eta > 0.0 ? legs[i].sup / eta : kNaN;
    rep.series.add_row({eta, legs[i].sup, K, legs[i].weak});
    if (eta == 0.0) {
      rep.add_check("zero_perturbation_difference", legs[i].sup, -kInf, 0.0);
    } else {
      pos_eta.push_back(eta);
      pos_k.push_back(K);
      pos_weak.push_back(legs[i].weak);
    }
  }
  if (pos_eta.size() < 2) throw Error("need at least two positive perturbation sizes");
  const double k_ref = pos_k.front();
  for (std::size_t i = 1; i < pos_k.size(); ++i) {
    std::ostringstream name;
    name << "K_ratio_eta_" << pos_eta[i];
    rep.add_check(name.str(), pos_k[i] / k_ref, 1.0 - opt.ratio_band, 1.0 + opt.ratio_band);
  }
  const LinearFit fit = fit_loglog(pos_eta, pos_weak);
  rep.fits.push_back(FitRecord{"weak_difference", "log eta", "log ||difference(T)||_{H^{gamma-eps}}", fit,
                               1.0, 0.9, 1.1});
  rep.add_check("weak_difference_slope", fit.slope, 0.9, 1.1);
  rep.headline = {"weak_difference_slope"};
  for (const auto& c : rep.checks) {
    if (c.name.rfind("K_ratio", 0) == 0) rep.headline.push_back(c.name);
  }
  const double k_largest = legs[largest].sup / opt.etas[largest];
  const double k_fine = legs[m].sup / opt.etas[largest];
  rep.add_check("self_convergence", std::abs(k_largest - k_fine) / k_largest, -kInf, 0.1, CheckRole::validity);
  rep.add_check("K_over_w_l2", k_ref / w_l2, 0.0, kInf, CheckRole::info);
  rep.finalize();
  rep.runtime_seconds = seconds_since(t0);
  return rep;
}

}  // namespace hwlab
