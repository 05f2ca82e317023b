#pragma once

// Scripted reproductions of the small-dispersion construction, the
// ill-posedness mechanisms and the probe-level estimates. Every run returns an
// ExperimentReport with the measured series, least-squares fits and a list of
// checks; the verdict is derived from the checks.

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include <json.hpp>

#include "hwlab/exponents.hpp"
#include "hwlab/fit.hpp"
#include "hwlab/grid.hpp"

namespace hwlab {

enum class Verdict { pass, fail, inconclusive };
std::string to_string(Verdict v);

/// gate: a failure fails the run. validity: a failure makes the run
/// inconclusive (e.g. a solver that is not self-convergent). info: reported only.
enum class CheckRole { gate, validity, info };
std::string to_string(CheckRole r);

struct Check {
  std::string name;
  double value = 0.0;
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();
  CheckRole role = CheckRole::gate;
  bool passed = false;
  /// Signed distance to the nearest bound, positive when inside.
  double margin = 0.0;
};

Check make_check(std::string name, double value, double lower, double upper,
                 CheckRole role = CheckRole::gate);

struct Series {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  void add_row(std::vector<double> row);
};

struct FitRecord {
  std::string name;
  std::string abscissa;
  std::string ordinate;
  LinearFit fit;
  double expected = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

struct ExperimentReport {
  std::string name;
  nlohmann::ordered_json inputs = nlohmann::ordered_json::object();
  Series series;
  std::vector<FitRecord> fits;
  std::vector<Check> checks;
  std::vector<std::string> notes;
  /// Set when the run could not reach a decision (blowup, box guard, ...).
  std::string inconclusive_reason;
  Verdict verdict = Verdict::inconclusive;
  /// Checks whose margins define the verdict margin; empty means every gate.
  std::vector<std::string> headline;
  /// Smallest margin over the headline (or gate) checks.
  double margin = 0.0;
  /// Wall-clock seconds; kept out of report.json.
  double runtime_seconds = 0.0;

  Check& add_check(std::string name, double value, double lower, double upper,
                   CheckRole role = CheckRole::gate);
  /// Derives verdict and margin from the checks.
  void finalize();
  const Check* find_check(const std::string& name) const;
};

nlohmann::ordered_json to_json(const ExperimentReport& r);

struct SweepConfig {
  ProblemSetup setup{1, 5.0, 1, 0.0};
  /// Strictly decreasing in (0, 1); a trailing 0 adds the sanity leg.
  std::vector<double> deltas;
  GridSpec grid{1, 2048, 60.0};
  double dt = 1e-3;
  /// Self-convergence discrepancy allowed relative to the fitted signal.
  double tolerance = 0.1;
  double fit_min = 0.0;
  double fit_max = std::numeric_limits<double>::infinity();
  /// Gaussian phi0.
  double sigma = 1.0;
  double amplitude = 1.0;
  int threads = 1;

  void validate(std::size_t min_points = 4) const;
};

/// E(delta) = ||phi^(delta)(t) - phi^(0)(t)||_{H^k} against delta.
ExperimentReport small_dispersion_sweep(const SweepConfig& cfg, double t_eval, int k);

/// As small_dispersion_sweep in the weighted H^{k,k} norm. The evolved states
/// are only asked to decay to `decay_guard` at the box faces.
ExperimentReport weighted_small_dispersion_check(const SweepConfig& cfg, double t_eval, int k,
                                                 double decay_guard = 1e-2);

struct NormScalingOptions {
  /// Order of the moment gaussian; 0 picks a plain gaussian when gamma > -d/2
  /// and the smallest sufficient order otherwise.
  int moment_order = 0;
  /// Grid refinement for the resolution check.
  int refine = 2;
  double flatness_band = 2.0;
};

/// ||u^(delta,lambda)(0)||_{H^gamma} / (lambda^{gamma_c - gamma} delta^{gamma - d/2})
/// over lambda = delta^theta.
ExperimentReport initial_norm_scaling(const SweepConfig& cfg, double gamma, NormScalingOptions opt = {});

struct InflationOptions {
  /// Leg (a): zero-dispersion flow at these times on an n_fine grid.
  std::vector<double> t_list;
  int n_fine = 1 << 17;
  /// Leg (b): inner times; empty means a^{-(nu-1)} times a geometric ladder on [5, 50].
  std::vector<double> t_inner;
  double relative_band = 0.2;
  double slope_band = 0.02;
};

/// Norm growth t^gamma of the zero-dispersion flow and of the rescaled
/// family. cfg.deltas[0] is the dispersion of leg (b).
ExperimentReport norm_inflation_run(const SweepConfig& cfg, double gamma, InflationOptions opt = {});

struct DecoherenceOptions {
  double t_inner = 25.0;
  double band = 0.05;
};

/// L2 distance between the rescaled solutions with amplitudes a and a'.
/// cfg.deltas[0] is the dispersion.
ExperimentReport decoherence_run(const SweepConfig& cfg, double a, double a_prime,
                                 DecoherenceOptions opt = {});

struct NegativeGammaOptions {
  /// log2 of the dilation ratios s = delta / lambda.
  std::vector<double> log2_s;
  int moment_order = 1;
  double slope_band = 0.1;
  /// Largest admissible 2 pi s_max / L.
  double box_guard = 0.25;
  double log_residual = 0.05;
  double log_constant_band = 0.15;
};

/// Low-frequency floor of phi^(delta)(1) and the growth of ||u(lambda)||_{H^gamma}
/// in lambda / delta (power law, or sqrt(log) at gamma = -d/2).
ExperimentReport negative_gamma_run(const SweepConfig& cfg, double gamma, NegativeGammaOptions opt = {});

struct ScatteringOptions {
  GridSpec grid{2, 256, 80.0};
  double nu = 7.0;
  int mu = 1;
  double eps0 = 1e-2;
  double sigma = 1.0;
  std::vector<double> ladder{1, 2, 4, 8, 16};
  double dt = 0.01;
  double min_decay = 1.5;
  bool nonlinear = true;
};

/// Cauchy trend of v(t) = e^{-it Lambda} u(t) in H^{gamma_c} on a doubling ladder.
ExperimentReport scattering_probe(const ScatteringOptions& opt);

struct StrichartzOptions {
  GridSpec grid{2, 64, 20.0};
  Exponent p = Exponent::finite(6.0);
  Exponent q = Exponent::finite(6.0);
  double gamma = 1.0;
  double T = 2.0;
  int nodes = 33;
  int samples = 50;
  std::uint64_t seed = 0;
  int threads = 1;
  double stability_band = 0.1;
};

/// ||e^{it Lambda} u0||_{L^p([0,T], H^{gamma - gamma_pq}_q)} / ||u0||_{H^gamma}.
double strichartz_ratio(const Field& u0, const StrichartzOptions& opt);

/// Random band-limited data; max ratio over all samples against the first half.
ExperimentReport strichartz_probe(const StrichartzOptions& opt);

struct DependenceOptions {
  GridSpec grid{2, 128, 30.0};
  double nu = 3.0;
  int mu = 1;
  double gamma = 1.0;
  double T = 0.5;
  double dt = 1e-3;
  std::vector<double> etas{1e-2, 1e-3, 1e-4};
  double eps = 0.5;
  double sigma = 1.5;
  bool nonlinear = true;
  int threads = 1;
  double ratio_band = 0.2;
};

/// sup_t ||u_eta(t) - u(t)||_{L2} / eta across perturbation sizes.
ExperimentReport continuous_dependence_probe(const DependenceOptions& opt);

/// Desk-scale defaults of the sweep-based experiments ("small-dispersion",
/// "weighted", "norm-scaling", "inflation", "decoherence", "negative-gamma").
SweepConfig default_sweep(const std::string& experiment, double gamma = 0.0);

}  // namespace hwlab
