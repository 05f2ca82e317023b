#pragma once

// Scalar exponent bookkeeping for the power-type half-wave equation
//   i u_t + Lambda u = -mu |u|^{nu-1} u   on R^d.

#include <string>

namespace hwlab {

/// Lebesgue exponent in [1, inf]. Infinity is a tag, never a float sentinel.
class Exponent {
 public:
  static Exponent finite(double value);
  static Exponent infinity() { return Exponent(0.0, true); }

  bool is_infinite() const { return infinite_; }
  /// Throws for the infinite exponent.
  double value() const;
  /// 1/p, exactly 0 for p = inf.
  double reciprocal() const { return infinite_ ? 0.0 : 1.0 / value_; }
  std::string str() const;

 private:
  Exponent(double v, bool inf) : value_(v), infinite_(inf) {}
  double value_;
  bool infinite_;
};

/// Parses "inf"/"infinity" or a number >= 1.
Exponent parse_exponent(const std::string& text);

struct ProblemSetup {
  int dim = 1;
  double nu = 3.0;
  int mu = 1;
  double gamma = 0.0;

  void validate() const;
};

bool is_odd_integer(double nu);

/// gamma_c = d/2 - 1/(nu - 1).
double critical_exponent(int dim, double nu);

/// gamma_{p,q} = d/2 - d/q - 1/p.
double gamma_pq(int dim, Exponent p, Exponent q);

struct Admissibility {
  bool admissible = false;
  /// 2/p + (d-1)/q == (d-1)/2.
  bool sharp = false;
  std::string reason;
};

/// Requires d >= 2.
Admissibility is_admissible(int dim, Exponent p, Exponent q);

struct SubcriticalVerdict {
  bool holds = false;
  double threshold = 0.0;
  /// gamma == threshold: fails because the inequality is strict.
  bool at_threshold = false;
  bool smoothness_ok = true;
  std::string reason;
};

/// Well-posedness range gamma > 1 - 1/max(nu-1, 4) (d = 2),
/// gamma > d/2 - 1/max(nu-1, 2) (d >= 3), plus ceil(gamma) <= nu for
/// non-odd nu. Requires d >= 2.
SubcriticalVerdict subcritical_check(const ProblemSetup& setup);

struct IllposedVerdict {
  bool in_range = false;
  /// gamma == 0 < gamma_c: included, but handled by decoherence.
  bool zero_boundary = false;
  std::string reason;
};

IllposedVerdict illposed_range_check(const ProblemSetup& setup);

struct SmallDispersionParameters {
  double theta = 0.0;
  double lambda = 0.0;
  double epsilon_pred = 0.0;
};

/// theta = (d/2 - gamma)/(gamma_c - gamma), lambda = delta^theta and the
/// predicted initial size lambda^{gamma_c - gamma} delta^{gamma - d/2}.
SmallDispersionParameters smalldisp_parameters(const ProblemSetup& setup, double delta);

/// Human-readable summary for the `exponents` subcommand.
std::string exponent_table(int dim, double nu);

}  // namespace hwlab
