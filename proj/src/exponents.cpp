#include "hwlab/exponents.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <vector>

#include "hwlab/grid.hpp"

namespace hwlab {
namespace {

constexpr double kTie = 1e-12;

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

int positive_ceiling(double x) { return std::max(1, static_cast<int>(std::ceil(x))); }

}  // namespace

Exponent Exponent::finite(double value) {
  if (!(value >= 1.0) || !std::isfinite(value)) {
    throw Error("Lebesgue exponent must be a finite number >= 1 (use infinity() for inf)");
  }
  return Exponent(value, false);
}

double Exponent::value() const {
  if (infinite_) throw Error("exponent is infinite");
  return value_;
}

std::string Exponent::str() const { return infinite_ ? "inf" : fmt(value_); }

Exponent parse_exponent(const std::string& text) {
  if (text == "inf" || text == "infinity" || text == "Inf") return Exponent::infinity();
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw Error("cannot parse exponent '" + text + "'");
  }
  if (used != text.size()) throw Error("cannot parse exponent '" + text + "'");
  return Exponent::finite(v);
}

void ProblemSetup::validate() const {
  if (dim < 1) throw Error("dimension must be >= 1");
  if (!(nu > 1.0)) throw Error("nonlinearity power nu must be > 1");
  if (mu != 1 && mu != -1) throw Error("mu must be +1 or -1");
  if (!std::isfinite(gamma)) throw Error("gamma must be finite");
}

bool is_odd_integer(double nu) {
  return nu == std::round(nu) && static_cast<long long>(std::round(nu)) % 2 != 0;
}

double critical_exponent(int dim, double nu) {
  if (!(nu > 1.0)) throw Error("critical_exponent: nu must be > 1");
  return 0.5 * dim - 1.0 / (nu - 1.0);
}

double gamma_pq(int dim, Exponent p, Exponent q) {
  return 0.5 * dim - dim * q.reciprocal() - p.reciprocal();
}

Admissibility is_admissible(int dim, Exponent p, Exponent q) {
  if (dim < 2) throw Error("admissibility is only defined for d >= 2");
  Admissibility out;
  const bool p_ok = p.is_infinite() || p.value() >= 2.0;
  const bool q_ok = q.is_infinite() || q.value() >= 2.0;
  if (!p_ok || !q_ok) {
    out.reason = "(p,q) must lie in [2,inf]^2";
    return out;
  }
  if (dim == 3 && !p.is_infinite() && p.value() == 2.0 && q.is_infinite()) {
    out.reason = "(p,q,d) = (2,inf,3) is excluded";
    return out;
  }
  const double lhs = 2.0 * p.reciprocal() + (dim - 1) * q.reciprocal();
  const double rhs = 0.5 * (dim - 1);
  if (lhs > rhs + kTie) {
    out.reason = "2/p + (d-1)/q = " + fmt(lhs) + " exceeds (d-1)/2 = " + fmt(rhs);
    return out;
  }
  out.admissible = true;
  out.sharp = std::abs(lhs - rhs) <= kTie;
  out.reason = out.sharp ? "admissible (sharp: 2/p + (d-1)/q = (d-1)/2)" : "admissible";
  return out;
}

SubcriticalVerdict subcritical_check(const ProblemSetup& setup) {
  setup.validate();
  if (setup.dim < 2) throw Error("subcritical_check requires d >= 2");
  SubcriticalVerdict out;
  out.threshold = setup.dim == 2 ? 1.0 - 1.0 / std::max(setup.nu - 1.0, 4.0)
                                 : 0.5 * setup.dim - 1.0 / std::max(setup.nu - 1.0, 2.0);
  out.at_threshold = std::abs(setup.gamma - out.threshold) <= kTie;
  const bool above = setup.gamma > out.threshold && !out.at_threshold;
  if (!is_odd_integer(setup.nu)) {
    out.smoothness_ok = positive_ceiling(setup.gamma) <= setup.nu;
  }
  out.holds = above && out.smoothness_ok;
  std::ostringstream why;
  if (out.at_threshold) {
    why << "gamma equals the threshold " << fmt(out.threshold) << " (strict inequality fails)";
  } else if (!above) {
    why << "gamma = " << fmt(setup.gamma) << " <= threshold " << fmt(out.threshold);
  } else {
    why << "gamma = " << fmt(setup.gamma) << " > threshold " << fmt(out.threshold);
  }
  if (!out.smoothness_ok) {
    why << "; smoothness fails: ceil(gamma) = " << positive_ceiling(setup.gamma)
        << " > nu = " << fmt(setup.nu);
  }
  out.reason = why.str();
  return out;
}

IllposedVerdict illposed_range_check(const ProblemSetup& setup) {
  setup.validate();
  IllposedVerdict out;
  const double gc = critical_exponent(setup.dim, setup.nu);
  const double g = setup.gamma;
  const double half = 0.5 * setup.dim;
  std::ostringstream why;
  if (gc > 0.0) {
    const bool low = g <= -half;
    const bool band = g >= 0.0 && g < gc;
    out.in_range = low || band;
    out.zero_boundary = g == 0.0;
    if (low) {
      why << "gamma <= -d/2";
    } else if (out.zero_boundary) {
      why << "boundary: covered by the decoherence case, not norm inflation";
    } else if (band) {
      why << "0 < gamma < gamma_c = " << fmt(gc);
    } else {
      why << "gamma outside (-inf,-d/2] u [0," << fmt(gc) << ")";
    }
  } else {
    out.in_range = g <= -half && g < gc;
    why << (out.in_range ? "gamma <= -d/2 and gamma < gamma_c"
                         : "gamma outside (-inf,-d/2] n (-inf,gamma_c)");
  }
  out.reason = why.str();
  return out;
}

SmallDispersionParameters smalldisp_parameters(const ProblemSetup& setup, double delta) {
  setup.validate();
  const double gc = critical_exponent(setup.dim, setup.nu);
  if (setup.gamma >= gc) throw Error("small-dispersion scaling needs gamma < gamma_c");
  if (!(delta > 0.0) || delta > 1.0) throw Error("dispersion delta must lie in (0, 1]");
  SmallDispersionParameters out;
  const double half = 0.5 * setup.dim;
  out.theta = (half - setup.gamma) / (gc - setup.gamma);
  out.lambda = std::pow(delta, out.theta);
  out.epsilon_pred = std::pow(out.lambda, gc - setup.gamma) * std::pow(delta, setup.gamma - half);
  if (!(out.theta > 1.0)) throw Error("internal: theta <= 1");
  if (!(out.lambda > 0.0) || out.lambda > delta) {
    throw Error("lambda = delta^theta underflowed or exceeds delta");
  }
  return out;
}

std::string exponent_table(int dim, double nu) {
  std::ostringstream out;
  const double gc = critical_exponent(dim, nu);
  out << "d = " << dim << ", nu = " << fmt(nu) << (is_odd_integer(nu) ? " (odd integer)" : "")
      << "\n";
  out << "gamma_c = " << fmt(gc) << "\n";
  if (dim >= 2) {
    ProblemSetup s{dim, nu, 1, 0.0};
    auto v = subcritical_check(s);
    out << "well-posedness threshold: gamma > " << fmt(v.threshold) << "\n";
    out << "admissible pairs (p, q, gamma_pq, sharp):\n";
    const std::vector<Exponent> qs = {Exponent::finite(2), Exponent::finite(4), Exponent::finite(6),
                                      Exponent::finite(8), Exponent::infinity()};
    const std::vector<Exponent> ps = {Exponent::finite(2), Exponent::finite(4), Exponent::finite(6),
                                      Exponent::finite(8), Exponent::infinity()};
    for (const auto& p : ps) {
      for (const auto& q : qs) {
        auto a = is_admissible(dim, p, q);
        if (!a.admissible) continue;
        out << "  (" << p.str() << ", " << q.str() << ")  " << fmt(gamma_pq(dim, p, q))
            << (a.sharp ? "  sharp" : "") << "\n";
      }
    }
  } else {
    out << "well-posedness threshold: not covered for d = 1\n";
  }
  out << "ill-posedness range: ";
  if (gc > 0.0) {
    out << "(-inf, " << fmt(-0.5 * dim) << "] u [0, " << fmt(gc) << ")\n";
  } else {
    out << "(-inf, " << fmt(std::min(-0.5 * dim, gc)) << (gc <= -0.5 * dim ? ")" : "]") << "\n";
  }
  return out.str();
}

}  // namespace hwlab
