#include "hwlab/norms.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace hwlab {
namespace {

double smooth_step(double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; }

void require_q_at_least_two(Exponent q) {
  if (!q.is_infinite() && q.value() < 2.0) {
    throw Error("Lebesgue exponent q = " + q.str() + " < 2 is not supported");
  }
}

// Spectrum multiplied by a radial weight w(|xi|), zero mode handled by w0.
Field radial_multiply(const Field& spec, double (*w)(double, double), double param, double w0) {
  Field out = spec;
  const GridSpec& g = spec.grid();
  const auto kn = wavenumber_norms(g);
  out[0] *= w0;
  for (std::size_t i = 1; i < out.size(); ++i) out[i] *= w(kn[i], param);
  return out;
}

double block_weight(double k, double scale) { return annulus_bump(k * scale); }
double zero_weight(double k, double) { return bump_profile(k); }

double block_l2(const Field& spec, const std::vector<double>& kn, double scale) {
  double sum = 0.0;
  for (std::size_t i = 1; i < spec.size(); ++i) {
    const double w = annulus_bump(kn[i] * scale);
    if (w != 0.0) sum += w * w * std::norm(spec[i]);
  }
  return std::sqrt(sum * spec.grid().spectral_cell_volume());
}

void check_zero_mode(const Field& spec, double gamma, bool homogeneous) {
  if (!homogeneous || gamma >= 0.0) return;
  const double mean_part = std::abs(spec[0]) * std::sqrt(spec.grid().spectral_cell_volume());
  if (mean_part > 1e-12 * std::max(l2_norm(spec), 1e-300)) {
    throw Error("zero-mode undefined: homogeneous norm with gamma < 0 of a field with nonzero mean");
  }
}

}  // namespace

double bump_profile(double r) {
  if (r <= 1.0) return 1.0;
  if (r >= 2.0) return 0.0;
  const double a = smooth_step(2.0 - r);
  const double b = smooth_step(r - 1.0);
  return a / (a + b);
}

double annulus_bump(double r) { return bump_profile(r) - bump_profile(2.0 * r); }

DyadicRange dyadic_range(const GridSpec& g) {
  DyadicRange r;
  r.j_min = static_cast<int>(std::floor(std::log2(g.frequency_step())));
  r.j_max = static_cast<int>(std::ceil(std::log2(g.max_frequency())));
  return r;
}

Field lp_project(const Field& f, int j) {
  const auto range = dyadic_range(f.grid());
  if (j < range.j_min || j > range.j_max) {
    std::ostringstream msg;
    msg << "dyadic block j = " << j << " outside the resolvable range [" << range.j_min << ", "
        << range.j_max << "]";
    throw Error(msg.str());
  }
  Field spec = radial_multiply(to_space(f, Space::spectral), block_weight, std::ldexp(1.0, -j), 0.0);
  return to_space(spec, f.space());
}

Field lp_project(const Field& f, ZeroBlock) {
  Field spec = radial_multiply(to_space(f, Space::spectral), zero_weight, 0.0, 1.0);
  return to_space(spec, f.space());
}

int padding_factor(double nu) {
  if (nu != std::round(nu)) return 2;
  const int need = static_cast<int>(std::ceil((nu + 1.0) / 2.0));
  int p = 1;
  while (p < need) p *= 2;
  return p;
}

double lq_norm(const Field& f, Exponent q) {
  if (q.is_infinite()) {
    Field fine = upsample(f, 2);
    double m = 0.0;
    for (const auto& z : fine.values()) m = std::max(m, std::abs(z));
    return m;
  }
  const double p = q.value();
  Field phys = to_space(f, Space::physical);
  if (p == 2.0) return l2_norm(phys);
  double sum = 0.0;
  for (const auto& z : phys.values()) sum += std::pow(std::abs(z), p);
  return std::pow(sum * phys.grid().cell_volume(), 1.0 / p);
}

double sobolev_norm(const Field& f, double gamma, bool homogeneous, Exponent q) {
  require_q_at_least_two(q);
  Field spec = to_space(f, Space::spectral);
  check_zero_mode(spec, gamma, homogeneous);
  const SymbolSpec symbol =
      homogeneous ? SymbolSpec::homogeneous(gamma) : SymbolSpec::inhomogeneous(gamma);
  if (!q.is_infinite() && q.value() == 2.0) {
    const auto kn = wavenumber_norms(spec.grid());
    double sum = 0.0;
    const bool drop_zero = homogeneous && gamma != 0.0;
    for (std::size_t i = 0; i < spec.size(); ++i) {
      if (i == 0 && drop_zero) continue;
      const double w = i == 0 && !homogeneous ? 1.0 : std::abs(symbol.at(kn[i]));
      sum += w * w * std::norm(spec[i]);
    }
    return std::sqrt(sum * spec.grid().spectral_cell_volume());
  }
  return lq_norm(apply_symbol(spec, symbol, ZeroMode::suppress), q);
}

double besov_norm(const Field& f, double gamma, bool homogeneous, Exponent q) {
  require_q_at_least_two(q);
  Field spec = to_space(f, Space::spectral);
  check_zero_mode(spec, gamma, homogeneous);
  const auto range = dyadic_range(spec.grid());
  const bool l2 = !q.is_infinite() && q.value() == 2.0;
  const auto kn = wavenumber_norms(spec.grid());
  const int j_lo = homogeneous ? range.j_min : 1;
  double sum = 0.0;
  for (int j = j_lo; j <= range.j_max; ++j) {
    const double scale = std::ldexp(1.0, -j);
    const double block = l2 ? block_l2(spec, kn, scale)
                            : lq_norm(radial_multiply(spec, block_weight, scale, 0.0), q);
    sum += std::pow(2.0, 2.0 * j * gamma) * block * block;
  }
  double out = std::sqrt(sum);
  if (!homogeneous) out += lq_norm(radial_multiply(spec, zero_weight, 0.0, 1.0), q);
  return out;
}

double evaluate_norm(const Field& f, const NormSpec& spec) {
  return spec.besov ? besov_norm(f, spec.gamma, spec.homogeneous, spec.q)
                    : sobolev_norm(f, spec.gamma, spec.homogeneous, spec.q);
}

double weighted_norm_hkk(const Field& f, int k, double decay_guard) {
  if (k < 0) throw Error("weighted norm order k must be >= 0");
  Field phys = to_space(f, Space::physical);
  require_decay(phys, decay_guard, "weighted H^{k,k} norm");
  const GridSpec& g = phys.grid();
  std::vector<double> bracket(phys.size());
  for (std::size_t i = 0; i < phys.size(); ++i) {
    auto x = coordinates(g, i);
    bracket[i] = std::sqrt(1.0 + x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
  }
  double total = 0.0;
  std::array<int, 3> alpha{};
  // Enumerate multi-indices with |alpha| <= k, one digit per axis.
  const int base = k + 1;
  int combos = 1;
  for (int a = 0; a < g.dim; ++a) combos *= base;
  for (int code = 0; code < combos; ++code) {
    int rest = code;
    int order = 0;
    for (int a = 0; a < g.dim; ++a) {
      alpha[a] = rest % base;
      rest /= base;
      order += alpha[a];
    }
    if (order > k) continue;
    Field d = order == 0 ? phys : to_space(spectral_derivative(phys, alpha), Space::physical);
    const int w = k - order;
    double sum = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
      sum += std::norm(d[i]) * std::pow(bracket[i], 2 * w);
    }
    total += std::sqrt(sum * g.cell_volume());
  }
  return total;
}

ComparabilityBounds besov_sobolev_bounds(double gamma, int mesh) {
  if (mesh < 10) throw Error("comparability mesh too coarse");
  double lo = INFINITY;
  double hi = 0.0;
  // The weight sum_j (2^j/r)^{2 gamma} phi(r/2^j)^2 is invariant under r -> 2r.
  for (int i = 0; i <= mesh; ++i) {
    const double r = std::pow(2.0, static_cast<double>(i) / mesh);
    double w = 0.0;
    for (int j = -3; j <= 4; ++j) {
      const double b = annulus_bump(r * std::ldexp(1.0, -j));
      if (b != 0.0) w += std::pow(std::ldexp(1.0, j) / r, 2.0 * gamma) * b * b;
    }
    lo = std::min(lo, w);
    hi = std::max(hi, w);
  }
  return {std::sqrt(lo), std::sqrt(hi)};
}

}  // namespace hwlab
