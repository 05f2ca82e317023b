#include "hwlab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "fft.hpp"

namespace hwlab {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

void require_same_layout(const Field& a, const Field& b, const char* op) {
  if (!(a.grid() == b.grid()) || a.space() != b.space()) {
    throw Error(std::string("field ") + op + ": grid or space mismatch");
  }
}

// Spectral scale factor (h / sqrt(2 pi))^d.
double unitary_scale(const GridSpec& g) {
  return std::pow(g.spacing() / std::sqrt(kTwoPi), g.dim);
}

// (-1)^(j0 + j1 + j2): the box starts at -L/2, so e^{-i k x_0} = (-1)^m.
double offset_sign(const GridSpec& g, std::size_t flat) {
  auto idx = axis_indices(g, flat);
  int parity = 0;
  for (int a = 0; a < g.dim; ++a) parity += idx[a];
  return (parity & 1) ? -1.0 : 1.0;
}

template <class Fn>
void for_each_slot(const GridSpec& g, Fn&& fn) {
  const std::size_t total = g.size();
  for (std::size_t i = 0; i < total; ++i) fn(i);
}

}  // namespace

double GridSpec::frequency_step() const { return kTwoPi / box_length; }
double GridSpec::cell_volume() const { return std::pow(spacing(), dim); }
double GridSpec::spectral_cell_volume() const { return std::pow(frequency_step(), dim); }

double GridSpec::max_frequency() const {
  return frequency_step() * (n / 2) * std::sqrt(static_cast<double>(dim));
}

std::size_t GridSpec::size() const {
  std::size_t total = 1;
  for (int a = 0; a < dim; ++a) total *= static_cast<std::size_t>(n);
  return total;
}

void GridSpec::validate() const {
  if (dim < 1 || dim > 3) throw Error("grid dimension must be 1, 2 or 3, got " + std::to_string(dim));
  if (n < 8 || !is_power_of_two(n)) {
    throw Error("points per axis must be a power of two >= 8, got " + std::to_string(n));
  }
  if (!(box_length > 0.0) || !std::isfinite(box_length)) {
    throw Error("box length must be positive and finite");
  }
}

GridSpec make_grid(int dim, int n, double box_length) {
  GridSpec g{dim, n, box_length};
  g.validate();
  return g;
}

Field::Field(GridSpec grid, Space space) : grid_(grid), space_(space) {
  grid_.validate();
  values_.assign(grid_.size(), cplx{});
}

Field::Field(GridSpec grid, std::vector<cplx> values, Space space)
    : grid_(grid), values_(std::move(values)), space_(space) {
  grid_.validate();
  if (values_.size() != grid_.size()) {
    throw Error("field value count " + std::to_string(values_.size()) + " does not match n^d = " +
                std::to_string(grid_.size()));
  }
}

bool Field::all_finite() const {
  return std::all_of(values_.begin(), values_.end(),
                     [](const cplx& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
}

Field operator+(const Field& a, const Field& b) {
  require_same_layout(a, b, "sum");
  Field out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += b[i];
  return out;
}

Field operator-(const Field& a, const Field& b) {
  require_same_layout(a, b, "difference");
  Field out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= b[i];
  return out;
}

Field operator*(cplx s, const Field& f) {
  Field out = f;
  for (auto& z : out.values()) z *= s;
  return out;
}

std::array<int, 3> axis_indices(const GridSpec& g, std::size_t flat) {
  std::array<int, 3> idx{};
  for (int a = g.dim - 1; a >= 0; --a) {
    idx[a] = static_cast<int>(flat % static_cast<std::size_t>(g.n));
    flat /= static_cast<std::size_t>(g.n);
  }
  return idx;
}

std::array<double, 3> coordinates(const GridSpec& g, std::size_t flat) {
  auto idx = axis_indices(g, flat);
  std::array<double, 3> x{};
  for (int a = 0; a < g.dim; ++a) x[a] = -0.5 * g.box_length + idx[a] * g.spacing();
  return x;
}

std::array<double, 3> wavevector(const GridSpec& g, std::size_t flat) {
  auto idx = axis_indices(g, flat);
  std::array<double, 3> k{};
  for (int a = 0; a < g.dim; ++a) k[a] = g.frequency_step() * signed_index(idx[a], g.n);
  return k;
}

std::vector<double> wavenumber_norms(const GridSpec& g) {
  std::vector<double> out(g.size());
  for_each_slot(g, [&](std::size_t i) {
    auto k = wavevector(g, i);
    out[i] = std::sqrt(k[0] * k[0] + k[1] * k[1] + k[2] * k[2]);
  });
  return out;
}

Field forward_transform(const Field& f) {
  if (f.space() != Space::physical) throw Error("forward_transform: field is already spectral");
  if (!f.all_finite()) throw Error("forward_transform: non-finite input values");
  Field out = f;
  const GridSpec& g = f.grid();
  detail::fft_inplace(out.values(), g.dim, g.n, -1);
  const double scale = unitary_scale(g);
  for_each_slot(g, [&](std::size_t i) { out[i] *= scale * offset_sign(g, i); });
  return Field(g, {out.values().begin(), out.values().end()}, Space::spectral);
}

Field inverse_transform(const Field& f) {
  if (f.space() != Space::spectral) throw Error("inverse_transform: field is already physical");
  if (!f.all_finite()) throw Error("inverse_transform: non-finite input values");
  const GridSpec& g = f.grid();
  std::vector<cplx> values(f.values().begin(), f.values().end());
  const double scale = 1.0 / (unitary_scale(g) * static_cast<double>(g.size()));
  for_each_slot(g, [&](std::size_t i) { values[i] *= scale * offset_sign(g, i); });
  detail::fft_inplace(values, g.dim, g.n, +1);
  return Field(g, std::move(values), Space::physical);
}

Field to_space(const Field& f, Space space) {
  if (f.space() == space) return f;
  return space == Space::spectral ? forward_transform(f) : inverse_transform(f);
}

double l2_norm(const Field& f) {
  double sum = 0.0;
  for (const auto& z : f.values()) sum += std::norm(z);
  const double w = f.space() == Space::physical ? f.grid().cell_volume()
                                                : f.grid().spectral_cell_volume();
  return std::sqrt(sum * w);
}

cplx SymbolSpec::at(double kmag) const {
  switch (kind) {
    case Kind::homogeneous_power:
      return exponent == 0.0 ? 1.0 : std::pow(kmag, exponent);
    case Kind::inhomogeneous_power:
      return std::pow(1.0 + kmag * kmag, 0.5 * exponent);
    case Kind::halfwave_phase:
      return std::polar(1.0, time * dispersion * kmag);
  }
  return 1.0;
}

Field apply_symbol(const Field& f, const SymbolSpec& symbol, ZeroMode zero) {
  Field spec = to_space(f, Space::spectral);
  const GridSpec& g = f.grid();
  cplx zero_value = 1.0;
  if (symbol.kind == SymbolSpec::Kind::homogeneous_power && symbol.exponent != 0.0) {
    zero_value = 0.0;
    if (symbol.exponent < 0.0 && zero == ZeroMode::reject) {
      const double mean_part = std::abs(spec[0]) * std::sqrt(g.spectral_cell_volume());
      if (mean_part > 1e-12 * std::max(l2_norm(spec), 1e-300)) {
        throw Error("zero-mode undefined: |xi|^s with s < 0 applied to a field with nonzero mean");
      }
    }
  }
  for_each_slot(g, [&](std::size_t i) {
    if (i == 0) {
      spec[0] *= zero_value;
      return;
    }
    auto k = wavevector(g, i);
    spec[i] *= symbol.at(std::sqrt(k[0] * k[0] + k[1] * k[1] + k[2] * k[2]));
  });
  return to_space(spec, f.space());
}

Field apply_multiplier(const Field& f, const Multiplier& m) {
  Field spec = to_space(f, Space::spectral);
  for_each_slot(f.grid(), [&](std::size_t i) { spec[i] *= m(wavevector(f.grid(), i)); });
  return to_space(spec, f.space());
}

Field spectral_derivative(const Field& f, std::span<const int> orders) {
  const int dim = f.grid().dim;
  std::array<int, 3> ord{};
  for (int a = 0; a < dim && a < static_cast<int>(orders.size()); ++a) {
    if (orders[a] < 0) throw Error("derivative order must be non-negative");
    ord[a] = orders[a];
  }
  return apply_multiplier(f, [&](const std::array<double, 3>& k) {
    cplx m = 1.0;
    for (int a = 0; a < dim; ++a) m *= std::pow(cplx(0.0, k[a]), ord[a]);
    return m;
  });
}

Field propagate_linear(const Field& f, double t, double delta) {
  if (delta < 0.0) throw Error("propagate_linear: dispersion coefficient must be >= 0");
  if (delta == 0.0 || t == 0.0) {
    if (!f.all_finite()) throw Error("propagate_linear: non-finite input values");
    return f;
  }
  return apply_symbol(f, SymbolSpec::halfwave(t, delta));
}

Field dilate(const Field& f, double factor) {
  if (!(factor > 0.0) || !std::isfinite(factor)) throw Error("dilation factor must be positive");
  GridSpec g = f.grid();
  g.box_length /= factor;
  std::vector<cplx> values(f.values().begin(), f.values().end());
  if (f.space() == Space::spectral) {
    const double scale = std::pow(factor, -f.grid().dim);
    for (auto& z : values) z *= scale;
  }
  return Field(g, std::move(values), f.space());
}

double upper_band_energy_fraction(const Field& f) {
  Field spec = to_space(f, Space::spectral);
  const GridSpec& g = f.grid();
  double total = 0.0;
  double upper = 0.0;
  for_each_slot(g, [&](std::size_t i) {
    const double e = std::norm(spec[i]);
    total += e;
    auto idx = axis_indices(g, i);
    for (int a = 0; a < g.dim; ++a) {
      if (std::abs(signed_index(idx[a], g.n)) >= g.n / 4) {
        upper += e;
        break;
      }
    }
  });
  return total > 0.0 ? upper / total : 0.0;
}

Field resample_dyadic(const Field& f, int m) {
  if (m > 0) {
    const double frac = upper_band_energy_fraction(f);
    if (frac > 1e-10) {
      std::ostringstream msg;
      msg << "resample_dyadic: field not band-limited to the lower half spectrum (aliasing energy "
          << frac << " of total, limit 1e-10)";
      throw Error(msg.str());
    }
  }
  return dilate(f, std::ldexp(1.0, -m));
}

Field upsample(const Field& f, int factor) {
  if (!is_power_of_two(factor)) throw Error("upsample factor must be a power of two");
  Field spec = to_space(f, Space::spectral);
  const GridSpec& g = f.grid();
  if (factor == 1) return to_space(spec, Space::physical);
  GridSpec big{g.dim, g.n * factor, g.box_length};
  Field out(big, Space::spectral);
  for_each_slot(g, [&](std::size_t i) {
    auto idx = axis_indices(g, i);
    std::size_t flat = 0;
    for (int a = 0; a < g.dim; ++a) {
      int m = signed_index(idx[a], g.n);
      flat = flat * static_cast<std::size_t>(big.n) + static_cast<std::size_t>(m < 0 ? m + big.n : m);
    }
    out[flat] = spec[i];
  });
  return inverse_transform(out);
}

double required_box_length(const GaussianRecipe& r, int dim) {
  double offset = 0.0;
  for (int a = 0; a < dim; ++a) offset = std::max(offset, std::abs(r.center[a]));
  return 2.0 * (offset + r.sigma * std::sqrt(-2.0 * std::log(kDecayGuard)));
}

double boundary_ratio(const Field& f) {
  Field phys = to_space(f, Space::physical);
  const GridSpec& g = phys.grid();
  double peak = 0.0;
  double edge = 0.0;
  for_each_slot(g, [&](std::size_t i) {
    const double v = std::abs(phys[i]);
    peak = std::max(peak, v);
    auto idx = axis_indices(g, i);
    for (int a = 0; a < g.dim; ++a) {
      if (idx[a] == 0 || idx[a] == g.n - 1) {
        edge = std::max(edge, v);
        break;
      }
    }
  });
  return peak > 0.0 ? edge / peak : 0.0;
}

void require_decay(const Field& f, double max_ratio, const std::string& what) {
  const double ratio = boundary_ratio(f);
  if (ratio > max_ratio) {
    std::ostringstream msg;
    msg << what << ": field not decayed at the boundary (boundary/peak = " << ratio << ", limit "
        << max_ratio << ")";
    throw Error(msg.str());
  }
}

namespace {

Field gaussian_samples(const GridSpec& g, const GaussianRecipe& r) {
  Field out(g, Space::physical);
  const double inv = 1.0 / (2.0 * r.sigma * r.sigma);
  for_each_slot(g, [&](std::size_t i) {
    auto x = coordinates(g, i);
    double r2 = 0.0;
    for (int a = 0; a < g.dim; ++a) r2 += (x[a] - r.center[a]) * (x[a] - r.center[a]);
    out[i] = r.amplitude * std::exp(-r2 * inv);
  });
  return out;
}

Field make(const GridSpec& g, const GaussianRecipe& r) {
  if (!(r.sigma > 0.0)) throw Error("gaussian recipe: sigma must be positive");
  const double need = required_box_length(r, g.dim);
  if (g.box_length < need) {
    std::ostringstream msg;
    msg << "box too small for gaussian decay: need L >= " << need << ", got " << g.box_length;
    throw Error(msg.str());
  }
  return gaussian_samples(g, r);
}

Field make(const GridSpec& g, const PlaneWaveRecipe& r) {
  for (int a = 0; a < g.dim; ++a) {
    const double m = r.wavevector[a] / g.frequency_step();
    if (std::abs(m - std::round(m)) > 1e-9 * std::max(1.0, std::abs(m))) {
      throw Error("plane wave: wavevector component is not on the frequency lattice");
    }
    if (std::round(m) >= g.n / 2 || std::round(m) < -g.n / 2) {
      throw Error("plane wave: wavevector beyond the resolvable band");
    }
  }
  Field out(g, Space::physical);
  for_each_slot(g, [&](std::size_t i) {
    auto x = coordinates(g, i);
    double phase = 0.0;
    for (int a = 0; a < g.dim; ++a) phase += r.wavevector[a] * x[a];
    out[i] = r.amplitude * std::polar(1.0, phase);
  });
  return out;
}

Field make(const GridSpec& g, const MomentGaussianRecipe& r) {
  if (r.order < 0) throw Error("moment gaussian: order must be >= 0");
  if (!(r.sigma > 0.0)) throw Error("moment gaussian: sigma must be positive");
  Field base = gaussian_samples(g, GaussianRecipe{r.sigma, r.amplitude, {}});
  const int order = r.order;
  Field out = apply_multiplier(base, [order](const std::array<double, 3>& k) {
    return cplx(std::pow(-(k[0] * k[0] + k[1] * k[1] + k[2] * k[2]), order));
  });
  if (order > 0) {
    // The multiplier vanishes at k = 0; pin the mean to exactly zero.
    Field spec = forward_transform(out);
    spec[0] = 0.0;
    out = inverse_transform(spec);
  }
  if (boundary_ratio(out) > kDecayGuard) {
    // Radial envelope (1 + r^2/sigma^2)^order e^{-r^2 / 2 sigma^2} against the guard.
    double rad = r.sigma;
    while (std::pow(1.0 + rad * rad / (r.sigma * r.sigma), order) *
               std::exp(-rad * rad / (2.0 * r.sigma * r.sigma)) >
           kDecayGuard) {
      rad += 0.05 * r.sigma;
    }
    std::ostringstream msg;
    msg << "box too small for moment gaussian decay: need L >= " << 2.0 * rad << ", got "
        << g.box_length;
    throw Error(msg.str());
  }
  return out;
}

}  // namespace

Field synthesize(const GridSpec& g, const Recipe& recipe) {
  g.validate();
  return std::visit([&](const auto& r) { return make(g, r); }, recipe);
}

Field random_band_limited(const GridSpec& g, std::uint64_t seed, RandomFieldOptions options) {
  g.validate();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double cutoff = options.cutoff_fraction * g.n;
  const double width = std::max(options.envelope * cutoff, 1e-12);
  Field spec(g, Space::spectral);
  for_each_slot(g, [&](std::size_t i) {
    auto idx = axis_indices(g, i);
    double m2 = 0.0;
    for (int a = 0; a < g.dim; ++a) {
      const int m = signed_index(idx[a], g.n);
      if (std::abs(m) >= cutoff) return;
      m2 += static_cast<double>(m) * m;
    }
    const double re = normal(rng);
    const double im = normal(rng);
    spec[i] = cplx(re, im) * std::exp(-0.5 * m2 / (width * width));
  });
  if (options.zero_mean) spec[0] = 0.0;
  Field phys = inverse_transform(spec);
  const double norm = l2_norm(phys);
  if (norm > 0.0) phys = cplx(1.0 / norm) * phys;
  return phys;
}

}  // namespace hwlab
