#pragma once

// Periodic-box discretization and the Fourier-multiplier calculus.
//
// Layout: a d-dimensional grid of n points per axis is stored flat in
// row-major order, axis 0 slowest: index = (i0 * n + i1) * n + i2.
// Physical sample i sits at x = -L/2 + i*h, h = L/n.
//
// Spectral fields hold samples of the unitary Fourier transform
//   f^(xi) = (2 pi)^{-d/2} \int f(x) e^{-i x.xi} dx
// at the lattice frequencies (2 pi / L) * m, stored in FFT order: slot j
// of an axis holds m = j for j < n/2 and m = j - n otherwise. With this
// convention Plancherel reads h^d sum |f|^2 == (2 pi / L)^d sum |f^|^2.

#include <array>
#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace hwlab {

using cplx = std::complex<double>;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GridSpec {
  int dim = 1;
  int n = 8;
  double box_length = 1.0;

  double spacing() const { return box_length / n; }
  double frequency_step() const;
  double cell_volume() const;
  double spectral_cell_volume() const;
  /// Largest lattice frequency magnitude, (2 pi / L)(n / 2) sqrt(d).
  double max_frequency() const;
  std::size_t size() const;

  /// Throws Error unless d in {1,2,3}, n a power of two >= 8, L > 0.
  void validate() const;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

GridSpec make_grid(int dim, int n, double box_length);

enum class Space : std::uint8_t { physical = 0, spectral = 1 };

class Field {
 public:
  Field(GridSpec grid, Space space);
  Field(GridSpec grid, std::vector<cplx> values, Space space);

  const GridSpec& grid() const { return grid_; }
  Space space() const { return space_; }
  std::size_t size() const { return values_.size(); }

  std::span<const cplx> values() const { return values_; }
  std::span<cplx> values() { return values_; }
  const cplx& operator[](std::size_t i) const { return values_[i]; }
  cplx& operator[](std::size_t i) { return values_[i]; }

  bool all_finite() const;

 private:
  GridSpec grid_;
  std::vector<cplx> values_;
  Space space_;
};

Field operator+(const Field& a, const Field& b);
Field operator-(const Field& a, const Field& b);
Field operator*(cplx s, const Field& f);

/// Signed lattice index of FFT slot j on an axis of n points.
inline int signed_index(int j, int n) { return j < n / 2 ? j : j - n; }

std::array<int, 3> axis_indices(const GridSpec& g, std::size_t flat);
std::array<double, 3> coordinates(const GridSpec& g, std::size_t flat);
std::array<double, 3> wavevector(const GridSpec& g, std::size_t flat);
/// |k| for every slot, in storage order.
std::vector<double> wavenumber_norms(const GridSpec& g);

Field forward_transform(const Field& f);
Field inverse_transform(const Field& f);
Field to_space(const Field& f, Space space);

/// L2 norm by physical quadrature or by the weighted spectral sum,
/// whichever matches the field's space.
double l2_norm(const Field& f);

struct SymbolSpec {
  enum class Kind { homogeneous_power, inhomogeneous_power, halfwave_phase };

  Kind kind = Kind::homogeneous_power;
  double exponent = 0.0;
  double time = 0.0;
  double dispersion = 1.0;

  static SymbolSpec homogeneous(double s) { return {Kind::homogeneous_power, s, 0.0, 1.0}; }
  static SymbolSpec inhomogeneous(double s) { return {Kind::inhomogeneous_power, s, 0.0, 1.0}; }
  static SymbolSpec halfwave(double t, double delta) {
    return {Kind::halfwave_phase, 0.0, t, delta};
  }

  /// Symbol at a nonzero frequency magnitude (the zero mode is handled by
  /// apply_symbol).
  cplx at(double kmag) const;
};

/// What to do with the zero mode of |xi|^s, s < 0.
enum class ZeroMode { reject, suppress };

Field apply_symbol(const Field& f, const SymbolSpec& symbol, ZeroMode zero = ZeroMode::reject);

using Multiplier = std::function<cplx(const std::array<double, 3>&)>;
Field apply_multiplier(const Field& f, const Multiplier& m);

/// D^alpha with one order per axis (unused trailing entries ignored).
Field spectral_derivative(const Field& f, std::span<const int> orders);

/// e^{i t delta Lambda} f. delta == 0 returns the input untouched.
Field propagate_linear(const Field& f, double t, double delta);

/// g(x) = f(c x), represented on a box of length L / c with the same n.
/// Samples are identical; only the box is relabelled, so the map is exact.
Field dilate(const Field& f, double factor);

/// f(2^{-m} x) on a box of length 2^m L. For m > 0 the input must be
/// band-limited to the lower half of the spectrum (aliasing energy at most
/// 1e-10 of the total).
Field resample_dyadic(const Field& f, int m);

/// Spectral interpolation onto a grid with factor * n points per axis.
/// factor must be a power of two. Output is physical.
Field upsample(const Field& f, int factor);

/// Fraction of spectral energy carried by slots with |m_i| >= n/4 on some axis.
double upper_band_energy_fraction(const Field& f);

struct GaussianRecipe {
  double sigma = 1.0;
  double amplitude = 1.0;
  std::array<double, 3> center{};
};

struct PlaneWaveRecipe {
  std::array<double, 3> wavevector{};
  cplx amplitude = 1.0;
};

/// amplitude * Delta^order applied to exp(-|x|^2 / (2 sigma^2)); its
/// transform vanishes to order 2*order at the origin.
struct MomentGaussianRecipe {
  int order = 1;
  double sigma = 1.0;
  double amplitude = 1.0;
};

using Recipe = std::variant<GaussianRecipe, PlaneWaveRecipe, MomentGaussianRecipe>;

/// Boundary-to-peak ratio enforced on decaying recipes.
inline constexpr double kDecayGuard = 1e-12;

Field synthesize(const GridSpec& g, const Recipe& recipe);

/// Box length needed for a Gaussian recipe to meet kDecayGuard.
double required_box_length(const GaussianRecipe& r, int dim);

/// max |f| over the boundary faces divided by max |f| (0 for the zero field).
double boundary_ratio(const Field& f);

/// Throws Error naming `what` when boundary_ratio(f) > max_ratio.
void require_decay(const Field& f, double max_ratio, const std::string& what);

struct RandomFieldOptions {
  /// Nonzero coefficients only for |m_i| < cutoff_fraction * n on every axis.
  double cutoff_fraction = 0.25;
  /// Gaussian envelope width in lattice units, relative to the cutoff.
  double envelope = 0.5;
  bool zero_mean = false;
};

/// Seeded random band-limited field with unit L2 norm, physical space.
Field random_band_limited(const GridSpec& g, std::uint64_t seed, RandomFieldOptions options = {});

}  // namespace hwlab
