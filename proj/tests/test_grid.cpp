#include <cmath>
#include <numbers>

#include "doctest.h"
#include "hwlab/grid.hpp"
#include "support.hpp"

using namespace hwlab;
using testing::gaussian;
using testing::max_abs_diff;
using testing::rel_l2_diff;

namespace {

constexpr double kPi = std::numbers::pi;

Field plane_wave(const GridSpec& g, int m, cplx a = 1.0) {
  return synthesize(g, PlaneWaveRecipe{{g.frequency_step() * m, 0.0, 0.0}, a});
}

}  // namespace

TEST_CASE("grid spec validation") {
  CHECK_NOTHROW(make_grid(1, 8, 1.0));
  CHECK_THROWS_AS(make_grid(4, 8, 1.0), Error);
  CHECK_THROWS_AS(make_grid(1, 12, 1.0), Error);
  CHECK_THROWS_AS(make_grid(1, 4, 1.0), Error);
  CHECK_THROWS_AS(make_grid(1, 8, 0.0), Error);
  auto g = make_grid(3, 16, 2.0 * kPi);
  CHECK(g.frequency_step() == doctest::Approx(1.0));
  CHECK(g.max_frequency() == doctest::Approx(8.0 * std::sqrt(3.0)));
  CHECK(g.size() == 4096u);
}

TEST_CASE("field value count must match the grid") {
  auto g = make_grid(1, 8, 1.0);
  CHECK_THROWS_AS(Field(g, std::vector<cplx>(7), Space::physical), Error);
}

TEST_CASE("forward transform of a constant is supported on k = 0") {
  auto g = make_grid(1, 64, 10.0);
  Field one(g, std::vector<cplx>(64, 1.0), Space::physical);
  Field spec = forward_transform(one);
  for (std::size_t i = 1; i < spec.size(); ++i) CHECK(std::abs(spec[i]) < 1e-14);
  // Unitary convention: the zero mode carries L / sqrt(2 pi).
  CHECK(std::abs(spec[0]) == doctest::Approx(10.0 / std::sqrt(2.0 * kPi)));
}

TEST_CASE("plane wave on the lattice has one spectral entry") {
  auto g = make_grid(2, 16, 8.0);
  Field pw = synthesize(g, PlaneWaveRecipe{{g.frequency_step() * 3, -g.frequency_step() * 2, 0.0}, 1.0});
  Field spec = forward_transform(pw);
  int nonzero = 0;
  for (std::size_t i = 0; i < spec.size(); ++i) {
    if (std::abs(spec[i]) > 1e-10) {
      ++nonzero;
      auto idx = axis_indices(g, i);
      CHECK(signed_index(idx[0], 16) == 3);
      CHECK(signed_index(idx[1], 16) == -2);
    }
  }
  CHECK(nonzero == 1);
}

TEST_CASE("gaussian spectrum samples the continuous transform") {
  auto g = make_grid(1, 512, 40.0);
  Field spec = forward_transform(gaussian(g));
  double err = 0.0;
  for (std::size_t i = 0; i < spec.size(); ++i) {
    const double k = wavevector(g, i)[0];
    err = std::max(err, std::abs(spec[i] - std::exp(-0.5 * k * k)));
  }
  CHECK(err <= 1e-10);
}

TEST_CASE("round trip and non-finite rejection") {
  auto g = make_grid(3, 16, 12.0);
  Field f = random_band_limited(g, 7);
  Field back = inverse_transform(forward_transform(f));
  CHECK(rel_l2_diff(back, f) <= 1e-12);
  Field bad = f;
  bad[5] = cplx(NAN, 0.0);
  CHECK_THROWS_AS(forward_transform(bad), Error);
  CHECK_THROWS_AS(inverse_transform(f), Error);
}

TEST_CASE("Plancherel on 100 random band-limited fields") {
  for (int dim = 1; dim <= 3; ++dim) {
    auto g = make_grid(dim, dim == 3 ? 16 : 64, 9.0);
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      Field f = random_band_limited(g, seed * 3 + dim);
      const double phys = l2_norm(f);
      const double spec = l2_norm(forward_transform(f));
      CHECK(std::abs(phys - spec) / phys <= 1e-12);
    }
  }
}

TEST_CASE("Lambda acts on a plane wave by |k0|") {
  auto g = make_grid(1, 64, 2.0 * kPi);
  Field pw = plane_wave(g, -5);
  Field out = apply_symbol(pw, SymbolSpec::homogeneous(1.0));
  CHECK(out.space() == Space::physical);
  CHECK(max_abs_diff(out, cplx(5.0) * pw) < 1e-12);
}

TEST_CASE("zero powers are the identity") {
  auto g = make_grid(2, 32, 10.0);
  Field f = random_band_limited(g, 3);
  CHECK(rel_l2_diff(apply_symbol(f, SymbolSpec::homogeneous(0.0)), f) < 1e-14);
  CHECK(rel_l2_diff(apply_symbol(f, SymbolSpec::inhomogeneous(0.0)), f) < 1e-14);
}

TEST_CASE("<Lambda>^2 equals 1 - Laplacian") {
  auto g = make_grid(2, 32, 10.0);
  Field f = random_band_limited(g, 11);
  const int dx[] = {2, 0};
  const int dy[] = {0, 2};
  Field lap = spectral_derivative(f, dx) + spectral_derivative(f, dy);
  Field expected = f - lap;
  CHECK(rel_l2_diff(apply_symbol(f, SymbolSpec::inhomogeneous(2.0)), expected) <= 1e-12);
}

TEST_CASE("negative homogeneous powers reject a nonzero mean") {
  auto g = make_grid(1, 64, 10.0);
  Field f = random_band_limited(g, 1);
  CHECK_THROWS_WITH_AS(apply_symbol(f, SymbolSpec::homogeneous(-0.5)),
                       doctest::Contains("zero-mode undefined"), Error);
  CHECK_NOTHROW(apply_symbol(f, SymbolSpec::homogeneous(-0.5), ZeroMode::suppress));
  Field z = random_band_limited(g, 1, {.zero_mean = true});
  CHECK_NOTHROW(apply_symbol(z, SymbolSpec::homogeneous(-0.5)));
}

TEST_CASE("halfwave symbol has unit modulus") {
  SymbolSpec s = SymbolSpec::halfwave(3.7, 0.4);
  for (double k : {0.0, 0.1, 1.0, 17.5, 1e4}) CHECK(std::abs(std::abs(s.at(k)) - 1.0) < 1e-15);
}

TEST_CASE("symbol composition") {
  auto g = make_grid(2, 32, 7.0);
  Field f = random_band_limited(g, 5);
  for (double a : {0.3, 1.0}) {
    for (double b : {0.5, 2.0}) {
      Field two = apply_symbol(apply_symbol(f, SymbolSpec::homogeneous(a)), SymbolSpec::homogeneous(b));
      Field one = apply_symbol(f, SymbolSpec::homogeneous(a + b));
      CHECK(rel_l2_diff(two, one) <= 1e-12);
    }
  }
}

TEST_CASE("propagate_linear") {
  auto g = make_grid(1, 128, 20.0);
  Field f = random_band_limited(g, 9);

  SUBCASE("delta = 0 is bitwise identity") {
    Field out = propagate_linear(f, 3.0, 0.0);
    for (std::size_t i = 0; i < f.size(); ++i) CHECK(out[i] == f[i]);
  }
  SUBCASE("plane-wave phase") {
    Field pw = plane_wave(g, 7);
    const double k = 7 * g.frequency_step();
    Field out = propagate_linear(pw, 0.9, 1.0);
    CHECK(max_abs_diff(out, std::polar(1.0, 0.9 * k) * pw) < 1e-12);
  }
  SUBCASE("group property") {
    Field two = propagate_linear(propagate_linear(f, 0.4, 1.0), 1.3, 1.0);
    CHECK(rel_l2_diff(two, propagate_linear(f, 1.7, 1.0)) <= 1e-12);
  }
  SUBCASE("unitarity") {
    for (double t : {0.1, 1.0, 10.0}) {
      for (double d : {0.0, 0.01, 1.0}) {
        CHECK(std::abs(l2_norm(propagate_linear(f, t, d)) - l2_norm(f)) / l2_norm(f) <= 1e-12);
      }
    }
  }
  SUBCASE("negative dispersion rejected") { CHECK_THROWS_AS(propagate_linear(f, 1.0, -1.0), Error); }
}

TEST_CASE("resample_dyadic") {
  auto g = make_grid(1, 256, 40.0);
  SUBCASE("m = 0 is identity") {
    Field f = gaussian(g);
    Field out = resample_dyadic(f, 0);
    CHECK(out.grid() == g);
    CHECK(max_abs_diff(out, f) == 0.0);
  }
  SUBCASE("plane wave halves its frequency") {
    Field pw = plane_wave(g, 6);
    Field out = resample_dyadic(pw, 1);
    CHECK(out.grid().box_length == doctest::Approx(80.0));
    Field expected = synthesize(out.grid(), PlaneWaveRecipe{{6 * g.frequency_step() / 2, 0, 0}, 1.0});
    CHECK(max_abs_diff(out, expected) < 1e-12);
  }
  SUBCASE("gaussian widens") {
    Field out = resample_dyadic(gaussian(g), 1);
    double err = 0.0;
    for (std::size_t i = 0; i < out.size(); ++i) {
      const double x = coordinates(out.grid(), i)[0];
      err = std::max(err, std::abs(out[i] - std::exp(-x * x / 8.0)));
    }
    CHECK(err <= 1e-8);
  }
  SUBCASE("round trip") {
    Field f = random_band_limited(g, 4);
    CHECK(rel_l2_diff(resample_dyadic(resample_dyadic(f, 1), -1), f) <= 1e-10);
  }
  SUBCASE("band-limit guard") {
    Field f = random_band_limited(g, 4, {.cutoff_fraction = 0.5, .envelope = 2.0});
    CHECK_THROWS_WITH_AS(resample_dyadic(f, 1), doctest::Contains("aliasing energy"), Error);
  }
}

TEST_CASE("upsample interpolates band-limited fields") {
  auto g = make_grid(2, 16, 6.0);
  Field f = random_band_limited(g, 21);
  Field big = upsample(f, 4);
  CHECK(big.grid().n == 64);
  for (std::size_t i = 0; i < f.size(); ++i) {
    auto idx = axis_indices(g, i);
    const std::size_t j = (static_cast<std::size_t>(idx[0]) * 4) * 64 + idx[1] * 4;
    CHECK(std::abs(big[j] - f[i]) < 1e-12);
  }
  CHECK(std::abs(l2_norm(big) - l2_norm(f)) < 1e-12);
}

TEST_CASE("synthesize") {
  auto g = make_grid(1, 256, 30.0);
  SUBCASE("gaussian peak") {
    Field f = gaussian(g);
    CHECK(std::abs(f[128] - 1.0) == 0.0);
    CHECK(boundary_ratio(f) <= kDecayGuard);
  }
  SUBCASE("box guard names the required length") {
    auto small = make_grid(1, 64, 10.0);
    CHECK_THROWS_WITH_AS(gaussian(small), doctest::Contains("need L >="), Error);
  }
  SUBCASE("moment gaussian has zero mean") {
    Field f = synthesize(g, MomentGaussianRecipe{1, 1.0, 1.0});
    CHECK(std::abs(forward_transform(f)[0]) <= 1e-14);
  }
  SUBCASE("moment gaussian spectrum is quadratic near the origin") {
    auto wide = make_grid(1, 4096, 2000.0);
    Field spec = forward_transform(synthesize(wide, MomentGaussianRecipe{1, 1.0, 1.0}));
    // Lowest decade of lattice frequencies: slots 1 .. 10.
    const double k1 = wavevector(wide, 1)[0];
    const double k10 = wavevector(wide, 10)[0];
    const double slope = std::log(std::abs(spec[10]) / std::abs(spec[1])) / std::log(k10 / k1);
    CHECK(slope == doctest::Approx(2.0).epsilon(0.025));
  }
  SUBCASE("off-lattice plane wave rejected") {
    CHECK_THROWS_AS(synthesize(g, PlaneWaveRecipe{{0.123, 0, 0}, 1.0}), Error);
  }
}

TEST_CASE("random fields are seeded and normalized") {
  auto g = make_grid(2, 32, 5.0);
  Field a = random_band_limited(g, 42);
  Field b = random_band_limited(g, 42);
  Field c = random_band_limited(g, 43);
  CHECK(max_abs_diff(a, b) == 0.0);
  CHECK(max_abs_diff(a, c) > 0.0);
  CHECK(l2_norm(a) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(upper_band_energy_fraction(a) < 1e-28);
}
