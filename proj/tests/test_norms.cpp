#include <cmath>
#include <numbers>

#include "doctest.h"
#include "hwlab/norms.hpp"
#include "support.hpp"

using namespace hwlab;
using testing::gaussian;
using testing::rel_l2_diff;

namespace {

constexpr double kPi = std::numbers::pi;
const Exponent two = Exponent::finite(2.0);

Field plane_wave(const GridSpec& g, int m, cplx a = 1.0) {
  return synthesize(g, PlaneWaveRecipe{{g.frequency_step() * m, 0.0, 0.0}, a});
}

}  // namespace

TEST_CASE("bump profile") {
  double prev = 1.0;
  for (int i = 0; i <= 3000; ++i) {
    const double r = i * 1e-3;
    const double v = bump_profile(r);
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
    CHECK(v <= prev);
    prev = v;
    if (r <= 1.0) CHECK(v == 1.0);
    if (r >= 2.0) CHECK(v == 0.0);
  }
  CHECK(annulus_bump(1.0) == 1.0);
  CHECK(annulus_bump(0.5) == 0.0);
  CHECK(annulus_bump(2.0) == 0.0);
}

TEST_CASE("telescoping identity holds pointwise") {
  for (int J = 1; J <= 8; ++J) {
    for (int i = 0; i < 2000; ++i) {
      const double r = i * std::ldexp(1.0, J + 1) / 2000.0;
      double sum = bump_profile(r);
      for (int j = 1; j <= J; ++j) sum += annulus_bump(std::ldexp(r, -j));
      CHECK(std::abs(sum - bump_profile(std::ldexp(r, -J))) <= 1e-14);
    }
  }
}

TEST_CASE("partition of unity on every lattice frequency") {
  for (int dim = 1; dim <= 3; ++dim) {
    auto g = make_grid(dim, dim == 3 ? 16 : 64, 3.0);
    const auto range = dyadic_range(g);
    CHECK(std::ldexp(1.0, range.j_max) >= g.max_frequency());
    for (double k : wavenumber_norms(g)) {
      double sum = bump_profile(k);
      for (int j = 1; j <= range.j_max; ++j) sum += annulus_bump(std::ldexp(k, -j));
      CHECK(std::abs(sum - 1.0) <= 1e-13);
    }
  }
}

TEST_CASE("lp_project") {
  auto g = make_grid(1, 64, 2.0 * kPi);
  SUBCASE("plane wave at 2^j passes unchanged") {
    Field pw = plane_wave(g, 4);
    CHECK(rel_l2_diff(lp_project(pw, 2), pw) < 1e-14);
  }
  SUBCASE("plane wave outside the annulus is removed") {
    Field pw = plane_wave(g, 4);
    CHECK(l2_norm(lp_project(pw, 4)) < 1e-14);
    CHECK(l2_norm(lp_project(pw, 0)) < 1e-14);
  }
  SUBCASE("blocks sum to the identity") {
    for (int dim = 1; dim <= 2; ++dim) {
      auto gd = make_grid(dim, 32, 11.0);
      Field f = random_band_limited(gd, 8, {.cutoff_fraction = 0.5, .envelope = 3.0});
      Field sum = lp_project(f, zero_block);
      for (int j = 1; j <= dyadic_range(gd).j_max; ++j) sum = sum + lp_project(f, j);
      CHECK(rel_l2_diff(sum, f) <= 1e-12);
    }
  }
  SUBCASE("out-of-range block lists the range") {
    CHECK_THROWS_WITH_AS(lp_project(plane_wave(g, 1), 40), doctest::Contains("resolvable range"), Error);
    CHECK_THROWS_AS(lp_project(plane_wave(g, 1), -3), Error);
  }
}

TEST_CASE("padding factor") {
  CHECK(padding_factor(3) == 2);
  CHECK(padding_factor(5) == 4);
  CHECK(padding_factor(7) == 4);
  CHECK(padding_factor(2) == 2);
  CHECK(padding_factor(2.5) == 2);
}

TEST_CASE("Lebesgue norms") {
  auto g = make_grid(1, 64, 5.0);
  Field one(g, std::vector<cplx>(64, 1.0), Space::physical);
  CHECK(lq_norm(one, Exponent::finite(4)) == doctest::Approx(std::pow(5.0, 0.25)));
  CHECK(lq_norm(one, Exponent::infinity()) == doctest::Approx(1.0));
  CHECK(lq_norm(one, two) == doctest::Approx(std::sqrt(5.0)));
  CHECK_THROWS_AS(sobolev_norm(one, 1.0, false, Exponent::finite(1.5)), Error);
  CHECK_THROWS_AS(besov_norm(one, 1.0, false, Exponent::finite(1.0)), Error);
}

TEST_CASE("sobolev norms") {
  SUBCASE("plane wave") {
    auto g = make_grid(1, 64, 7.0);
    const cplx a(0.6, -0.8);
    const int m = 5;
    const double k = m * g.frequency_step();
    for (double gamma : {-1.0, 0.0, 0.5, 2.0}) {
      const double expected = std::abs(a) * std::pow(1.0 + k * k, gamma / 2) * std::sqrt(7.0);
      CHECK(sobolev_norm(plane_wave(g, m, a), gamma, false, two) == doctest::Approx(expected).epsilon(1e-13));
      CHECK(sobolev_norm(plane_wave(g, m, a), gamma, false, Exponent::finite(4)) ==
            doctest::Approx(expected * std::pow(7.0, -0.25)).epsilon(1e-12));
    }
  }
  SUBCASE("gaussian closed forms") {
    auto g = make_grid(1, 512, 40.0);
    Field f = gaussian(g);
    CHECK(std::abs(sobolev_norm(f, 0.0, false, two) - std::pow(kPi, 0.25)) <= 1e-8);
    CHECK(std::abs(sobolev_norm(f, 1.0, false, two) - std::sqrt(1.5 * std::sqrt(kPi))) <= 1e-6);
    CHECK(std::abs(sobolev_norm(f, 1.0, true, two) - std::sqrt(0.5 * std::sqrt(kPi))) <= 1e-8);
    CHECK(sobolev_norm(f, 0.0, false, Exponent::infinity()) == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("homogeneous negative order needs zero mean") {
    auto g = make_grid(1, 64, 9.0);
    CHECK_THROWS_WITH_AS(sobolev_norm(random_band_limited(g, 2), -0.5, true, two),
                         doctest::Contains("zero-mode"), Error);
    CHECK_NOTHROW(sobolev_norm(random_band_limited(g, 2, {.zero_mean = true}), -0.5, true, two));
  }
}

TEST_CASE("besov norms") {
  auto g = make_grid(1, 64, 2.0 * kPi);
  SUBCASE("plane wave at 2^j is a single block") {
    const cplx a = 3.0;
    for (double gamma : {0.0, 0.7, -1.0}) {
      const double expected = std::pow(2.0, 3 * gamma) * 3.0 * std::sqrt(2.0 * kPi);
      CHECK(besov_norm(plane_wave(g, 8, a), gamma, true, two) == doctest::Approx(expected).epsilon(1e-13));
      CHECK(besov_norm(plane_wave(g, 8, a), gamma, true, Exponent::finite(6)) ==
            doctest::Approx(expected * std::pow(2.0 * kPi, 1.0 / 6 - 0.5)).epsilon(1e-12));
    }
  }
  SUBCASE("zero field") {
    Field z(g, Space::physical);
    CHECK(besov_norm(z, 1.0, false, two) == 0.0);
    CHECK(besov_norm(z, 1.0, true, Exponent::infinity()) == 0.0);
  }
  SUBCASE("inhomogeneous norm of a low mode is its zero block") {
    Field pw = plane_wave(g, 0, 2.0);
    CHECK(besov_norm(pw, 5.0, false, two) == doctest::Approx(2.0 * std::sqrt(2.0 * kPi)));
  }
}

TEST_CASE("comparability constants") {
  auto b0 = besov_sobolev_bounds(0.0);
  CHECK(b0.c1 > 0.6);
  CHECK(b0.c2 == doctest::Approx(1.0).epsilon(1e-6));
  for (double gamma : {-0.5, 0.0, 0.5, 1.0, 2.0}) {
    auto b = besov_sobolev_bounds(gamma);
    CHECK(b.c1 <= b.c2);
    for (int dim = 1; dim <= 2; ++dim) {
      auto g = make_grid(dim, 32, 13.0);
      for (std::uint64_t seed = 0; seed < 100; ++seed) {
        Field f = random_band_limited(g, seed, {.zero_mean = true});
        const double h = sobolev_norm(f, gamma, true, two);
        const double bes = besov_norm(f, gamma, true, two);
        CHECK(bes >= b.c1 * h * (1 - 1e-12));
        CHECK(bes <= b.c2 * h * (1 + 1e-12));
      }
    }
  }
}

TEST_CASE("monotonicity and interpolation on random fields") {
  auto g = make_grid(1, 128, 12.0);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Field f = random_band_limited(g, seed + 500);
    double prev = 0.0;
    for (double gamma : {-1.0, 0.0, 0.5, 1.0, 2.0}) {
      const double v = sobolev_norm(f, gamma, false, two);
      CHECK(v >= prev);
      prev = v;
    }
    const double h1 = sobolev_norm(f, 1.0, false, two);
    const double l2 = sobolev_norm(f, 0.0, false, two);
    for (double eps : {0.25, 0.5}) {
      const double lhs = sobolev_norm(f, 1.0 - eps, false, two);
      CHECK(lhs <= std::pow(h1, 1.0 - eps) * std::pow(l2, eps) * (1 + 1e-12));
    }
  }
}

TEST_CASE("weighted H^{k,k} norm") {
  auto g = make_grid(1, 512, 40.0);
  Field f = gaussian(g);
  SUBCASE("k = 0 is the L2 norm") {
    CHECK(weighted_norm_hkk(f, 0) == doctest::Approx(sobolev_norm(f, 0.0, false, two)).epsilon(1e-13));
  }
  SUBCASE("gaussian k = 1 closed form") {
    const double expected = std::sqrt(1.5 * std::sqrt(kPi)) + std::sqrt(0.5 * std::sqrt(kPi));
    CHECK(std::abs(weighted_norm_hkk(f, 1) / expected - 1.0) <= 1e-6);
  }
  SUBCASE("translation increases the norm") {
    double prev = 0.0;
    for (double x0 = 0.0; x0 <= 2.5; x0 += 0.5) {
      const double v = weighted_norm_hkk(gaussian(g, 1.0, 1.0, x0), 1);
      CHECK(v > prev);
      prev = v;
    }
  }
  SUBCASE("d = 2, k = 2 matches the multi-index sum") {
    auto g2 = make_grid(2, 64, 20.0);
    Field h = synthesize(g2, GaussianRecipe{1.0, 1.0, {}});
    // |alpha| = 0: ||<x>^2 u||; |alpha| = 1: two terms ||<x> d_i u||; |alpha| = 2: three terms.
    const double w0 = std::sqrt(5.0 * kPi);
    const double w1 = std::sqrt(1.5 * kPi);
    const double dxx = std::sqrt(kPi * 0.75);
    const double dxy = std::sqrt(kPi * 0.25);
    CHECK(weighted_norm_hkk(h, 2) == doctest::Approx(w0 + 2 * w1 + 2 * dxx + dxy).epsilon(1e-8));
  }
  SUBCASE("undecayed field rejected") {
    CHECK_THROWS_WITH_AS(weighted_norm_hkk(random_band_limited(g, 1), 1),
                         doctest::Contains("not decayed"), Error);
  }
  SUBCASE("negative k rejected") { CHECK_THROWS_AS(weighted_norm_hkk(f, -1), Error); }
}
