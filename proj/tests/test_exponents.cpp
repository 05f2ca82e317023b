#include <cmath>

#include "doctest.h"
#include "hwlab/exponents.hpp"
#include "hwlab/grid.hpp"

using namespace hwlab;

namespace {
Exponent E(double v) { return Exponent::finite(v); }
const Exponent inf = Exponent::infinity();
}  // namespace

TEST_CASE("exponent type") {
  CHECK(inf.is_infinite());
  CHECK(inf.reciprocal() == 0.0);
  CHECK_THROWS_AS(inf.value(), Error);
  CHECK_THROWS_AS(E(0.5), Error);
  CHECK(parse_exponent("inf").is_infinite());
  CHECK(parse_exponent("4").value() == 4.0);
  CHECK_THROWS_AS(parse_exponent("4x"), Error);
}

TEST_CASE("critical exponent") {
  CHECK(critical_exponent(1, 3) == 0.0);
  CHECK(critical_exponent(1, 5) == 0.25);
  CHECK(critical_exponent(2, 3) == 0.5);
  CHECK_THROWS_AS(critical_exponent(2, 1.0), Error);
  for (int d = 1; d <= 4; ++d) {
    for (double nu = 1.5; nu < 9.0; nu += 0.5) {
      CHECK(critical_exponent(d, nu + 0.5) > critical_exponent(d, nu));
      CHECK(critical_exponent(d + 1, nu) > critical_exponent(d, nu));
    }
  }
}

TEST_CASE("gamma_pq") {
  CHECK(gamma_pq(2, inf, E(2)) == 0.0);
  CHECK(gamma_pq(4, E(2), E(6)) == doctest::Approx(5.0 / 6.0));
  for (int d = 1; d <= 4; ++d) {
    for (double p : {1.0, 2.0, 3.0, 8.0}) CHECK(gamma_pq(d, E(p), E(2)) == doctest::Approx(-1.0 / p));
  }
}

TEST_CASE("admissibility") {
  auto a = is_admissible(4, E(2), E(6));
  CHECK(a.admissible);
  CHECK(a.sharp);
  auto b = is_admissible(3, E(2), inf);
  CHECK_FALSE(b.admissible);
  CHECK(b.reason.find("excluded") != std::string::npos);
  auto c = is_admissible(3, E(2), E(4));
  CHECK_FALSE(c.admissible);
  CHECK(c.reason.find("exceeds") != std::string::npos);
  CHECK_FALSE(is_admissible(2, E(4), E(8)).admissible);
  CHECK(is_admissible(2, E(6), E(6)).sharp);
  CHECK(is_admissible(2, E(4), inf).admissible);
  CHECK_FALSE(is_admissible(3, E(1.5), E(10)).admissible);
  CHECK_THROWS_AS(is_admissible(1, E(4), inf), Error);
}

TEST_CASE("gamma_pq is positive on admissible pairs with finite q") {
  int checked = 0;
  for (int d = 2; d <= 5; ++d) {
    for (double p = 2.0; p <= 40.0; p += 0.5) {
      for (double q = 2.0; q <= 40.0; q += 0.5) {
        if (!is_admissible(d, E(p), E(q)).admissible) continue;
        CHECK(gamma_pq(d, E(p), E(q)) > 0.0);
        ++checked;
      }
    }
  }
  CHECK(checked > 100);
}

TEST_CASE("subcritical check") {
  auto a = subcritical_check({2, 3, 1, 0.8});
  CHECK(a.holds);
  CHECK(a.threshold == 0.75);
  auto b = subcritical_check({3, 3, 1, 1.0});
  CHECK_FALSE(b.holds);
  CHECK(b.at_threshold);
  CHECK(b.reason.find("strict") != std::string::npos);
  CHECK(subcritical_check({3, 3, 1, 1.01}).holds);
  auto c = subcritical_check({2, 2.5, 1, 3.0});
  CHECK_FALSE(c.holds);
  CHECK_FALSE(c.smoothness_ok);
  CHECK(c.reason.find("smoothness") != std::string::npos);
  CHECK_THROWS_AS(subcritical_check({1, 3, 1, 1.0}), Error);
}

TEST_CASE("ill-posed range") {
  CHECK(illposed_range_check({1, 5, 1, 0.1}).in_range);
  CHECK_FALSE(illposed_range_check({1, 5, 1, -0.2}).in_range);
  CHECK(illposed_range_check({2, 2, 1, -1.5}).in_range);
  CHECK(illposed_range_check({1, 5, 1, -0.5}).in_range);
  CHECK_FALSE(illposed_range_check({1, 5, 1, 0.25}).in_range);
  auto z = illposed_range_check({1, 5, 1, 0.0});
  CHECK(z.in_range);
  CHECK(z.zero_boundary);
  CHECK(z.reason.find("decoherence") != std::string::npos);
  CHECK_THROWS_AS(illposed_range_check({1, 5, 3, 0.0}), Error);
}

TEST_CASE("small-dispersion parameters") {
  CHECK(smalldisp_parameters({1, 5, 1, 0.0}, 1e-2).theta == doctest::Approx(2.0));
  CHECK(smalldisp_parameters({1, 5, 1, 0.1}, 1e-2).theta == doctest::Approx(8.0 / 3.0));
  for (double delta : {0.5, 1e-1, 1e-3}) {
    auto p = smalldisp_parameters({1, 5, 1, 0.1}, delta);
    CHECK(p.epsilon_pred == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(p.lambda <= delta);
  }
  CHECK_THROWS_AS(smalldisp_parameters({1, 5, 1, 0.25}, 1e-2), Error);
  CHECK_THROWS_AS(smalldisp_parameters({1, 5, 1, 0.0}, 0.0), Error);
}

TEST_CASE("theta exceeds one across a sweep") {
  for (int d = 1; d <= 3; ++d) {
    for (double nu : {2.0, 3.0, 5.0}) {
      const double gc = critical_exponent(d, nu);
      for (double gamma = -2.0; gamma < gc; gamma += 0.05) {
        CHECK(smalldisp_parameters({d, nu, 1, gamma}, 0.5).theta > 1.0);
      }
    }
  }
}

TEST_CASE("exponent table") {
  const std::string t = exponent_table(2, 3);
  CHECK(t.find("gamma_c = 0.5") != std::string::npos);
  CHECK(t.find("(6, 6)") != std::string::npos);
  CHECK(t.find("threshold: gamma > 0.75") != std::string::npos);
}
