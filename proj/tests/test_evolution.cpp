#include <cmath>
#include <numbers>

#include "doctest.h"
#include "hwlab/evolution.hpp"
#include "hwlab/norms.hpp"
#include "support.hpp"

using namespace hwlab;
using testing::gaussian;
using testing::max_abs_diff;
using testing::rel_l2_diff;

namespace {

constexpr double kPi = std::numbers::pi;

EquationParams cubic(double delta = 1.0) { return {3.0, 1, delta, true}; }

}  // namespace

TEST_CASE("zero-dispersion flow") {
  auto g = make_grid(1, 256, 30.0);
  Field phi = gaussian(g, 1.0, 1.3);
  EquationParams p{5.0, -1, 0.3, true};
  SUBCASE("t = 0 is exact") { CHECK(max_abs_diff(zero_dispersion_flow(phi, 0.0, p), phi) == 0.0); }
  SUBCASE("modulus is invariant") {
    Field out = zero_dispersion_flow(phi, 17.0, p);
    for (std::size_t i = 0; i < phi.size(); ++i) CHECK(std::abs(std::abs(out[i]) - std::abs(phi[i])) <= 1e-15);
  }
  SUBCASE("group property") {
    Field two = zero_dispersion_flow(zero_dispersion_flow(phi, 0.7, p), 2.1, p);
    CHECK(max_abs_diff(two, zero_dispersion_flow(phi, 2.8, p)) <= 1e-13);
  }
  SUBCASE("explicit phase") {
    Field out = zero_dispersion_flow(phi, 2.0, p);
    const double m = std::abs(phi[100]);
    CHECK(std::abs(out[100] - phi[100] * std::polar(1.0, -2.0 * std::pow(m, 4.0))) < 1e-15);
  }
  SUBCASE("zero is a fixed point for non-integer nu") {
    Field z(g, Space::physical);
    EquationParams q{2.5, 1, 1.0, true};
    CHECK(l2_norm(zero_dispersion_flow(z, 3.0, q)) == 0.0);
  }
}

TEST_CASE("equation parameters are validated") {
  auto g = make_grid(1, 64, 30.0);
  Field phi = gaussian(g);
  CHECK_THROWS_AS(strang_step(phi, 0.1, {1.0, 1, 1.0, true}), Error);
  CHECK_THROWS_AS(strang_step(phi, 0.1, {3.0, 2, 1.0, true}), Error);
  CHECK_THROWS_AS(strang_step(phi, 0.1, {3.0, 1, 1.5, true}), Error);
  CHECK_THROWS_AS(strang_step(phi, 0.0, cubic()), Error);
}

TEST_CASE("strang step") {
  auto g = make_grid(1, 256, 30.0);
  Field phi = gaussian(g, 1.0, 1.2);
  SUBCASE("delta = 0 reproduces the exact flow") {
    EquationParams p{5.0, 1, 0.0, true};
    CHECK(max_abs_diff(strang_step(phi, 0.37, p), zero_dispersion_flow(phi, 0.37, p)) <= 1e-13);
  }
  SUBCASE("plane wave picks up a global phase") {
    const double k = 4 * g.frequency_step();
    const cplx a = 0.8;
    Field pw = synthesize(g, PlaneWaveRecipe{{k, 0, 0}, a});
    for (double nu : {2.5, 3.0, 7.0}) {
      EquationParams p{nu, 1, 1.0, true};
      const double dt = 0.05;
      Field expected = std::polar(1.0, dt * std::pow(0.8, nu - 1.0) + dt * k) * pw;
      CHECK(max_abs_diff(strang_step(pw, dt, p), expected) <= 1e-12);
    }
  }
  SUBCASE("time reversibility") {
    Field f = random_band_limited(g, 3);
    Field back = strang_step(strang_step(f, 0.01, cubic()), -0.01, cubic());
    CHECK(rel_l2_diff(back, f) <= 1e-11);
  }
  SUBCASE("blowup is signalled with its time") {
    Field huge = cplx(1e100) * phi;
    try {
      strang_step(huge, 0.01, {5.0, 1, 1.0, true});
      FAIL("expected blowup");
    } catch (const SolverBlowup& e) {
      CHECK(e.time() == 0.01);
      CHECK(std::string(e.what()).find("blowup") != std::string::npos);
    }
  }
}

TEST_CASE("second-order self-convergence") {
  auto g = make_grid(1, 256, 30.0);
  Field u0 = gaussian(g);
  const double dt = 0.02;
  Field ref = evolve_to(u0, 1.0, dt / 8, cubic());
  const double e1 = l2_norm(evolve_to(u0, 1.0, dt, cubic()) - ref);
  const double e2 = l2_norm(evolve_to(u0, 1.0, dt / 2, cubic()) - ref);
  const double ratio = e1 / e2;
  CHECK(ratio >= 3.6);
  CHECK(ratio <= 4.4);
}

TEST_CASE("conservation over T = 5") {
  auto g = make_grid(1, 1024, 40.0);
  Field u0 = gaussian(g);
  MonitorSpec mon{100, {}, 1e6, false};
  auto run = [&](double dt) {
    auto traj = evolve(u0, 5.0, dt, cubic(), mon);
    double mdrift = 0.0;
    double edrift = 0.0;
    const auto& first = traj.monitors.front();
    for (const auto& m : traj.monitors) {
      mdrift = std::max(mdrift, std::abs(m.mass - first.mass) / first.mass);
      edrift = std::max(edrift, std::abs(m.energy - first.energy));
    }
    return std::pair{mdrift, edrift};
  };
  auto [m1, e1] = run(1e-3);
  auto [m2, e2] = run(5e-4);
  CHECK(m1 <= 1e-11);
  CHECK(m2 <= 1e-11);
  CHECK(e1 <= 1e-5);
  CHECK(e1 / e2 >= 3.6);
  CHECK(e1 / e2 <= 4.4);
}

TEST_CASE("evolve bookkeeping") {
  auto g = make_grid(1, 128, 30.0);
  Field u0 = gaussian(g);
  SUBCASE("zero data stays zero") {
    Field z(g, Space::physical);
    auto traj = evolve(z, 1.0, 0.1, cubic());
    CHECK(traj.times.size() == 11);
    for (const auto& s : traj.states) CHECK(l2_norm(s) == 0.0);
  }
  SUBCASE("nodes, states and monitors agree") {
    auto traj = evolve(u0, 1.0, 0.01, cubic(), {7, {0.0, 1.0}, 1e6, true});
    CHECK(traj.times.size() == traj.states.size());
    CHECK(traj.times.size() == traj.monitors.size());
    for (std::size_t i = 1; i < traj.times.size(); ++i) CHECK(traj.times[i] > traj.times[i - 1]);
    CHECK(traj.times.back() == doctest::Approx(1.0));
    CHECK(traj.monitors.back().norms.size() == 2);
    CHECK(traj.monitors.back().nonlinear_integral == doctest::Approx(1.0).epsilon(0.3));
    CHECK(persistence_constant(traj, 1) >= 0.0);
  }
  SUBCASE("dt must divide T") { CHECK_THROWS_AS(evolve(u0, 1.0, 0.3, cubic()), Error); }
  SUBCASE("norm ceiling halts the run") {
    auto traj = evolve(u0, 1.0, 0.1, cubic(), {1, {1.0}, 0.5, false});
    CHECK(traj.halted);
    CHECK(traj.halt_reason.find("norm ceiling exceeded at t") != std::string::npos);
    CHECK(traj.times.size() == 2);
  }
}

TEST_CASE("mass and energy") {
  SUBCASE("plane wave") {
    auto g = make_grid(1, 64, 9.0);
    const cplx a(0.3, 0.4);
    const double k = 3 * g.frequency_step();
    Field pw = synthesize(g, PlaneWaveRecipe{{k, 0, 0}, a});
    for (int mu : {1, -1}) {
      EquationParams p{4.0, mu, 1.0, true};
      CHECK(mass(pw) == doctest::Approx(0.25 * 9.0).epsilon(1e-14));
      const double expected = 0.5 * k * 0.25 * 9.0 + mu / 5.0 * std::pow(0.5, 5.0) * 9.0;
      CHECK(energy(pw, p) == doctest::Approx(expected).epsilon(1e-13));
    }
  }
  SUBCASE("zero") {
    Field z(make_grid(2, 16, 3.0), Space::physical);
    CHECK(mass(z) == 0.0);
    CHECK(energy(z, cubic()) == 0.0);
  }
  SUBCASE("gaussian") {
    auto g = make_grid(1, 512, 40.0);
    Field f = gaussian(g);
    CHECK(mass(f) == doctest::Approx(std::sqrt(kPi)).epsilon(1e-12));
    // Lattice sum of |k| e^{-k^2} plus the exact potential term.
    double kinetic = 0.0;
    for (int m = -256; m < 256; ++m) {
      const double k = m * g.frequency_step();
      kinetic += std::abs(k) * std::exp(-k * k);
    }
    kinetic *= g.frequency_step();
    const double potential = 0.25 * std::sqrt(kPi / 2.0);
    CHECK(energy(f, cubic()) == doctest::Approx(0.5 * kinetic + potential).epsilon(1e-12));
    // The kinetic integral is 1 in closed form; a long box removes the lattice error.
    auto wide = make_grid(1, 8192, 640.0);
    CHECK(std::abs(energy(gaussian(wide), cubic()) - (0.5 + potential)) <= 2e-5);
  }
}

TEST_CASE("picard solver") {
  auto g = make_grid(1, 256, 30.0);
  Field u0 = gaussian(g);
  SUBCASE("zero data is a fixed point") {
    auto rep = picard_solve(Field(g, Space::physical), 0.1, 8, cubic(), 1e-12, 10);
    CHECK(rep.converged);
    CHECK(rep.iterations == 1);
  }
  SUBCASE("tiny horizon converges in one iteration") {
    auto rep = picard_solve(u0, 1e-4, 8, cubic(), 1e-3, 10);
    CHECK(rep.converged);
    CHECK(rep.iterations == 1);
  }
  SUBCASE("linear equation returns the free flow") {
    EquationParams lin = cubic();
    lin.nonlinear = false;
    auto rep = picard_solve(u0, 0.5, 8, lin, 1e-12, 5);
    CHECK(rep.iterations == 1);
    CHECK(rel_l2_diff(rep.trajectory.states.back(), propagate_linear(u0, 0.5, 1.0)) < 1e-13);
  }
  SUBCASE("matches the split-step solver") {
    auto rep = picard_solve(u0, 0.1, 65, cubic(), 1e-13, 50);
    CHECK(rep.converged);
    auto traj = evolve(u0, 0.1, 1e-4, cubic(), {25, {}, 1e6, true});
    REQUIRE(traj.states.size() == 41);
    for (std::size_t n = 0; n < 65; n += 16) {
      CHECK(rel_l2_diff(rep.trajectory.states[n], traj.states[n * 40 / 64]) <= 1e-6);
    }
    for (double f : rep.contraction_factors) CHECK(f < 1.0);
  }
  SUBCASE("contraction improves as T shrinks") {
    auto big = picard_solve(u0, 0.2, 33, cubic(), 1e-13, 50);
    auto small = picard_solve(u0, 0.05, 33, cubic(), 1e-13, 50);
    CHECK(small.contraction_factors.front() < big.contraction_factors.front());
  }
  SUBCASE("non-convergence is reported") {
    auto rep = picard_solve(cplx(3.0) * u0, 2.0, 16, cubic(), 1e-14, 3);
    CHECK_FALSE(rep.converged);
    CHECK(rep.increments.size() == 3);
  }
}

TEST_CASE("rescaling") {
  auto g = make_grid(1, 256, 40.0);
  Field phi = gaussian(g);
  SUBCASE("unit parameters") {
    Field out = rescale_solution(phi, 1.0, 1.0, 5.0);
    CHECK(out.grid() == g);
    CHECK(max_abs_diff(out, phi) == 0.0);
  }
  SUBCASE("L2 change of variables") {
    const double lambda = 1e-3;
    const double delta = 0.05;
    const double nu = 5.0;
    Field out = rescale_solution(phi, lambda, delta, nu);
    const double expected = std::pow(lambda, -1.0 / (nu - 1)) * std::pow(delta / lambda, -0.5) * l2_norm(phi);
    CHECK(l2_norm(out) == doctest::Approx(expected).epsilon(1e-13));
  }
  SUBCASE("homogeneous Sobolev scaling identity") {
    Field u0 = synthesize(g, MomentGaussianRecipe{1, 1.0, 1.0});
    const double nu = 3.0;
    for (double gamma : {-0.5, 0.5, 1.0}) {
      Field scaled = rescale_solution(u0, 2.0, 1.0, nu);
      const double lhs = sobolev_norm(scaled, gamma, true, Exponent::finite(2));
      const double rhs = std::pow(2.0, 0.5 - 1.0 / (nu - 1) - gamma) * sobolev_norm(u0, gamma, true, Exponent::finite(2));
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-8));
    }
  }
  SUBCASE("the equation is scale invariant") {
    Field u0 = gaussian(g);
    const double lambda = 2.0;
    Field direct = evolve_to(rescale_solution(u0, lambda, 1.0, 3.0), lambda * 0.5, lambda * 1e-3, cubic());
    Field mapped = rescale_solution(evolve_to(u0, 0.5, 1e-3, cubic()), lambda, 1.0, 3.0);
    CHECK(direct.grid() == mapped.grid());
    CHECK(rel_l2_diff(direct, mapped) <= 1e-12);
  }
}

TEST_CASE("zero-dispersion flow preserves every Lebesgue norm") {
  auto g = make_grid(2, 64, 20.0);
  Field phi = synthesize(g, GaussianRecipe{1.0, 2.0, {}});
  Field out = zero_dispersion_flow(phi, 5.0, {5.0, 1, 0.0, true});
  for (double q : {1.0, 2.0, 3.0, 7.5}) {
    CHECK(lq_norm(out, Exponent::finite(q)) == doctest::Approx(lq_norm(phi, Exponent::finite(q))).epsilon(1e-14));
  }
}
