#include <doctest.h>

#include <cmath>
#include <random>

#include "support.hpp"
#include "szego/flow.hpp"
#include "szego/hankel.hpp"
#include "szego/rational.hpp"
#include "szego/waves.hpp"

using namespace szego;
using szego::test::max_abs_diff;

namespace {

FourierSymbol phi(cplx alpha, cplx p, std::size_t K) {
  std::vector<cplx> c(K);
  cplx t = alpha;
  for (auto& x : c) {
    x = t;
    t *= p;
  }
  return FourierSymbol(std::move(c));
}

FlowConfig quiet(std::size_t K, double t_end, double dt = 1e-3) {
  FlowConfig cfg;
  cfg.K = K;
  cfg.t_end = t_end;
  cfg.dt = dt;
  cfg.sample_every = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(t_end / dt / 10)));
  cfg.monitor_spectrum = false;
  cfg.hs_orders.clear();
  return cfg;
}

}  // namespace

TEST_CASE("Szego vector field") {
  CHECK(max_abs_diff(rhs_szego(FourierSymbol::constant(1.0)), FourierSymbol::constant(-kI)) < 1e-15);
  const cplx c{0.7, -1.2};
  CHECK(max_abs_diff(rhs_szego(FourierSymbol::constant(c)), FourierSymbol::constant(-kI * std::norm(c) * c)) < 1e-15);
  const auto u = FourierSymbol(std::vector<cplx>{1.0, 1.0}).resized(3);
  CHECK(max_abs_diff(rhs_szego(u), FourierSymbol(std::vector<cplx>{-3.0 * kI, -3.0 * kI, -kI})) < 1e-15);
}

TEST_CASE("hierarchy fields") {
  std::mt19937_64 rng(51);
  const auto u = test::random_poly(rng, 6);
  CHECK(max_abs_diff(hierarchy_field(u, 1), cplx(-0.5 * kI) * u) < 1e-14);
  CHECK(max_abs_diff(hierarchy_field(FourierSymbol::constant(1.0), 2), FourierSymbol::constant(-kI)) < 1e-15);
  CHECK(hierarchy_field(FourierSymbol(5), 3).is_zero());
  CHECK_THROWS_AS(hierarchy_field(u, 0), std::invalid_argument);
}

TEST_CASE("Poisson brackets vanish") {
  std::mt19937_64 rng(53);
  for (int trial = 0; trial < 5; ++trial) {
    const auto u = test::random_poly(rng, 5);
    const double scale = std::pow(l2_norm(u), 8);
    for (int n = 1; n <= 4; ++n)
      for (int p = n + 1; p <= 4; ++p) CHECK(std::abs(poisson_bracket(u, n, p)) < 1e-11 * scale);
    // {Q, M} with X_Q = -(i/2) u and X_M = -(i/2) D u
    const auto xq = cplx(-0.5 * kI) * u;
    const auto xm = cplx(-0.5 * kI) * derivative_d(u);
    CHECK(std::abs(4.0 * inner(xq, xm).imag()) < 1e-13 * mass(u) * 10);
  }
  CHECK(poisson_bracket(FourierSymbol(4), 2, 3) == 0.0);
}

TEST_CASE("integrator: constant solution") {
  const cplx c{0.6, 0.8};
  const auto s = integrate(FourierSymbol::constant(c).resized(8), quiet(8, 10.0));
  CHECK(s.times.back() == doctest::Approx(10.0));
  CHECK(std::abs(s.states.back()[0] - c * std::polar(1.0, -10.0)) < 1e-10);
}

TEST_CASE("integrator: M(1) orbit against the closed form") {
  const double t = 3.0;
  const auto s = integrate(phi(1.0, 0.5, 64), quiet(64, t));
  const auto [alpha, p] = m1_solution(1.0, 0.5, t);
  CHECK(l2_norm(s.states.back() - phi(alpha, p, 64)) < 1e-8);

  FlowConfig adaptive = quiet(64, t);
  adaptive.scheme = Scheme::Rk45;
  const auto a = integrate(phi(1.0, 0.5, 64), adaptive);
  CHECK(l2_norm(a.states.back() - phi(alpha, p, 64)) < 1e-8);
  CHECK(a.steps.back().accepted > 0);
}

TEST_CASE("integrator symmetries") {
  std::mt19937_64 rng(57);
  const auto u0 = cplx(0.5) * test::random_poly(rng, 4);
  const auto cfg = quiet(24, 1.0);
  const auto base = integrate(u0, cfg).states.back();

  SUBCASE("scaling u -> delta u(delta^2 t)") {
    const double delta = 0.5;
    const auto scaled = integrate(cplx(delta) * u0, quiet(24, 4.0)).states.back();
    CHECK(max_abs_diff(scaled, cplx(delta) * base) < 1e-10);
  }
  SUBCASE("phase") {
    const cplx g = std::polar(1.0, 0.7);
    CHECK(max_abs_diff(integrate(g * u0, cfg).states.back(), g * base) < 1e-12);
  }
  SUBCASE("rotation") {
    CHECK(max_abs_diff(integrate(rotate(u0, 1.1), cfg).states.back(), rotate(base, 1.1)) < 1e-12);
  }
}

TEST_CASE("Galerkin truncation conserves Q, M, E") {
  FlowConfig cfg = quiet(48, 2.0);
  cfg.monitor_spectrum = true;
  auto s = integrate(FourierSymbol(std::vector<cplx>{0.5, 1.0}), cfg);
  for (std::size_t i = 0; i < s.size(); ++i) {
    CHECK(std::abs(s.Q[i] - s.Q[0]) < 1e-10 * s.Q[0]);
    CHECK(std::abs(s.M[i] - s.M[0]) < 1e-10 * s.M[0]);
    CHECK(std::abs(s.E[i] - s.E[0]) < 1e-10 * s.E[0]);
  }
  const auto rep = lax_residual_along(s);
  CHECK(rep.conserved_drift.at("Q") < 1e-10);
  CHECK(rep.eigenvalue_drift < 1e-6);
}

TEST_CASE("J6 drift shrinks as K grows") {
  // rational initial datum; the drift comes from the truncation tail
  double prev = 1.0;
  for (std::size_t K : {16u, 32u, 64u}) {
    FlowConfig cfg = quiet(K, 2.0);
    auto s = integrate(phi(1.0, 0.6, K), cfg);
    double drift = 0.0;
    for (double j6 : s.J6) drift = std::max(drift, std::abs(j6 - s.J6[0]) / s.J6[0]);
    CHECK(drift <= 1.1 * prev);
    prev = drift;
  }
}

TEST_CASE("Lax residual along a stationary wave") {
  const auto w = stationary_wave({0.5}, 1.0, 48);
  FlowConfig cfg = quiet(48, 1.0);
  cfg.monitor_spectrum = true;
  cfg.sample_every = 1;
  auto s = integrate(w.u, cfg);
  const auto rep = lax_residual_along(s);
  CHECK(rep.eigenvalue_drift < 1e-10);
  CHECK(rep.lax_residual < 1e-5);
  CHECK(max_abs_diff(s.states.back(), std::polar(1.0, -w.omega) * w.u) < 1e-8);
}

TEST_CASE("torus distance") {
  const auto u = phi(std::polar(1.3, 0.4), std::polar(0.5, -1.0), 80);
  CHECK(torus_distance(u, 1.3, 0.5) < 1e-8);
  const double delta = 0.01;
  const auto v = phi(1.0, 0.5, 80) + FourierSymbol::monomial(2, delta);
  CHECK(torus_distance(v, 1.0, 0.5) <= delta * std::sqrt(3.0) + 1e-12);
  const auto fit = fit_torus(u);
  CHECK(fit.a == doctest::Approx(1.3).epsilon(1e-6));
  CHECK(fit.r == doctest::Approx(0.5).epsilon(1e-6));
  CHECK_THROWS_AS(torus_distance(u, 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("config validation") {
  FlowConfig cfg;
  cfg.dt = 0.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = FlowConfig{};
  cfg.K = 1;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}
