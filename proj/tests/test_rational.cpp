#include <doctest.h>

#include <cmath>
#include <random>

#include "support.hpp"
#include "szego/flow.hpp"
#include "szego/hankel.hpp"
#include "szego/rational.hpp"

using namespace szego;
using szego::test::max_abs_diff;

namespace {

// Generic chart point with separated poles of modulus <= 0.6.
RationalState random_state(std::mt19937_64& rng, std::size_t n, bool with_constant) {
  RationalState s;
  while (s.poles.size() < n) {
    const cplx p = test::random_disc(rng, 0.6);
    bool ok = std::abs(p) > 0.1;
    for (const cplx& q : s.poles) ok = ok && std::abs(p - q) > 0.1;
    if (!ok) continue;
    s.poles.push_back(p);
    s.residues.push_back(0.5 * test::cnormal(rng));
  }
  if (with_constant) s.constant = 0.5 * test::cnormal(rng);
  return s;
}

// Coefficient velocities implied by a chart velocity, by the chain rule on
// u(k) = sum_j alpha_j p_j^k (+ c at k = 0).
FourierSymbol pushed_forward(const RationalState& s, const ChartVelocity& v, std::size_t K) {
  std::vector<cplx> out(K);
  for (std::size_t j = 0; j < s.size(); ++j) {
    cplx pk = 1.0, pkm1 = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
      out[k] += v.residues[j] * pk + s.residues[j] * static_cast<double>(k) * pkm1 * v.poles[j];
      pkm1 = pk;
      pk *= s.poles[j];
    }
  }
  if (s.constant) out[0] += v.constant;
  return FourierSymbol(std::move(out));
}

// -i Pi(|u|^2 u) at a cutoff where the rational tail is negligible.
FourierSymbol spectral_field(const RationalState& s, std::size_t K) {
  const auto u = rational_to_fourier(s, K);
  return rhs_szego(u).resized(K / 4);
}

}  // namespace

TEST_CASE("rational symbols to Fourier coefficients") {
  RationalState s{{1.0}, {0.0}, std::nullopt};
  CHECK(rational_to_fourier(s, 4) == FourierSymbol::constant(1.0));
  s.poles = {0.5};
  CHECK(max_abs_diff(rational_to_fourier(s, 3), FourierSymbol(std::vector<cplx>{1.0, 0.5, 0.25})) < 1e-16);
  CHECK(rational_tail_bound(s, 40) < 1e-11);
  CHECK_THROWS_AS((RationalState{{1.0, 1.0}, {0.5, 0.5 + 1e-10}, std::nullopt}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((RationalState{{1.0}, {1.0 - 1e-10}, std::nullopt}.validate()), std::invalid_argument);
}

TEST_CASE("reduced field for N = 1") {
  const cplx alpha{0.9, 0.3}, p{0.2, -0.5};
  const auto v = eqn_rhs({{alpha}, {p}, std::nullopt});
  const double a2 = std::norm(alpha), d = 1 - std::norm(p);
  CHECK(std::abs(kI * v.residues[0] - a2 * alpha / (d * d)) < 1e-14);
  CHECK(std::abs(kI * v.poles[0] - a2 * p / d) < 1e-14);

  const auto z = eqn_rhs({{1.0}, {0.0}, std::nullopt});
  CHECK(z.poles[0] == cplx{});
  const auto zc = eqn_rhs({{1.0}, {0.0}, cplx{0.5}});
  CHECK(zc.poles[0] == cplx{});
}

TEST_CASE("reduced field agrees with the spectral field") {
  std::mt19937_64 rng(61);
  constexpr std::size_t K = 256;
  for (std::size_t n : {1u, 2u, 3u}) {
    for (bool with_c : {false, true}) {
      CAPTURE(n);
      CAPTURE(with_c);
      const auto s = random_state(rng, n, with_c);
      const auto lhs = pushed_forward(s, eqn_rhs(s), K / 4);
      CHECK(max_abs_diff(lhs, spectral_field(s, K)) < 1e-10);
    }
  }
}

TEST_CASE("chart integration conserves S and S~") {
  std::mt19937_64 rng(67);
  RationalFlowConfig cfg;
  cfg.t_end = 5.0;
  cfg.sample_every = 500;
  const auto a = integrate_rational(random_state(rng, 2, false), cfg);
  for (double S : a.S) CHECK(std::abs(S - a.S.front()) < 1e-9 * std::max(a.S.front(), 1e-3));
  const auto b = integrate_rational(random_state(rng, 2, true), cfg);
  for (double S : b.S_tilde) CHECK(std::abs(S - b.S_tilde.front()) < 1e-9 * std::max(b.S_tilde.front(), 1e-3));
}

TEST_CASE("chart integration agrees with the spectral solver") {
  std::mt19937_64 rng(71);
  const auto s0 = random_state(rng, 2, false);
  RationalFlowConfig rc;
  rc.t_end = 5.0;
  rc.sample_every = 5000;
  const auto chart = integrate_rational(s0, rc);
  FlowConfig fc;
  fc.K = 128;
  fc.t_end = 5.0;
  fc.sample_every = 5000;
  fc.monitor_spectrum = false;
  fc.hs_orders.clear();
  const auto full = integrate(rational_to_fourier(s0, 128), fc);
  CHECK(l2_norm(full.states.back() - rational_to_fourier(chart.states.back(), 128)) < 1e-6);
}

TEST_CASE("closed-form M(1) orbit") {
  const auto [a0, p0] = m1_solution(1.0, 0.0, 2.0);
  CHECK(std::abs(a0 - std::polar(1.0, -2.0)) < 1e-15);
  CHECK(p0 == cplx{});
  const auto [omega, c] = m1_frequencies(1.0, 0.5);
  CHECK(omega == doctest::Approx(16.0 / 9.0));
  CHECK(c == doctest::Approx(4.0 / 3.0));

  RationalFlowConfig cfg;
  cfg.t_end = 10.0;
  cfg.sample_every = 10000;
  const auto s = integrate_rational({{1.0}, {0.5}, std::nullopt}, cfg);
  const auto [a, p] = m1_solution(1.0, 0.5, 10.0);
  CHECK(std::abs(s.states.back().residues[0] - a) < 1e-10);
  CHECK(std::abs(s.states.back().poles[0] - p) < 1e-10);
}

TEST_CASE("closed-form M~(1) orbit") {
  SUBCASE("u0 = z is stationary") {
    const auto [st, inv] = mtilde1_solution(1.0, 0.0, 0.0, 3.0);
    CHECK(inv.stationary);
    CHECK(inv.Q == doctest::Approx(1.0));
    CHECK(inv.M == doctest::Approx(1.0));
    CHECK(inv.S_tilde == doctest::Approx(1.0));
    CHECK(std::abs(st.a - std::polar(1.0, -3.0)) < 1e-14);
    CHECK(std::abs(st.b) < 1e-14);
    CHECK(std::abs(st.p) < 1e-14);
  }
  SUBCASE("u0 = z + eps") {
    const double eps = 0.1;
    const double Omega = eps * std::sqrt(4 + eps * eps);
    CHECK(mtilde1_invariants({1.0, eps, 0.0}).Omega == doctest::Approx(Omega).epsilon(1e-13));
    for (double t : {0.5, 7.0, 31.0, 60.0}) {
      const auto [st, inv] = mtilde1_solution(1.0, eps, 0.0, t);
      const double law = 2.0 / (4 + eps * eps) * (1 - std::cos(Omega * t));
      CHECK(std::abs(std::norm(st.p) - law) < 1e-12);
      CHECK(std::abs(st.mass() - inv.Q) < 1e-12);
      CHECK(std::abs(st.S_tilde() - inv.S_tilde) < 1e-12);
    }
  }
  SUBCASE("|f+-| at t = 0") {
    const cplx a{0.8, 0.1}, b{0.3, -0.2}, p{0.2, 0.3};
    const auto inv = mtilde1_invariants({a, b, p});
    CHECK(std::abs(inv.f_plus0) == doctest::Approx(std::sqrt(inv.r_plus) * (inv.Q - inv.r_minus)).epsilon(1e-10));
    CHECK(std::abs(inv.f_minus0) == doctest::Approx(std::sqrt(inv.r_minus) * (inv.r_plus - inv.Q)).epsilon(1e-10));
  }
  SUBCASE("agrees with the chart ODE") {
    const MTilde1State s0{{0.8, 0.1}, {0.3, -0.2}, {0.2, 0.3}};
    RationalFlowConfig cfg;
    cfg.t_end = 10.0;
    cfg.sample_every = 10000;
    const auto num = integrate_mtilde1(s0, cfg);
    const auto [ex, inv] = mtilde1_solution(s0.a, s0.b, s0.p, 10.0);
    CHECK(std::abs(num.states.back().a - ex.a) < 1e-10);
    CHECK(std::abs(num.states.back().b - ex.b) < 1e-10);
    CHECK(std::abs(num.states.back().p - ex.p) < 1e-10);
  }
}

TEST_CASE("|p(t)|^2 is a pure cosine between rho bounds") {
  const MTilde1State s0{{0.8, 0.1}, {0.3, -0.2}, {0.2, 0.3}};
  const auto inv = mtilde1_invariants(s0);
  const double period = 2 * kPi / inv.Omega;
  const int n = 8000;
  Eigen::MatrixXd A(n, 3);
  Eigen::VectorXd y(n);
  double lo = 1.0, hi = 0.0;
  for (int i = 0; i < n; ++i) {
    const double t = 2 * period * i / (n - 1);
    const double r = std::abs(mtilde1_solution(s0.a, s0.b, s0.p, t).first.p);
    A(i, 0) = 1.0;
    A(i, 1) = std::cos(inv.Omega * t);
    A(i, 2) = std::sin(inv.Omega * t);
    y(i) = r * r;
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  const Eigen::VectorXd x = A.colPivHouseholderQr().solve(y);
  CHECK((A * x - y).lpNorm<Eigen::Infinity>() < 1e-9);
  CHECK(lo >= inv.rho_min - 1e-12);
  CHECK(hi <= inv.rho_max + 1e-12);
  CHECK(hi > inv.rho_max - 1e-6);
  CHECK(lo < inv.rho_min + 1e-6);
}

TEST_CASE("Blaschke data") {
  SUBCASE("one pole") {
    const cplx p{0.3, 0.4};
    const RationalSymbol sym{{2.0}, {1.0, -p}};
    const auto d = blaschke_decompose(sym, 200);
    const auto bv = evaluate_on_grid(d.b, 256);
    const auto vv = evaluate_on_grid(d.v, 256);
    for (std::size_t j = 0; j < 256; ++j) {
      const cplx z = std::polar(1.0, 2 * kPi * static_cast<double>(j) / 256);
      CHECK(std::abs(bv[j] - (z - std::conj(p)) / (1.0 - p * z)) < 1e-12);
      CHECK(std::abs(vv[j] + p * bv[j]) < 1e-12);
      CHECK(std::abs(std::abs(vv[j]) - std::abs(p)) < 1e-12);
    }
    CHECK(d.S == doctest::Approx(std::norm(p)));
    CHECK_FALSE(d.w.has_value());
  }
  SUBCASE("z + eps") {
    const double eps = 0.25;
    const RationalSymbol sym{{eps, 1.0}, {1.0}};
    const auto d = blaschke_decompose(sym, 16);
    REQUIRE(d.w.has_value());
    REQUIRE(d.S_tilde.has_value());
    CHECK(*d.S_tilde == doctest::Approx(1.0));
    // H_u(w) = 1 forces w = z here.
    CHECK(max_abs_diff(*d.w, FourierSymbol::monomial(1)) < 1e-14);
    const auto u = sym.to_fourier(16);
    CHECK(max_abs_diff(apply_hankel(hankel_matrix(u, 16), *d.w), FourierSymbol::constant(1.0)) < 1e-14);
  }
  SUBCASE("modulus one and dist(u, ker H_u)^2 = S") {
    std::mt19937_64 rng(73);
    for (std::size_t n = 1; n <= 4; ++n) {
      const auto s = random_state(rng, n, false);
      const auto d = blaschke_decompose(to_symbol(s), 400);
      for (const auto& v : evaluate_on_grid(d.b, 256)) CHECK(std::abs(std::abs(v) - 1.0) < 1e-12);
      CHECK(mass(d.v) == doctest::Approx(d.S).epsilon(1e-10));
      CHECK(d.S == doctest::Approx(chart_S(s)).epsilon(1e-10));
    }
  }
}

TEST_CASE("evolution of v, b, prod p and a") {
  // Residuals come from central differences of the samples: second order in dt.
  auto run = [](double dt) {
    RationalFlowConfig cfg;
    cfg.t_end = 1.0;
    cfg.dt = dt;
    cfg.sample_every = 1;
    return std::pair{evolution_checks(integrate_rational({{1.0}, {0.5}, std::nullopt}, cfg)),
                     evolution_checks(integrate_mtilde1({{0.8, 0.1}, {0.3, -0.2}, {0.2, 0.3}}, cfg))};
  };
  const auto [m1, mt] = run(1e-3);
  const auto [m1h, mth] = run(5e-4);
  CHECK(m1.v_residual < 1e-5);
  CHECK(m1.b_residual < 1e-5);
  CHECK(m1.product_rate_residual < 1e-6);
  CHECK(mt.a_residual < 1e-6);
  CHECK(mt.w_residual < 1e-4);
  for (auto [coarse, fine] : {std::pair{m1.v_residual, m1h.v_residual}, std::pair{m1.b_residual, m1h.b_residual},
                              std::pair{m1.product_rate_residual, m1h.product_rate_residual},
                              std::pair{mt.a_residual, mth.a_residual}, std::pair{mt.w_residual, mth.w_residual}}) {
    CHECK(coarse / fine == doctest::Approx(4.0).epsilon(0.05));
  }
}

TEST_CASE("H^s growth on M~(1)") {
  const auto one = hs_growth_series({0.1}, 1.0);
  CHECK(one.rows[0].t_eps == doctest::Approx(kPi / (0.1 * std::sqrt(4.01))));
  CHECK(one.rows[0].t_eps == doctest::Approx(15.69).epsilon(1e-3));
  for (double s : {1.0, 2.0}) {
    const auto tab = hs_growth_series({0.1, 0.05, 0.025}, s);
    CHECK(std::abs(tab.slope - (2 * s - 1)) < 0.1 * (2 * s - 1));
  }
  // closed-form norm against the Fourier sum
  const MTilde1State st{{0.8, 0.1}, {0.3, -0.2}, {0.2, 0.3}};
  CHECK(mtilde1_hs_norm(st, 2.0) == doctest::Approx(hs_norm(st.to_fourier(300), 2.0)).epsilon(1e-12));

  const auto env = mtilde1_period_envelope({1.0, 0.1, 0.0}, 1.0);
  const auto inv = mtilde1_invariants({1.0, 0.1, 0.0});
  CHECK(std::isfinite(env.sup_hs));
  CHECK(env.sup_p == doctest::Approx(inv.rho_max).epsilon(1e-6));
}
