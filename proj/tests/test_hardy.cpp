#include <doctest.h>

#include <cmath>
#include <random>

#include "support.hpp"
#include "szego/hardy.hpp"

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

// Triple loop over (k1, k2, k3) with k1 + k2 - k3 = n >= 0.
std::vector<cplx> brute_cubic(const FourierSymbol& u) {
  const int K = static_cast<int>(u.cutoff());
  std::vector<cplx> out(2 * K - 1);
  for (int a = 0; a < K; ++a)
    for (int b = 0; b < K; ++b)
      for (int c = 0; c < K; ++c) {
        const int n = a + b - c;
        if (n >= 0) out[n] += u[a] * u[b] * std::conj(u[c]);
      }
  return out;
}

}  // namespace

TEST_CASE("szego projector drops negative frequencies") {
  TwoSidedSymbol f(-1, {5.0, 1.0, 2.0});
  CHECK(szego_project(f) == FourierSymbol(std::vector<cplx>{1.0, 2.0}));
  CHECK(szego_project(TwoSidedSymbol(-3, {1.0, 2.0, 3.0, 0.0})).is_zero());
  const FourierSymbol u(std::vector<cplx>{1.0, {0.0, 2.0}, -3.0});
  CHECK(szego_project(TwoSidedSymbol::from_analytic(u)) == u);
}

TEST_CASE("projector is self-adjoint against analytic symbols") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<cplx> fc(13);
    for (auto& x : fc) x = test::cnormal(rng);
    TwoSidedSymbol f(-6, fc);
    const FourierSymbol g = test::random_poly(rng, 6);
    // (f|g) over all frequencies equals (Pi f|g) because g has no negative part.
    cplx full{};
    for (int k = 0; k <= 6; ++k) full += f[k] * std::conj(g[static_cast<std::size_t>(k)]);
    CHECK(std::abs(inner(szego_project(f), g) - full) < 1e-13);
    CHECK(szego_project(TwoSidedSymbol::from_analytic(szego_project(f))) == szego_project(f));
  }
}

TEST_CASE("symbols compare equal up to zero padding") {
  const FourierSymbol a(std::vector<cplx>{1.0, 2.0});
  CHECK(a == a.resized(7));
  CHECK_FALSE(a == FourierSymbol(std::vector<cplx>{1.0, 2.0, 1e-300}));
  CHECK_THROWS_AS(FourierSymbol(std::vector<cplx>{std::nan("")}), std::invalid_argument);
}

TEST_CASE("cubic nonlinearity") {
  CHECK(cubic_nonlinearity(FourierSymbol::constant(1.0)) == FourierSymbol::constant(1.0));
  CHECK(cubic_nonlinearity(FourierSymbol::monomial(1)) == FourierSymbol::monomial(1));
  const FourierSymbol one_plus_z(std::vector<cplx>{1.0, 1.0});
  CHECK(max_abs_diff(cubic_nonlinearity(one_plus_z), FourierSymbol(std::vector<cplx>{3.0, 3.0, 1.0})) < 1e-15);

  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const FourierSymbol u = test::random_poly(rng, 9);
    const FourierSymbol brute(brute_cubic(u));
    CHECK(cubic_nonlinearity(u).cutoff() == 19);
    CHECK(max_abs_diff(cubic_nonlinearity(u), brute) < 1e-12);
  }
}

TEST_CASE("functionals on z + eps") {
  const double eps = 0.3;
  const FourierSymbol u(std::vector<cplx>{eps, 1.0});
  const auto f = functionals(u);
  CHECK(f.Q == doctest::Approx(1 + eps * eps).epsilon(1e-15));
  CHECK(f.M == doctest::Approx(1.0).epsilon(1e-15));
  // |z + eps|^4 averages to (1 + eps^2)^2 + 2 eps^2
  CHECK(f.E == doctest::Approx(std::pow(1 + eps * eps, 2) + 2 * eps * eps).epsilon(1e-14));
}

TEST_CASE("functionals on phi_{alpha,p}") {
  const cplx alpha{0.8, -0.6}, p{0.3, 0.4};
  const double a2 = std::norm(alpha), r2 = std::norm(p);
  const auto u = phi(alpha, p, 200);
  const auto f = functionals(u);
  CHECK(f.Q == doctest::Approx(a2 / (1 - r2)).epsilon(1e-13));
  CHECK(f.E == doctest::Approx(a2 * a2 * (1 + r2) / std::pow(1 - r2, 3)).epsilon(1e-13));
}

TEST_CASE("H^s and L^p conventions") {
  const FourierSymbol u(std::vector<cplx>{1.0, 0.0, 2.0});
  // (1 + k^2)^s weights: 1 and 5^s
  CHECK(hs_norm(u, 1.0) == doctest::Approx(std::sqrt(1 + 4 * 5.0)));
  CHECK(hs_norm(u, 2.0) == doctest::Approx(std::sqrt(1 + 4 * 25.0)));
  CHECK(lp_norm(u, 2.0) == doctest::Approx(std::sqrt(mass(u))).epsilon(1e-14));
  // sup |1 + 2 z^2| = 3 is approached as p grows
  CHECK(lp_norm(u, 200.0, 4096) > 2.9);
  const double s[] = {0.5, 1.0};
  const double p[] = {4.0};
  const auto f = functionals(u, s, p);
  CHECK(f.hs_norms.size() == 2);
  CHECK(f.lp_norms.at(4.0) == doctest::Approx(std::pow(f.E, 0.25)).epsilon(1e-14));
  CHECK_THROWS_AS(lp_norm(u, 0.5), std::invalid_argument);
}

TEST_CASE("grid evaluation") {
  const auto one = evaluate_on_grid(FourierSymbol::constant(1.0), 4);
  for (const auto& v : one) CHECK(std::abs(v - 1.0) < 1e-15);
  const auto z = evaluate_on_grid(FourierSymbol::monomial(1), 4);
  const cplx expect[] = {1.0, kI, -1.0, -kI};
  for (int j = 0; j < 4; ++j) CHECK(std::abs(z[j] - expect[j]) < 1e-15);
  CHECK_THROWS_AS(evaluate_on_grid(FourierSymbol::constant(1.0), 0), std::invalid_argument);

  std::mt19937_64 rng(5);
  const auto u = test::random_poly(rng, 40);
  const auto vals = evaluate_on_grid(u, 96);
  CHECK(max_abs_diff(coefficients_from_grid(vals, u.cutoff()), u) < 1e-13);
}

TEST_CASE("Parseval and the H^{1/2} identity") {
  std::mt19937_64 rng(7);
  for (std::size_t K : {8u, 32u, 128u}) {
    const auto u = test::random_poly(rng, K - 1);
    double quad = 0.0;
    const auto vals = evaluate_on_grid(u, 4 * K);
    for (const auto& v : vals) quad += std::norm(v);
    quad /= static_cast<double>(vals.size());
    CHECK(std::abs(quad - mass(u)) < 1e-12 * mass(u));
    CHECK(std::abs(momentum(u) + mass(u) - h_half_norm_sq(u)) < 1e-12 * h_half_norm_sq(u));
  }
}

TEST_CASE("sharp inequality") {
  CHECK(std::abs(sharp_inequality_gap(phi(1.0, 0.5, 120))) < 1e-10);
  CHECK(std::abs(sharp_inequality_gap(FourierSymbol::constant(1.0))) < 1e-15);
  // 1 + z^2: Q = 2, M = 2, E = 6
  CHECK(sharp_inequality_gap(FourierSymbol(std::vector<cplx>{1.0, 0.0, 1.0})) == doctest::Approx(6.0));

  std::mt19937_64 rng(13);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    worst = std::min(worst, sharp_inequality_gap(test::random_poly(rng, 31)));
  }
  CHECK(worst >= -1e-10);
  for (int trial = 0; trial < 100; ++trial) {
    const auto u = phi(test::cnormal(rng), test::random_disc(rng, 0.7), 160);
    CHECK(std::abs(sharp_inequality_gap(u)) <= 1e-10);
  }
}
