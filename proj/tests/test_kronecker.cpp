#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "support.hpp"
#include "szego/kronecker.hpp"

using namespace szego;

namespace {

std::vector<cplx> separated_poles(std::mt19937_64& rng, std::size_t n, double rmax, double sep) {
  std::vector<cplx> out;
  while (out.size() < n) {
    const cplx p = test::random_disc(rng, rmax);
    if (std::all_of(out.begin(), out.end(), [&](cplx q) { return std::abs(p - q) >= sep; })) out.push_back(p);
  }
  return out;
}

double nearest(const std::vector<cplx>& set, cplx p) {
  double d = 1e300;
  for (const cplx& q : set) d = std::min(d, std::abs(p - q));
  return d;
}

}  // namespace

TEST_CASE("numerical rank") {
  std::vector<cplx> geo(64);
  for (std::size_t k = 0; k < 64; ++k) geo[k] = std::pow(cplx(0.5, 0.2), static_cast<double>(k));
  CHECK(numerical_rank(FourierSymbol(geo), 32) == 1);
  CHECK(numerical_rank(FourierSymbol::monomial(1), 2) == 2);

  std::mt19937_64 rng(81);
  RationalState s;
  s.poles = separated_poles(rng, 4, 0.8, 0.1);
  for (std::size_t j = 0; j < 4; ++j) s.residues.push_back(test::cnormal(rng));
  CHECK(numerical_rank(rational_to_fourier(s, 256), 128) == 4);
}

TEST_CASE("recovery examples") {
  const cplx p{0.4, -0.3};
  std::vector<cplx> geo(16);
  for (std::size_t k = 0; k < 16; ++k) geo[k] = std::pow(p, static_cast<double>(k));
  const auto r = recover_rational(geo, 1);
  REQUIRE(r.terms.size() == 1);
  CHECK(std::abs(r.terms[0].pole - p) < 1e-12);
  CHECK(std::abs(r.terms[0].coeffs[0] - 1.0) < 1e-12);

  // z^m: a single pole at zero of multiplicity m + 1
  const std::size_t m = 3;
  std::vector<cplx> mono(16);
  mono[m] = 1.0;
  const auto z = recover_rational(mono, m + 1);
  REQUIRE(z.terms.size() == 1);
  CHECK(std::abs(z.terms[0].pole) < 1e-12);
  CHECK(z.terms[0].multiplicity == static_cast<int>(m + 1));
  CHECK(z.residual < 1e-12);

  RationalState two{{2.0, 1.0}, {0.3, {0.5, 0.2}}, std::nullopt};
  const auto c = rational_to_fourier(two, 40).to_vector();
  const auto rr = recover_rational(c, 2);
  REQUIRE(rr.terms.size() == 2);
  for (const auto& t : rr.terms) CHECK(nearest(two.poles, t.pole) < 1e-10);
  CHECK(rr.symbol.rank() == 2);
  CHECK_THROWS_AS(recover_rational(c, 3), std::invalid_argument);
}

TEST_CASE("expand_terms inverts recovery") {
  const std::vector<PoleTerm> terms{{0.5, 2, {1.0, {0.0, 1.0}}}, {0.0, 2, {3.0, 4.0}}};
  const auto c = expand_terms(terms, 30);
  // binom(k + 1, 1) = k + 1
  CHECK(std::abs(c[5] - (std::pow(0.5, 5) + kI * 6.0 * std::pow(0.5, 5))) < 1e-14);
  CHECK(std::abs(c[0] - (1.0 + kI + 3.0)) < 1e-14);
  CHECK(std::abs(c[1] - (0.5 + kI * 2.0 * 0.5 + 4.0)) < 1e-14);
  const auto r = recover_rational(c, 4);
  CHECK(r.residual < 1e-10);
}

TEST_CASE("roundtrips") {
  std::mt19937_64 rng(83);
  RationalState s;
  s.poles = separated_poles(rng, 3, 0.7, 0.05);
  for (int j = 0; j < 3; ++j) s.residues.push_back(test::cnormal(rng));
  const auto clean = roundtrip_check(s, 64, 0.0);
  CHECK(clean.detected_rank == 3);
  CHECK(clean.max_pole_error < 1e-9);

  const auto noisy = roundtrip_check(RationalState{{1.0}, {{0.4, 0.3}}, std::nullopt}, 64, 1e-8, 5);
  CHECK(noisy.max_pole_error < 1e-6);

  // (1 - p z)^{-2}
  const cplx p{0.35, -0.2};
  const RationalSymbol dbl{{1.0}, {1.0, -2.0 * p, p * p}};
  const auto conf = roundtrip_check(dbl, 64, 0.0);
  REQUIRE(conf.multiplicities.size() == 1);
  CHECK(conf.multiplicities[0] == 2);
  CHECK(conf.max_pole_error < 1e-9);

  const auto a = roundtrip_check(s, 64, 1e-9, 7);
  const auto b = roundtrip_check(s, 64, 1e-9, 7);
  CHECK(a.max_pole_error == b.max_pole_error);
}

TEST_CASE("rank and recovery over random M(N)") {
  std::mt19937_64 rng(89);
  for (std::size_t N = 1; N <= 6; ++N) {
    for (int trial = 0; trial < 3; ++trial) {
      RationalState s;
      s.poles = separated_poles(rng, N, 0.9, 0.05);
      for (std::size_t j = 0; j < N; ++j) s.residues.push_back(test::cnormal(rng));
      const auto u = rational_to_fourier(s, 128);
      CHECK(numerical_rank(u, 64) == N);
      const auto rep = roundtrip_check(s, 128, 0.0);
      CHECK(rep.max_pole_error < 1e-9);
    }
  }
}
