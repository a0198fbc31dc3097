#pragma once

#include <random>
#include <vector>

#include "szego/hardy.hpp"

namespace szego::test {

inline cplx cnormal(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  return {g(rng), g(rng)};
}

inline FourierSymbol random_poly(std::mt19937_64& rng, std::size_t degree) {
  std::vector<cplx> c(degree + 1);
  for (auto& x : c) x = cnormal(rng);
  return FourierSymbol(std::move(c));
}

// Point of the open disc with modulus at most rmax.
inline cplx random_disc(std::mt19937_64& rng, double rmax) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  return std::polar(rmax * std::sqrt(U(rng)), 2.0 * kPi * U(rng));
}

inline double max_abs_diff(const FourierSymbol& a, const FourierSymbol& b) {
  double m = 0.0;
  const std::size_t n = std::max(a.cutoff(), b.cutoff());
  for (std::size_t k = 0; k < n; ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

}  // namespace szego::test
