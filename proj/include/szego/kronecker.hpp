#pragma once

// Kronecker's theorem made numerical: Hankel rank detection and recovery of
// a rational symbol from its Fourier coefficients via the linear recurrence
// they satisfy.

#include <cstdint>
#include <vector>

#include "szego/hardy.hpp"
#include "szego/rational.hpp"

namespace szego {

/// Number of singular values of the K_op section of gamma above tol * sigma_max.
std::size_t numerical_rank(const FourierSymbol& u, std::size_t k_op, double tol = 1e-10);

/// sum_l c_l u(k + l) = 0 with ||c|| = 1; distinct roots of P(X) = sum c_l X^l.
struct RecurrenceModel {
  std::size_t order = 0;
  std::vector<cplx> c;
  std::vector<cplx> roots;
  std::vector<int> multiplicities;
};

/// u(k) = sum_{r=1}^{m} coeffs[r-1] binom(k + r - 1, r - 1) p^k for p != 0,
/// and u(k) = coeffs[k] for k < m when p = 0.
struct PoleTerm {
  cplx pole{};
  int multiplicity = 1;
  std::vector<cplx> coeffs;
};

struct RecoveryOptions {
  double null_tol = 1e-6;      // singular values below null_tol * sigma_max span the nullspace
  double cluster_tol = 1e-6;   // roots closer than this merge into one confluent pole
  double disc_margin = 1e-10;  // poles with |p| >= 1 - disc_margin are rejected
  bool polish = true;          // Gauss-Newton refinement for simple nonzero poles
};

struct RecoveryResult {
  RecurrenceModel model;
  std::vector<PoleTerm> terms;
  RationalSymbol symbol;
  double residual = 0.0;  // ||model coefficients - input||
  std::vector<double> singular_values;
};

/// Recovers a rank-N symbol from u(0..K-1), K >= 2N + 2. Throws
/// std::invalid_argument on a nullspace of dimension != 1 or a root outside
/// the disc.
RecoveryResult recover_rational(const std::vector<cplx>& coeffs, std::size_t N, const RecoveryOptions& opt = {});

/// Expands pole terms back into coefficients 0..K-1.
std::vector<cplx> expand_terms(const std::vector<PoleTerm>& terms, std::size_t K);

struct RoundtripReport {
  std::size_t N = 0;
  std::size_t K = 0;
  double noise = 0.0;
  std::size_t detected_rank = 0;
  std::vector<cplx> true_poles;       // with multiplicity
  std::vector<cplx> recovered_poles;  // matched to true_poles, with multiplicity
  std::vector<int> multiplicities;    // of the distinct recovered poles
  double max_pole_error = 0.0;
  double residual = 0.0;
};

/// rational -> Fourier (+ complex Gaussian noise of standard deviation
/// `noise`, seeded) -> recover -> pole error table.
RoundtripReport roundtrip_check(const RationalState& state, std::size_t K, double noise, std::uint64_t seed = 0);
/// Same for a symbol given as A / B, which admits repeated poles.
RoundtripReport roundtrip_check(const RationalSymbol& sym, std::size_t K, double noise, std::uint64_t seed = 0);

}  // namespace szego
