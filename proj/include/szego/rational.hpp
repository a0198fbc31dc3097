#pragma once

// Finite-dimensional invariant manifolds of rational symbols: chart
// coordinates and their ODEs, the closed-form solutions on M(1) and on
// M~(1), Blaschke products, and the H^s growth experiment.

#include <optional>
#include <utility>
#include <vector>

#include "szego/hardy.hpp"

namespace szego {

inline constexpr double kPoleCollisionTol = 1e-8;
inline constexpr double kCircleProximityTol = 1e-8;

/// u(z) = sum_j residues[j] / (1 - poles[j] z) (+ constant).
/// Without a constant this is the generic chart of M(N); with one, the
/// generic chart of M~(N-1) where N - 1 = poles.size().
struct RationalState {
  std::vector<cplx> residues;
  std::vector<cplx> poles;
  std::optional<cplx> constant;

  std::size_t size() const noexcept { return poles.size(); }
  /// Throws std::invalid_argument on shape mismatch, a pole at distance
  /// < kCircleProximityTol from the circle, or two poles closer than
  /// kPoleCollisionTol.
  void validate() const;
  cplx value(cplx z) const;
};

/// Time derivative of chart coordinates.
struct ChartVelocity {
  std::vector<cplx> residues;
  std::vector<cplx> poles;
  cplx constant{};
};

/// u(k) = sum_j alpha_j p_j^k (+ constant at k = 0).
FourierSymbol rational_to_fourier(const RationalState& state, std::size_t K);
/// Bound on the l2 norm of the coefficients at k >= K.
double rational_tail_bound(const RationalState& state, std::size_t K);

double chart_mass(const RationalState& state);
double chart_momentum(const RationalState& state);
/// |p_1 ... p_N|^2 (zero in the M~ chart).
double chart_S(const RationalState& state);
/// |alpha_N p_1 ... p_{N-1}|^2 in the M~ chart, zero otherwise.
double chart_S_tilde(const RationalState& state);

/// Right-hand side of the reduced system. Without a constant term this is
///   i alpha_j' = sum_k alpha_j^2 conj(alpha_k) / (1 - p_j conj(p_k))^2
///              + 2 sum_k sum_{l != j} alpha_j conj(alpha_k) alpha_l p_j
///                                     / ((p_j - p_l)(1 - p_j conj(p_k)))
///   i p_j'     = sum_k alpha_j conj(alpha_k) p_j / (1 - p_j conj(p_k))
/// and the constant term of the M~ chart enters through the residue of
/// |u|^2 u at each pole.
ChartVelocity eqn_rhs(const RationalState& state);

/// u = A / B with ascending coefficients, B(0) = 1 and no zeros of B in
/// the closed unit disc.
struct RationalSymbol {
  std::vector<cplx> numerator;
  std::vector<cplx> denominator;

  void validate() const;
  /// Rank of H_u: max(deg A + 1, deg B).
  std::size_t rank() const;
  /// p_j = 1 / (zeros of B); N - deg B further zero poles are appended.
  std::vector<cplx> poles() const;
  FourierSymbol to_fourier(std::size_t K) const;
  cplx value(cplx z) const;
};

RationalSymbol to_symbol(const RationalState& state);

struct RationalFlowConfig {
  double dt = 1e-3;
  double t_end = 1.0;
  std::size_t sample_every = 10;
};

struct RationalSeries {
  std::vector<double> times;
  std::vector<RationalState> states;
  std::vector<double> S;
  std::vector<double> S_tilde;
};

/// RK4 in chart coordinates. Aborts with NumericalError when poles
/// collide or approach the unit circle.
RationalSeries integrate_rational(const RationalState& state0, const RationalFlowConfig& cfg);

/// u(z) = (a z + b) / (1 - p z), a chart of M~(1) that includes p = 0.
struct MTilde1State {
  cplx a{}, b{}, p{};

  void validate() const;
  cplx value(cplx z) const;
  FourierSymbol to_fourier(std::size_t K) const;
  double mass() const;
  double momentum() const;
  double S_tilde() const { return std::norm(a); }
};

/// i a' = Q a, i b' = (M + Q) b + M a conj(p),
/// i p' = (a + b p)(conj(a) p + conj(b)) / (1 - |p|^2).
MTilde1State mtilde1_rhs(const MTilde1State& s);

struct MTilde1Series {
  std::vector<double> times;
  std::vector<MTilde1State> states;
  std::vector<double> S_tilde;
  std::vector<double> p_sq;
};

MTilde1Series integrate_mtilde1(const MTilde1State& s0, const RationalFlowConfig& cfg);

/// Closed-form M(1) orbit: alpha(t) = alpha0 e^{-i omega t},
/// p(t) = p0 e^{-i c t}.
std::pair<cplx, cplx> m1_solution(cplx alpha0, cplx p0, double t);
/// (omega, c) of the M(1) orbit through (alpha0, p0).
std::pair<double, double> m1_frequencies(cplx alpha0, cplx p0);

struct MTilde1Solution {
  double M = 0.0, Q = 0.0, S_tilde = 0.0;
  double r_plus = 0.0, r_minus = 0.0, Omega = 0.0;
  cplx f_plus0{}, f_minus0{};
  double rho_min = 0.0, rho_max = 0.0;
  bool stationary = false;
};

MTilde1Solution mtilde1_invariants(const MTilde1State& s0);
/// Closed-form evolution on M~(1); throws std::invalid_argument when the
/// input is not in M~(1).
std::pair<MTilde1State, MTilde1Solution> mtilde1_solution(cplx a0, cplx b0, cplx p0, double t);

/// prod_j (z - conj(p_j)) / (1 - p_j z)
cplx blaschke_value(const std::vector<cplx>& poles, cplx z);

struct BlaschkeData {
  std::vector<cplx> poles;  // N entries, zero poles included
  double S = 0.0;
  std::optional<double> S_tilde;
  std::optional<cplx> leading;  // a, leading numerator coefficient (M~ chart)
  FourierSymbol b;
  FourierSymbol v;              // 1 - P_u(1)
  std::optional<FourierSymbol> w;  // preimage of 1 under H_u (M~ chart)
};

/// Blaschke product of u = A/B, v = (-1)^N p_1...p_N b, and, when 1 lies in
/// the range of H_u, w = b / (conj(a) z). Symbols are expanded to cutoff K.
BlaschkeData blaschke_decompose(const RationalSymbol& sym, std::size_t K);
/// Throws std::invalid_argument when w is requested outside the M~ chart.
FourierSymbol blaschke_w(const RationalSymbol& sym, std::size_t K);

struct EvolutionReport {
  double v_residual = 0.0;         // max |i dv/dt - |u|^2 v| on the circle grid
  double b_residual = 0.0;         // max |i db/dt - (|u|^2 - Q) b|
  double product_rate_residual = 0.0;  // |i (prod p)'/(prod p) - Q|
  double a_residual = 0.0;         // |i a' - Q a| (M~ chart)
  double w_residual = 0.0;         // max |i dw/dt - |u|^2 w| (M~ chart)
};

EvolutionReport evolution_checks(const RationalSeries& series, std::size_t grid = 64);
EvolutionReport evolution_checks(const MTilde1Series& series, std::size_t grid = 64);

/// ||u||_{H^s} (weight (1 + k^2)^s) of (a z + b)/(1 - p z), summed in closed
/// form for integer s.
double mtilde1_hs_norm(const MTilde1State& s, double order);

struct HsGrowthRow {
  double eps = 0.0;
  double t_eps = 0.0;
  double hs_norm = 0.0;
};

struct HsGrowthTable {
  double order = 1.0;
  std::vector<HsGrowthRow> rows;
  double slope = 0.0;  // least-squares slope of log norm against log t_eps
};

/// Evaluates the exact solution from z + eps at t_eps = pi / (eps sqrt(4 + eps^2)).
HsGrowthTable hs_growth_series(const std::vector<double>& eps_list, double order);

struct PeriodEnvelope {
  double sup_hs = 0.0;
  double sup_p = 0.0;
  double inf_p = 0.0;
};

/// Samples one period of the M~(1) orbit through s0.
PeriodEnvelope mtilde1_period_envelope(const MTilde1State& s0, double order, std::size_t samples = 4096);

}  // namespace szego
