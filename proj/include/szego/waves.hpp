#pragma once

// Stationary and traveling waves u(t, z) = e^{-i omega t} u0(e^{-i c t} z),
// their construction from the classification formula, and certificates.

#include <optional>
#include <vector>

#include "szego/hardy.hpp"

namespace szego {

struct StationaryWave {
  FourierSymbol u;
  double omega = 0.0;
  double modulus_defect = 0.0;  // max | |u|^2 - omega | on a 256-point grid
};

/// u0 = alpha prod_j (z - conj(p_j)) / (1 - p_j z), omega = |alpha|^2.
/// K = 0 picks the cutoff from the pole moduli.
StationaryWave stationary_wave(const std::vector<cplx>& poles, cplx alpha, std::size_t K = 0);

struct TravelingWave {
  FourierSymbol u;
  int N = 1;
  int ell = 0;
  cplx p{};
  cplx alpha{};
  double c = 0.0;
  double omega = 0.0;
  double Q = 0.0;  // |alpha|^2 / (1 - S)
  double S = 0.0;  // |p|^{2N}
};

/// u0 = alpha z^ell / (1 - p^N z^N) with c = Q / N and
/// omega = Q / (1 - S) - ell c. K = 0 picks the smallest cutoff >= 64 with
/// geometric tail |p|^{N m} < 1e-14.
TravelingWave traveling_wave(int N, int ell, cplx p, cplx alpha, std::size_t K = 0);

/// || c D u + omega u - Pi(|u|^2 u) ||, all terms at cutoff 2K - 1.
double wave_residual(const FourierSymbol& u, double c, double omega);

struct CommutatorReport {
  double commutator_norm = 0.0;          // || [A, H_u^2] ||
  std::optional<double> eqop_residual;   // || A H + H A + (omega/c) H + (1/c) H^3 ||
};

/// A = D - (1/c) T_{|u|^2}; sections of size 2K - 1. Throws on c = 0.
CommutatorReport commutator_check(const FourierSymbol& u, double c, std::optional<double> omega = std::nullopt);

/// Least-squares residual of H_u x = 1, relative to ||1||; zero when 1 lies
/// in the range of H_u. Singular values below tol * sigma_max are dropped.
double range_residual_of_one(const FourierSymbol& u, double tol = 1e-10);

/// || u(t) - e^{-i omega t} u0(e^{-i c t} z) || with u(t) from RK4 at step dt.
double orbit_error(const FourierSymbol& u0, double c, double omega, double t, double dt = 1e-3);

struct WaveCertificate {
  TravelingWave wave;
  double residual = 0.0;
  double commutator_norm = 0.0;
  double eqop_residual = 0.0;
  double q_minus_nc = 0.0;
  double orbit_error = 0.0;
  double orbit_time = 0.0;
  bool one_in_range = false;
  /// |Q - ((N - 1) c + omega)| when 1 lies in the range of H_u.
  std::optional<double> mtilde_relation;
};

WaveCertificate certify_traveling_wave(int N, int ell, cplx p, cplx alpha, double orbit_time = 5.0,
                                       double dt = 1e-3);

}  // namespace szego
