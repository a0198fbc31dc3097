#include "szego/waves.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "szego/flow.hpp"
#include "szego/hankel.hpp"
#include "szego/poly.hpp"
#include "szego/rational.hpp"

namespace szego {
namespace {

constexpr double kTailTol = 1e-14;

std::size_t geometric_cutoff(double ratio, std::size_t stride, std::size_t offset, std::size_t floor) {
  if (ratio <= 0.0) return std::max(floor, offset + 1);
  const auto m = static_cast<std::size_t>(std::ceil(std::log(kTailTol) / std::log(ratio)));
  return std::max(floor, offset + stride * m + 1);
}

}  // namespace

StationaryWave stationary_wave(const std::vector<cplx>& poles, cplx alpha, std::size_t K) {
  double rmax = 0.0;
  for (const cplx& p : poles) {
    if (!(std::abs(p) < 1.0)) throw std::invalid_argument("stationary_wave: pole outside the unit disc");
    rmax = std::max(rmax, std::abs(p));
  }
  if (K == 0) K = geometric_cutoff(rmax, 1, poles.size(), 16);

  std::vector<cplx> top{1.0};
  for (const cplx& p : poles) top = poly::multiply(top, {-std::conj(p), 1.0});
  auto c = poly::series_quotient(top, poly::from_reciprocal_roots(poles), K);
  for (auto& x : c) x *= alpha;

  StationaryWave w;
  w.u = FourierSymbol(std::move(c));
  w.omega = std::norm(alpha);
  for (const cplx& v : evaluate_on_grid(w.u, 256)) {
    w.modulus_defect = std::max(w.modulus_defect, std::abs(std::norm(v) - w.omega));
  }
  if (w.modulus_defect > 1e-11 * std::max(1.0, w.omega)) {
    throw NumericalError("stationary_wave: |u|^2 is not constant to 1e-11; increase K");
  }
  return w;
}

TravelingWave traveling_wave(int N, int ell, cplx p, cplx alpha, std::size_t K) {
  if (N < 1) throw std::invalid_argument("traveling_wave: N must be >= 1");
  if (ell < 0 || ell > N - 1) throw std::invalid_argument("traveling_wave: ell must lie in [0, N-1]");
  if (!(std::abs(p) > 0.0 && std::abs(p) < 1.0)) throw std::invalid_argument("traveling_wave: need 0 < |p| < 1");
  if (alpha == cplx{}) throw std::invalid_argument("traveling_wave: alpha must be nonzero");

  TravelingWave w;
  w.N = N;
  w.ell = ell;
  w.p = p;
  w.alpha = alpha;
  const cplx q = std::pow(p, N);
  w.S = std::norm(q);
  w.Q = std::norm(alpha) / (1.0 - w.S);
  w.c = w.Q / N;
  w.omega = w.Q / (1.0 - w.S) - ell * w.c;

  if (K == 0) K = geometric_cutoff(std::abs(q), static_cast<std::size_t>(N), static_cast<std::size_t>(ell), 64);
  Eigen::VectorXcd coeffs = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(K));
  cplx term = alpha;
  for (std::size_t k = static_cast<std::size_t>(ell); k < K; k += static_cast<std::size_t>(N)) {
    coeffs[static_cast<Eigen::Index>(k)] = term;
    term *= q;
  }
  w.u = FourierSymbol(std::move(coeffs));
  return w;
}

double wave_residual(const FourierSymbol& u, double c, double omega) {
  const std::size_t n = 2 * u.cutoff() - 1;
  FourierSymbol lhs = c * derivative_d(u) + cplx(omega) * u;
  return l2_norm(lhs.resized(n) - cubic_nonlinearity(u, n));
}

CommutatorReport commutator_check(const FourierSymbol& u, double c, std::optional<double> omega) {
  if (c == 0.0) throw std::invalid_argument("commutator_check: c must be nonzero");
  const std::size_t n = 2 * u.cutoff() - 1;
  const auto nn = static_cast<Eigen::Index>(n);

  Eigen::MatrixXcd A = toeplitz_matrix(modulus_squared(u), n).matrix * cplx(-1.0 / c);
  for (Eigen::Index k = 0; k < nn; ++k) A(k, k) += static_cast<double>(k);
  const Eigen::MatrixXcd G = hankel_matrix(u, n).gamma;
  const Eigen::MatrixXcd H2 = G * G.conjugate();

  CommutatorReport rep;
  rep.commutator_norm = spectral_norm(A * H2 - H2 * A);
  if (omega) {
    // antilinear products: A H -> A G, H A -> G conj(A), H^3 -> G conj(G) G
    const Eigen::MatrixXcd E = A * G + G * A.conjugate() + (*omega / c) * G + (1.0 / c) * (H2 * G);
    rep.eqop_residual = spectral_norm(E);
  }
  return rep;
}

double range_residual_of_one(const FourierSymbol& u, double tol) {
  const Eigen::MatrixXcd G = hankel_matrix(u, u.cutoff()).gamma;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(G, Eigen::ComputeThinU);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 1.0;
  // e_0 minus its projection onto the retained left singular vectors
  Eigen::VectorXcd r = Eigen::VectorXcd::Unit(s.size(), 0);
  for (Eigen::Index j = 0; j < s.size(); ++j) {
    if (s(j) > tol * s(0)) r -= svd.matrixU().col(j) * std::conj(svd.matrixU()(0, j));
  }
  return r.norm();
}

double orbit_error(const FourierSymbol& u0, double c, double omega, double t, double dt) {
  FlowConfig cfg;
  cfg.dt = dt;
  cfg.t_end = t;
  cfg.K = u0.cutoff();
  cfg.sample_every = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(t / dt)));
  cfg.monitor_spectrum = false;
  cfg.hs_orders.clear();
  const TimeSeries series = integrate(u0, cfg);
  const FourierSymbol exact = std::polar(1.0, -omega * t) * rotate(u0, -c * t);
  return l2_norm(series.states.back() - exact);
}

WaveCertificate certify_traveling_wave(int N, int ell, cplx p, cplx alpha, double orbit_time, double dt) {
  WaveCertificate cert;
  cert.wave = traveling_wave(N, ell, p, alpha);
  const auto& w = cert.wave;
  cert.residual = wave_residual(w.u, w.c, w.omega);
  const auto comm = commutator_check(w.u, w.c, w.omega);
  cert.commutator_norm = comm.commutator_norm;
  cert.eqop_residual = *comm.eqop_residual;
  cert.q_minus_nc = std::abs(mass(w.u) - N * w.c);
  cert.orbit_time = orbit_time;
  cert.orbit_error = orbit_error(w.u, w.c, w.omega, orbit_time, dt);
  cert.one_in_range = range_residual_of_one(w.u) < 1e-8;
  if (cert.one_in_range) cert.mtilde_relation = std::abs(w.Q - ((N - 1) * w.c + w.omega));
  return cert;
}

}  // namespace szego
