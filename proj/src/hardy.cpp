#include "szego/hardy.hpp"

#include <algorithm>
#include <cmath>

namespace szego {
namespace {

bool all_finite(const Eigen::VectorXcd& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i].real()) || !std::isfinite(v[i].imag())) return false;
  }
  return true;
}

// e^{2 pi i j / m}, computed from the reduced index so large j*k stays exact.
std::vector<cplx> roots_of_unity(std::size_t m) {
  std::vector<cplx> w(m);
  for (std::size_t j = 0; j < m; ++j) {
    w[j] = std::polar(1.0, 2.0 * kPi * static_cast<double>(j) / static_cast<double>(m));
  }
  return w;
}

}  // namespace

FourierSymbol::FourierSymbol(std::size_t cutoff) {
  if (cutoff < 1) throw std::invalid_argument("FourierSymbol: cutoff must be positive");
  coeffs_ = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(cutoff));
}

FourierSymbol::FourierSymbol(std::vector<cplx> coeffs)
    : FourierSymbol(Eigen::Map<Eigen::VectorXcd>(coeffs.data(), static_cast<Eigen::Index>(coeffs.size()))
                        .eval()) {}

FourierSymbol::FourierSymbol(Eigen::VectorXcd coeffs) : coeffs_(std::move(coeffs)) {
  if (coeffs_.size() < 1) throw std::invalid_argument("FourierSymbol: cutoff must be positive");
  if (!all_finite(coeffs_)) throw std::invalid_argument("FourierSymbol: nonfinite coefficient");
}

FourierSymbol FourierSymbol::monomial(std::size_t k, cplx c) {
  FourierSymbol u(k + 1);
  u.coeffs_[static_cast<Eigen::Index>(k)] = c;
  return u;
}

std::vector<cplx> FourierSymbol::to_vector() const {
  return std::vector<cplx>(coeffs_.data(), coeffs_.data() + coeffs_.size());
}

FourierSymbol FourierSymbol::resized(std::size_t cutoff) const {
  FourierSymbol out(cutoff);
  const auto n = static_cast<Eigen::Index>(std::min(cutoff, this->cutoff()));
  out.coeffs_.head(n) = coeffs_.head(n);
  return out;
}

std::size_t FourierSymbol::degree() const noexcept {
  for (Eigen::Index k = coeffs_.size() - 1; k > 0; --k) {
    if (coeffs_[k] != cplx{}) return static_cast<std::size_t>(k);
  }
  return 0;
}

bool FourierSymbol::is_zero() const noexcept { return coeffs_.isZero(0.0); }

FourierSymbol& FourierSymbol::operator+=(const FourierSymbol& o) {
  if (o.cutoff() > cutoff()) *this = resized(o.cutoff());
  coeffs_.head(o.coeffs_.size()) += o.coeffs_;
  return *this;
}

FourierSymbol& FourierSymbol::operator-=(const FourierSymbol& o) {
  if (o.cutoff() > cutoff()) *this = resized(o.cutoff());
  coeffs_.head(o.coeffs_.size()) -= o.coeffs_;
  return *this;
}

FourierSymbol& FourierSymbol::operator*=(cplx s) {
  coeffs_ *= s;
  return *this;
}

bool operator==(const FourierSymbol& a, const FourierSymbol& b) {
  const std::size_t n = std::max(a.cutoff(), b.cutoff());
  for (std::size_t k = 0; k < n; ++k) {
    if (a[k] != b[k]) return false;
  }
  return true;
}

FourierSymbol operator+(FourierSymbol a, const FourierSymbol& b) { return a += b; }
FourierSymbol operator-(FourierSymbol a, const FourierSymbol& b) { return a -= b; }
FourierSymbol operator*(cplx s, FourierSymbol a) { return a *= s; }

TwoSidedSymbol::TwoSidedSymbol(int lowest, std::vector<cplx> coeffs)
    : lowest_(lowest), coeffs_(std::move(coeffs)) {
  if (lowest_ > 0) throw std::invalid_argument("TwoSidedSymbol: lowest frequency must be <= 0");
  if (coeffs_.empty()) coeffs_.push_back(0.0);
  for (const auto& c : coeffs_) {
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) {
      throw std::invalid_argument("TwoSidedSymbol: nonfinite coefficient");
    }
  }
}

TwoSidedSymbol TwoSidedSymbol::from_analytic(const FourierSymbol& u) { return TwoSidedSymbol(0, u.to_vector()); }

cplx TwoSidedSymbol::operator[](int k) const noexcept {
  if (k < lowest_ || k > highest()) return {};
  return coeffs_[static_cast<std::size_t>(k - lowest_)];
}

double TwoSidedSymbol::hermitian_defect() const noexcept {
  const int n = std::max(-lowest_, highest());
  double worst = 0.0;
  for (int k = 0; k <= n; ++k) worst = std::max(worst, std::abs((*this)[-k] - std::conj((*this)[k])));
  return worst;
}

cplx inner(const FourierSymbol& u, const FourierSymbol& v) {
  const auto n = static_cast<Eigen::Index>(std::min(u.cutoff(), v.cutoff()));
  // Eigen's dot conjugates its first argument.
  return v.coeffs().head(n).dot(u.coeffs().head(n));
}

double l2_norm(const FourierSymbol& u) { return u.coeffs().norm(); }

FourierSymbol szego_project(const TwoSidedSymbol& f) {
  const int hi = f.highest();
  if (hi < 0) return FourierSymbol(1);
  std::vector<cplx> out(static_cast<std::size_t>(hi) + 1);
  for (int k = 0; k <= hi; ++k) out[static_cast<std::size_t>(k)] = f[k];
  return FourierSymbol(std::move(out));
}

TwoSidedSymbol modulus_squared(const FourierSymbol& u) {
  const auto K = static_cast<int>(u.cutoff());
  const auto& c = u.coeffs();
  std::vector<cplx> out(static_cast<std::size_t>(2 * K - 1));
  // |u|^2 at frequency m is sum_j u(j + m) conj(u(j)).
  for (int m = 0; m < K; ++m) {
    cplx acc{};
    for (int j = 0; j + m < K; ++j) acc += c[j + m] * std::conj(c[j]);
    out[static_cast<std::size_t>(K - 1 + m)] = acc;
    out[static_cast<std::size_t>(K - 1 - m)] = std::conj(acc);
  }
  return TwoSidedSymbol(-(K - 1), std::move(out));
}

FourierSymbol multiply(const FourierSymbol& u, const FourierSymbol& v) {
  const auto& a = u.coeffs();
  const auto& b = v.coeffs();
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(a.size() + b.size() - 1);
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a[i] == cplx{}) continue;
    for (Eigen::Index j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  }
  return FourierSymbol(std::move(out));
}

FourierSymbol toeplitz_apply(const TwoSidedSymbol& b, const FourierSymbol& h, std::size_t out_cutoff) {
  FourierSymbol out(out_cutoff);
  Eigen::VectorXcd res = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(out_cutoff));
  const auto& hc = h.coeffs();
  for (Eigen::Index k = 0; k < res.size(); ++k) {
    cplx acc{};
    for (Eigen::Index j = 0; j < hc.size(); ++j) acc += b[static_cast<int>(k - j)] * hc[j];
    res[k] = acc;
  }
  return FourierSymbol(std::move(res));
}

FourierSymbol derivative_d(const FourierSymbol& u) {
  Eigen::VectorXcd c = u.coeffs();
  for (Eigen::Index k = 0; k < c.size(); ++k) c[k] *= static_cast<double>(k);
  return FourierSymbol(std::move(c));
}

FourierSymbol rotate(const FourierSymbol& u, double psi) {
  Eigen::VectorXcd c = u.coeffs();
  for (Eigen::Index k = 0; k < c.size(); ++k) c[k] *= std::polar(1.0, psi * static_cast<double>(k));
  return FourierSymbol(std::move(c));
}

namespace detail {

Eigen::VectorXcd cubic_projected(const Eigen::VectorXcd& c, Eigen::Index n_out) {
  const Eigen::Index K = c.size();
  // w = u^2, then Pi(|u|^2 u)(k) = sum_m w(k + m) conj(u(m)).
  std::vector<cplx> w(static_cast<std::size_t>(2 * K - 1), cplx{});
  for (Eigen::Index i = 0; i < K; ++i) {
    const cplx ci = c[i];
    if (ci == cplx{}) continue;
    w[static_cast<std::size_t>(2 * i)] += ci * ci;
    for (Eigen::Index j = i + 1; j < K; ++j) w[static_cast<std::size_t>(i + j)] += 2.0 * ci * c[j];
  }
  std::vector<cplx> cbar(static_cast<std::size_t>(K));
  for (Eigen::Index m = 0; m < K; ++m) cbar[static_cast<std::size_t>(m)] = std::conj(c[m]);

  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(n_out);
  const Eigen::Index wlen = 2 * K - 1;
  for (Eigen::Index k = 0; k < std::min(n_out, wlen); ++k) {
    cplx acc{};
    const Eigen::Index mmax = std::min(K, wlen - k);
    const cplx* wk = w.data() + k;
    for (Eigen::Index m = 0; m < mmax; ++m) acc += wk[m] * cbar[static_cast<std::size_t>(m)];
    out[k] = acc;
  }
  return out;
}

}  // namespace detail

FourierSymbol cubic_nonlinearity(const FourierSymbol& u, std::size_t out_cutoff) {
  const auto K = static_cast<Eigen::Index>(u.cutoff());
  const Eigen::Index n_out = out_cutoff == 0 ? 2 * K - 1 : static_cast<Eigen::Index>(out_cutoff);
  return FourierSymbol(detail::cubic_projected(u.coeffs(), n_out));
}

std::vector<cplx> evaluate_on_grid(const FourierSymbol& u, std::size_t m) {
  if (m < 1) throw std::invalid_argument("evaluate_on_grid: grid size must be positive");
  const auto w = roots_of_unity(m);
  std::vector<cplx> vals(m);
  const auto& c = u.coeffs();
  for (std::size_t j = 0; j < m; ++j) {
    cplx acc{};
    for (Eigen::Index k = 0; k < c.size(); ++k) acc += c[k] * w[(j * static_cast<std::size_t>(k)) % m];
    vals[j] = acc;
  }
  return vals;
}

FourierSymbol coefficients_from_grid(std::span<const cplx> values, std::size_t cutoff) {
  const std::size_t m = values.size();
  if (m < 1) throw std::invalid_argument("coefficients_from_grid: empty grid");
  const auto w = roots_of_unity(m);
  Eigen::VectorXcd c(static_cast<Eigen::Index>(cutoff));
  for (std::size_t k = 0; k < cutoff; ++k) {
    cplx acc{};
    for (std::size_t j = 0; j < m; ++j) acc += values[j] * std::conj(w[(j * k) % m]);
    c[static_cast<Eigen::Index>(k)] = acc / static_cast<double>(m);
  }
  return FourierSymbol(std::move(c));
}

double mass(const FourierSymbol& u) { return u.coeffs().squaredNorm(); }

double momentum(const FourierSymbol& u) {
  double acc = 0.0;
  const auto& c = u.coeffs();
  for (Eigen::Index k = 1; k < c.size(); ++k) acc += static_cast<double>(k) * std::norm(c[k]);
  return acc;
}

double energy(const FourierSymbol& u) {
  const auto vals = evaluate_on_grid(u, 4 * u.cutoff());
  double acc = 0.0;
  for (const auto& v : vals) acc += std::norm(v) * std::norm(v);
  return acc / static_cast<double>(vals.size());
}

double hs_norm(const FourierSymbol& u, double s) {
  double acc = 0.0;
  const auto& c = u.coeffs();
  for (Eigen::Index k = 0; k < c.size(); ++k) {
    acc += std::pow(1.0 + static_cast<double>(k) * static_cast<double>(k), s) * std::norm(c[k]);
  }
  return std::sqrt(acc);
}

double h_half_norm_sq(const FourierSymbol& u) {
  double acc = 0.0;
  const auto& c = u.coeffs();
  for (Eigen::Index k = 0; k < c.size(); ++k) acc += static_cast<double>(k + 1) * std::norm(c[k]);
  return acc;
}

double lp_norm(const FourierSymbol& u, double p, std::size_t grid) {
  if (!(p >= 1.0)) throw std::invalid_argument("lp_norm: p must be >= 1");
  const auto vals = evaluate_on_grid(u, std::max(4 * u.cutoff(), grid));
  double acc = 0.0;
  for (const auto& v : vals) acc += std::pow(std::abs(v), p);
  return std::pow(acc / static_cast<double>(vals.size()), 1.0 / p);
}

FunctionalSet functionals(const FourierSymbol& u, std::span<const double> s_list, std::span<const double> p_list) {
  if (!all_finite(u.coeffs())) throw std::invalid_argument("functionals: nonfinite coefficient");
  for (double p : p_list) {
    if (!(p >= 1.0)) throw std::invalid_argument("functionals: L^p exponent must be >= 1");
  }
  FunctionalSet f;
  f.Q = mass(u);
  f.M = momentum(u);
  f.E = energy(u);
  for (double s : s_list) f.hs_norms[s] = hs_norm(u, s);
  for (double p : p_list) f.lp_norms[p] = lp_norm(u, p);
  return f;
}

double sharp_inequality_gap(const FourierSymbol& u) {
  const double Q = mass(u);
  return Q * (Q + 2.0 * momentum(u)) - energy(u);
}

}  // namespace szego
