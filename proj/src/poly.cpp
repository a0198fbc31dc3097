#include "szego/poly.hpp"

#include <stdexcept>

#include <Eigen/Dense>

namespace szego::poly {

cplx eval(const std::vector<cplx>& c, cplx z) {
  cplx acc{};
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * z + *it;
  return acc;
}

std::vector<cplx> multiply(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  if (a.empty() || b.empty()) return {};
  std::vector<cplx> out(a.size() + b.size() - 1, cplx{});
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  }
  return out;
}

std::vector<cplx> from_reciprocal_roots(const std::vector<cplx>& p) {
  std::vector<cplx> out{1.0};
  for (const cplx& pj : p) out = multiply(out, {1.0, -pj});
  return out;
}

std::size_t degree(const std::vector<cplx>& c, double tol) {
  for (std::size_t k = c.size(); k-- > 1;) {
    if (std::abs(c[k]) > tol) return k;
  }
  return 0;
}

std::vector<cplx> roots(const std::vector<cplx>& c) {
  const std::size_t n = degree(c);
  if (n == 0) return {};
  if (c[n] == cplx{}) throw std::invalid_argument("poly::roots: zero polynomial");
  Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 1; i < n; ++i) comp(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i - 1)) = 1.0;
  for (std::size_t i = 0; i < n; ++i) comp(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(n - 1)) = -c[i] / c[n];
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(comp, false);
  if (es.info() != Eigen::Success) throw std::runtime_error("poly::roots: eigensolver failed");
  std::vector<cplx> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = es.eigenvalues()(static_cast<Eigen::Index>(i));
  return out;
}

std::vector<cplx> series_quotient(const std::vector<cplx>& a, const std::vector<cplx>& b, std::size_t n) {
  if (b.empty() || b[0] == cplx{}) throw std::invalid_argument("poly::series_quotient: b(0) must be nonzero");
  std::vector<cplx> out(n, cplx{});
  for (std::size_t k = 0; k < n; ++k) {
    cplx acc = k < a.size() ? a[k] : cplx{};
    for (std::size_t j = 1; j < b.size() && j <= k; ++j) acc -= b[j] * out[k - j];
    out[k] = acc / b[0];
  }
  return out;
}

}  // namespace szego::poly
