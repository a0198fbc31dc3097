#include "szego/hankel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace szego {

FourierSymbol AntilinearOp::apply(const FourierSymbol& h) const {
  const auto n = matrix.cols();
  if (static_cast<Eigen::Index>(h.cutoff()) > n) {
    throw std::invalid_argument("AntilinearOp::apply: argument exceeds operator size");
  }
  Eigen::VectorXcd x = h.resized(static_cast<std::size_t>(n)).coeffs();
  if (conjugating) x = x.conjugate().eval();
  return FourierSymbol(Eigen::VectorXcd(matrix * x));
}

double spectral_norm(const Eigen::MatrixXcd& m) {
  if (m.size() == 0) return 0.0;
  // sqrt of the top eigenvalue of m^* m; far cheaper than an SVD and
  // accurate to rounding relative to ||m||.
  const Eigen::MatrixXcd g = m.cols() <= m.rows() ? Eigen::MatrixXcd(m.adjoint() * m) : Eigen::MatrixXcd(m * m.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(g, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

double AntilinearOp::norm() const { return spectral_norm(matrix); }

AntilinearOp compose(const AntilinearOp& a, const AntilinearOp& b) {
  // a(m_b conj^e(h)): an antilinear a conjugates m_b on the way through.
  Eigen::MatrixXcd m = a.conjugating ? Eigen::MatrixXcd(a.matrix * b.matrix.conjugate())
                                     : Eigen::MatrixXcd(a.matrix * b.matrix);
  return {std::move(m), a.conjugating != b.conjugating};
}

AntilinearOp operator+(const AntilinearOp& a, const AntilinearOp& b) {
  if (a.conjugating != b.conjugating) {
    throw std::invalid_argument("AntilinearOp: cannot add linear and antilinear maps");
  }
  return {a.matrix + b.matrix, a.conjugating};
}

AntilinearOp operator-(const AntilinearOp& a, const AntilinearOp& b) {
  if (a.conjugating != b.conjugating) {
    throw std::invalid_argument("AntilinearOp: cannot subtract linear and antilinear maps");
  }
  return {a.matrix - b.matrix, a.conjugating};
}

AntilinearOp operator*(cplx s, const AntilinearOp& a) { return {s * a.matrix, a.conjugating}; }

HankelRep hankel_matrix(const FourierSymbol& u, std::size_t k_op) {
  if (k_op < 1) throw std::invalid_argument("hankel_matrix: section size must be positive");
  const auto n = static_cast<Eigen::Index>(k_op);
  HankelRep rep;
  rep.source_cutoff = u.cutoff();
  rep.gamma = Eigen::MatrixXcd::Zero(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    for (Eigen::Index l = 0; l < n; ++l) rep.gamma(k, l) = u[static_cast<std::size_t>(k + l)];
  }
  return rep;
}

FourierSymbol apply_hankel(const HankelRep& rep, const FourierSymbol& h) {
  if (h.cutoff() > rep.size()) throw std::invalid_argument("apply_hankel: dimension mismatch");
  return rep.as_op().apply(h);
}

SpectralData hankel_square_spectrum(const FourierSymbol& u, std::size_t k_op, std::optional<double> rank_tol) {
  const HankelRep rep = hankel_matrix(u, k_op);
  Eigen::MatrixXcd h2 = rep.square();
  h2 = (0.5 * (h2 + h2.adjoint())).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h2);
  if (es.info() != Eigen::Success) throw NumericalError("hankel_square_spectrum: eigensolver did not converge");

  SpectralData out;
  const auto n = h2.rows();
  out.eigenvalues.resize(static_cast<std::size_t>(n));
  out.eigenvectors.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    // Eigen sorts ascending.
    out.eigenvalues[static_cast<std::size_t>(i)] = es.eigenvalues()(n - 1 - i);
    out.eigenvectors.col(i) = es.eigenvectors().col(n - 1 - i);
  }
  const double lmax = out.eigenvalues.empty() ? 0.0 : out.eigenvalues.front();
  const double tol = rank_tol.value_or(static_cast<double>(k_op) * std::numeric_limits<double>::epsilon());
  for (double l : out.eigenvalues) {
    if (l > tol * lmax && lmax > 0.0) ++out.rank;
  }
  // Elementary symmetric functions of the retained eigenvalues.
  std::vector<double> e(out.rank + 1, 0.0);
  e[0] = 1.0;
  for (std::size_t i = 0; i < out.rank; ++i) {
    for (std::size_t j = i + 1; j >= 1; --j) e[j] += e[j - 1] * out.eigenvalues[i];
  }
  out.sigma.assign(e.begin() + 1, e.end());

  double trace = 0.0;
  for (double l : out.eigenvalues) trace += l;
  out.trace_residual = std::abs(trace - (mass(u) + momentum(u)));
  return out;
}

ToeplitzRep toeplitz_matrix(const TwoSidedSymbol& b, std::size_t k_op) {
  const auto n = static_cast<Eigen::Index>(k_op);
  ToeplitzRep t{Eigen::MatrixXcd::Zero(n, n)};
  for (Eigen::Index k = 0; k < n; ++k) {
    for (Eigen::Index j = 0; j < n; ++j) t.matrix(k, j) = b[static_cast<int>(k - j)];
  }
  return t;
}

FourierSymbol hankel_power_of_one(const FourierSymbol& u, int n) {
  if (n < 0) throw std::invalid_argument("hankel_power_of_one: negative power");
  const HankelRep rep = hankel_matrix(u, u.cutoff());
  FourierSymbol h(u.cutoff());
  h = h + FourierSymbol::constant(1.0);
  for (int i = 0; i < n; ++i) h = apply_hankel(rep, h);
  return h;
}

cplx conserved_J(const FourierSymbol& u, int n) {
  if (n < 1) throw std::invalid_argument("conserved_J: n must be >= 1");
  return hankel_power_of_one(u, n)[0];
}

Eigen::MatrixXcd lax_b_operator(const FourierSymbol& u, std::size_t k_op) {
  const HankelRep rep = hankel_matrix(u, k_op);
  const ToeplitzRep t = toeplitz_matrix(modulus_squared(u), k_op);
  return 0.5 * kI * rep.square() - kI * t.matrix;
}

double rio_residual(const FourierSymbol& u) {
  const std::size_t d = u.degree();
  const FourierSymbol v = u.resized(d + 1);
  const std::size_t k_op = 4 * d + 1;
  const AntilinearOp h = hankel_matrix(v, k_op).as_op();
  const AntilinearOp t{toeplitz_matrix(modulus_squared(v), k_op).matrix, false};
  const AntilinearOp lhs = hankel_matrix(cubic_nonlinearity(v), k_op).as_op();
  const AntilinearOp rhs = compose(t, h) + compose(h, t) - compose(h, compose(h, h));
  return (lhs - rhs).norm();
}

GenericityDet genericity_det(const FourierSymbol& u, int N) {
  if (N < 1) throw std::invalid_argument("genericity_det: N must be >= 1");
  // J_{2j} for j = 2 .. 2N from successive applications of H_u^2.
  const HankelRep rep = hankel_matrix(u, u.cutoff());
  const Eigen::MatrixXcd h2 = rep.square();
  std::vector<double> J(static_cast<std::size_t>(2 * N + 1), 0.0);
  Eigen::VectorXcd x = Eigen::VectorXcd::Zero(h2.rows());
  x(0) = 1.0;
  for (int j = 1; j <= 2 * N; ++j) {
    x = (h2 * x).eval();
    J[static_cast<std::size_t>(j)] = x(0).real();
  }
  Eigen::MatrixXd G(N, N);
  double diag = 1.0;
  for (int m = 1; m <= N; ++m) {
    for (int n = 1; n <= N; ++n) G(m - 1, n - 1) = J[static_cast<std::size_t>(m + n)];
    diag *= G(m - 1, m - 1);
  }
  GenericityDet out;
  out.value = G.determinant();
  out.scaled = diag > 0.0 ? out.value / diag : 0.0;
  return out;
}

}  // namespace szego
