#pragma once

// Finite sections of the Hankel operator H_u, Toeplitz operators, the Lax
// operator B_u and the quantities derived from them.

#include <optional>
#include <vector>

#include "szego/hardy.hpp"

namespace szego {

/// A real-linear map h -> m * h (linear) or h -> m * conj(h) (antilinear).
struct AntilinearOp {
  Eigen::MatrixXcd matrix;
  bool conjugating = false;

  FourierSymbol apply(const FourierSymbol& h) const;
  /// Spectral norm, which is the operator norm for either flag.
  double norm() const;
};

/// Largest singular value.
double spectral_norm(const Eigen::MatrixXcd& m);

/// (a o b)(h) = a(b(h)), tracking the conjugation flag.
AntilinearOp compose(const AntilinearOp& a, const AntilinearOp& b);
AntilinearOp operator+(const AntilinearOp& a, const AntilinearOp& b);
AntilinearOp operator-(const AntilinearOp& a, const AntilinearOp& b);
AntilinearOp operator*(cplx s, const AntilinearOp& a);

/// gamma(k, l) = u(k + l), zero where k + l >= cutoff of u.
struct HankelRep {
  Eigen::MatrixXcd gamma;
  std::size_t source_cutoff = 0;

  std::size_t size() const noexcept { return static_cast<std::size_t>(gamma.rows()); }
  AntilinearOp as_op() const { return {gamma, true}; }
  /// H_u^2 = gamma * conj(gamma)
  Eigen::MatrixXcd square() const { return gamma * gamma.conjugate(); }
};

struct ToeplitzRep {
  Eigen::MatrixXcd matrix;
};

struct SpectralData {
  std::vector<double> eigenvalues;  // descending
  Eigen::MatrixXcd eigenvectors;    // columns match eigenvalues
  std::size_t rank = 0;
  std::vector<double> sigma;        // elementary symmetric functions sigma_1..sigma_rank
  double trace_residual = 0.0;      // |sum eigenvalues - (M + Q)|
};

/// Requires k_op >= 1. A k_op smaller than the cutoff of u truncates
/// symbol information; callers that need exactness pass k_op >= cutoff.
HankelRep hankel_matrix(const FourierSymbol& u, std::size_t k_op);

/// gamma * conj(h). Throws when h does not fit the section.
FourierSymbol apply_hankel(const HankelRep& rep, const FourierSymbol& h);

/// Eigen-decomposition of H_u^2. rank counts eigenvalues above
/// rank_tol * lambda_max; the default rank_tol is k_op * machine epsilon.
SpectralData hankel_square_spectrum(const FourierSymbol& u, std::size_t k_op,
                                    std::optional<double> rank_tol = std::nullopt);

/// entry(k, j) = b(k - j)
ToeplitzRep toeplitz_matrix(const TwoSidedSymbol& b, std::size_t k_op);

/// (H_u^n(1) | 1), with H_u applied n times at the cutoff of u.
cplx conserved_J(const FourierSymbol& u, int n);

/// H_u^n(1) at the cutoff of u.
FourierSymbol hankel_power_of_one(const FourierSymbol& u, int n);

/// B_u = (i/2) H_u^2 - i T_{|u|^2}, a linear matrix.
Eigen::MatrixXcd lax_b_operator(const FourierSymbol& u, std::size_t k_op);

/// ||H_{Pi(|u|^2 u)} - (T H_u + H_u T - H_u^3)|| with T = T_{|u|^2}, at a
/// section size that makes every product exact for polynomial u.
double rio_residual(const FourierSymbol& u);

struct GenericityDet {
  double value = 0.0;
  /// value divided by the product of the diagonal entries, in [0, 1] for a
  /// Gram determinant.
  double scaled = 0.0;
};

/// det(J_{2(m+n)}(u))_{1 <= m,n <= N}
GenericityDet genericity_det(const FourierSymbol& u, int N);

}  // namespace szego
