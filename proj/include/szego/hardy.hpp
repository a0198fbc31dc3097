#pragma once

// Truncated Fourier representation of functions in the Hardy space of the
// circle, the Szego projector, products, and the scalar functionals used
// throughout the library.

#include <complex>
#include <cstddef>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace szego {

using cplx = std::complex<double>;

inline constexpr cplx kI{0.0, 1.0};
inline constexpr double kPi = 3.14159265358979323846;

/// Raised when a computation leaves its numerically meaningful regime
/// (NaN, step underflow, chart singularity, eigensolver failure, ...).
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what, double time = 0.0)
      : std::runtime_error(what), time_(time) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

/// u(z) = sum_{k<K} coeffs[k] z^k. Coefficients at k >= K are zero.
class FourierSymbol {
 public:
  FourierSymbol() : coeffs_(Eigen::VectorXcd::Zero(1)) {}
  explicit FourierSymbol(std::size_t cutoff);
  explicit FourierSymbol(std::vector<cplx> coeffs);
  explicit FourierSymbol(Eigen::VectorXcd coeffs);

  static FourierSymbol constant(cplx c) { return FourierSymbol(std::vector<cplx>{c}); }
  /// c z^k
  static FourierSymbol monomial(std::size_t k, cplx c = 1.0);

  std::size_t cutoff() const noexcept { return static_cast<std::size_t>(coeffs_.size()); }
  /// Coefficient at frequency k; zero for k >= cutoff.
  cplx operator[](std::size_t k) const noexcept {
    return k < cutoff() ? coeffs_[static_cast<Eigen::Index>(k)] : cplx{};
  }
  const Eigen::VectorXcd& coeffs() const noexcept { return coeffs_; }
  std::vector<cplx> to_vector() const;

  /// Zero-pads or truncates to the requested cutoff.
  FourierSymbol resized(std::size_t cutoff) const;
  /// Index of the highest nonzero coefficient (0 for the zero symbol).
  std::size_t degree() const noexcept;
  bool is_zero() const noexcept;

  FourierSymbol& operator+=(const FourierSymbol& o);
  FourierSymbol& operator-=(const FourierSymbol& o);
  FourierSymbol& operator*=(cplx s);

  /// Equal iff zero-padding makes the coefficient sequences identical.
  friend bool operator==(const FourierSymbol& a, const FourierSymbol& b);

 private:
  Eigen::VectorXcd coeffs_;
};

FourierSymbol operator+(FourierSymbol a, const FourierSymbol& b);
FourierSymbol operator-(FourierSymbol a, const FourierSymbol& b);
FourierSymbol operator*(cplx s, FourierSymbol a);

/// Coefficients on frequencies lowest .. lowest + size - 1 (lowest <= 0).
class TwoSidedSymbol {
 public:
  TwoSidedSymbol(int lowest, std::vector<cplx> coeffs);
  static TwoSidedSymbol from_analytic(const FourierSymbol& u);

  int lowest() const noexcept { return lowest_; }
  int highest() const noexcept { return lowest_ + static_cast<int>(coeffs_.size()) - 1; }
  cplx operator[](int k) const noexcept;
  const std::vector<cplx>& coeffs() const noexcept { return coeffs_; }

  /// max_k |c(-k) - conj(c(k))|
  double hermitian_defect() const noexcept;

 private:
  int lowest_;
  std::vector<cplx> coeffs_;
};

/// (u|v) = sum u(k) conj(v(k))
cplx inner(const FourierSymbol& u, const FourierSymbol& v);
double l2_norm(const FourierSymbol& u);

/// Pi: drop negative frequencies.
FourierSymbol szego_project(const TwoSidedSymbol& f);

/// |u|^2 as a Hermitian two-sided symbol on frequencies -(K-1)..K-1.
TwoSidedSymbol modulus_squared(const FourierSymbol& u);

/// Exact product of two analytic symbols (cutoff Ku + Kv - 1).
FourierSymbol multiply(const FourierSymbol& u, const FourierSymbol& v);

/// Exact Pi(b h) for a two-sided b; result cutoff chosen by caller.
FourierSymbol toeplitz_apply(const TwoSidedSymbol& b, const FourierSymbol& h, std::size_t out_cutoff);

/// D u = sum k u(k) z^k
FourierSymbol derivative_d(const FourierSymbol& u);

/// u(e^{i psi} z)
FourierSymbol rotate(const FourierSymbol& u, double psi);

/// Pi(|u|^2 u) by exact convolution. out_cutoff = 0 selects 2K-1, the full
/// support of the projected product.
FourierSymbol cubic_nonlinearity(const FourierSymbol& u, std::size_t out_cutoff = 0);

namespace detail {
/// Pi(|u|^2 u) coefficients 0..n_out-1 from raw coefficients; no validation.
Eigen::VectorXcd cubic_projected(const Eigen::VectorXcd& c, Eigen::Index n_out);
}  // namespace detail

/// u(e^{i theta_j}) at theta_j = 2 pi j / m.
std::vector<cplx> evaluate_on_grid(const FourierSymbol& u, std::size_t m);

/// Discrete Fourier coefficients 0..K-1 of uniform grid samples.
FourierSymbol coefficients_from_grid(std::span<const cplx> values, std::size_t cutoff);

struct FunctionalSet {
  double Q = 0.0;
  double M = 0.0;
  double E = 0.0;
  std::map<double, double> hs_norms;
  std::map<double, double> lp_norms;
};

double mass(const FourierSymbol& u);
double momentum(const FourierSymbol& u);
/// E = mean of |u|^4 on the circle, by trapezoidal quadrature on 4K points.
double energy(const FourierSymbol& u);
/// ||u||_{H^s} with weight (1 + k^2)^s.
double hs_norm(const FourierSymbol& u, double s);
/// sum (k+1)|u(k)|^2, equal to M + Q.
double h_half_norm_sq(const FourierSymbol& u);
/// (mean |u|^p)^{1/p} on a grid of max(4K, grid) points.
double lp_norm(const FourierSymbol& u, double p, std::size_t grid = 0);

/// Q, M, E plus requested H^s and L^p norms. Rejects nonfinite input.
FunctionalSet functionals(const FourierSymbol& u, std::span<const double> s_list = {},
                          std::span<const double> p_list = {});

/// Q(Q + 2M) - E, which vanishes exactly on M(1) and is nonnegative elsewhere.
double sharp_inequality_gap(const FourierSymbol& u);

}  // namespace szego
