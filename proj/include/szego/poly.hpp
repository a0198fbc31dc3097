#pragma once

// Small polynomial toolbox. Coefficients are stored in ascending order:
// p(z) = c[0] + c[1] z + ... + c[n] z^n.

#include <complex>
#include <vector>

namespace szego::poly {

using cplx = std::complex<double>;

cplx eval(const std::vector<cplx>& c, cplx z);
std::vector<cplx> multiply(const std::vector<cplx>& a, const std::vector<cplx>& b);
/// prod_j (1 - p_j z)
std::vector<cplx> from_reciprocal_roots(const std::vector<cplx>& p);
/// Index of the highest coefficient with modulus above tol (0 for zero).
std::size_t degree(const std::vector<cplx>& c, double tol = 0.0);
/// Roots via companion-matrix eigenvalues; leading zeros are stripped.
std::vector<cplx> roots(const std::vector<cplx>& c);
/// First n Taylor coefficients of a(z) / b(z), b(0) != 0.
std::vector<cplx> series_quotient(const std::vector<cplx>& a, const std::vector<cplx>& b, std::size_t n);

}  // namespace szego::poly
