#pragma once

// Named families of initial data read from a Config ("initial.*" keys).
//
//   initial.family = phi       alpha, p         u = alpha / (1 - p z)
//   initial.family = z+eps     eps              u = z + eps
//   initial.family = mtilde1   a, b, p          u = (a z + b) / (1 - p z)
//   initial.family = constant  value            u = value
//   initial.family = coeffs    coeffs           Fourier coefficients
//   initial.family = rational  residues, poles  [, constant]
//
// "initial.u0 = phi(1, 0.5)" is shorthand for family + parameters, with
// "z+eps(0.1)", "mtilde1(a, b, p)" and "constant(c)" accepted likewise.
// "initial.perturbation = 2:0.01, 3:0.01i" adds c z^k terms.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "szego/config.hpp"
#include "szego/hardy.hpp"
#include "szego/rational.hpp"

namespace szego {

struct InitialData {
  std::string family;
  std::string description;
  std::function<FourierSymbol(std::size_t K)> fourier;
  /// Exact solution at time t, when the family has one and no perturbation.
  std::function<FourierSymbol(double t, std::size_t K)> exact;
  std::optional<RationalState> chart;   // M(N) / M~(N-1) chart coordinates
  std::optional<MTilde1State> mtilde1;  // (a, b, p) chart
  std::optional<double> eps;            // z + eps family parameter
  bool perturbed = false;
};

/// Reads initial.* keys. Throws ConfigError on malformed or out-of-range data.
InitialData read_initial_data(const Config& cfg);

}  // namespace szego
