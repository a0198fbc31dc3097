#pragma once

// Galerkin-truncated time integration of the cubic Szego equation and of the
// higher Hamiltonian flows of the J_{2n} hierarchy, with conservation and
// isospectrality monitors.

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "szego/hardy.hpp"

namespace szego {

enum class Scheme { Rk4, Rk45 };

struct FlowConfig {
  double dt = 1e-3;
  double t_end = 1.0;
  Scheme scheme = Scheme::Rk4;
  std::size_t sample_every = 100;  // samples at multiples of dt * sample_every
  std::size_t K = 64;
  // rk45 controls
  double rtol = 1e-10;
  double atol = 1e-12;
  double dt_min = 1e-12;
  // monitors
  std::vector<double> hs_orders{1.0};
  bool monitor_spectrum = true;
  std::size_t spectrum_count = 8;  // leading eigenvalues of H_u^2 stored per sample

  /// Throws std::invalid_argument on dt <= 0, t_end < 0, K < 2, sample_every < 1.
  void validate() const;
};

/// Vector field selector: the Szego field or X_{J_{2n}}.
struct Field {
  enum class Kind { Szego, Hierarchy } kind = Kind::Szego;
  int n = 2;

  static Field szego() { return {}; }
  static Field hierarchy(int n) { return {Kind::Hierarchy, n}; }
};

struct StepDiagnostics {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  double last_dt = 0.0;
};

struct TimeSeries {
  std::vector<double> times;
  std::vector<FourierSymbol> states;
  std::vector<double> Q, M, E, J6, J8;
  std::map<double, std::vector<double>> hs;     // order s -> column
  std::vector<std::vector<double>> spectrum;    // leading eigenvalues per sample
  std::vector<double> spectrum_drift;           // max relative drift vs t = 0
  std::vector<double> lax_residual;             // filled by lax_residual_along
  std::vector<StepDiagnostics> steps;           // cumulative per sample

  std::size_t size() const noexcept { return times.size(); }
};

struct MonitorReport {
  std::map<std::string, double> conserved_drift;  // max relative drift per quantity
  double eigenvalue_drift = 0.0;
  double lax_residual = 0.0;
};

/// -i Pi(|u|^2 u), truncated back to the cutoff of u.
FourierSymbol rhs_szego(const FourierSymbol& u);

/// X_{J_{2n}}(u) = (1/2i) sum_j H^{2j}(1) H^{2n-2j-1}(1), products formed at
/// the expanded cutoff, then truncated to the cutoff of u when truncate is set.
FourierSymbol hierarchy_field(const FourierSymbol& u, int n, bool truncate = true);

/// Integrates from u0 (resized to cfg.K). Monitors are populated at every
/// sample; the Lax residual column is left for lax_residual_along.
TimeSeries integrate(const FourierSymbol& u0, const FlowConfig& cfg, Field field = Field::szego());

/// Recomputes the monitor columns of a series whose states are set.
void fill_monitors(TimeSeries& series, const FlowConfig& cfg);

/// 4 Im(X_{J_{2n}} | X_{J_{2p}}), exact for polynomial u.
double poisson_bracket(const FourierSymbol& u, int n, int p);

/// Central differences of gamma(t) against [B_u, H_u], plus eigenvalue and
/// conserved-quantity drift. Fills series.lax_residual. Needs >= 3 samples.
MonitorReport lax_residual_along(TimeSeries& series);

/// H^{1/2} distance (weight k + 1) from u to the torus
/// {alpha / (1 - p z) : |alpha| = a, |p| = r}. Grid search plus Newton
/// refinement; returns an upper bound on the infimum.
double torus_distance(const FourierSymbol& u, double a, double r);

struct TorusFit {
  double a = 0.0;
  double r = 0.0;
  double distance = 0.0;
};

/// Torus parameters (a, r) minimizing torus_distance(u, a, r).
TorusFit fit_torus(const FourierSymbol& u);

}  // namespace szego
