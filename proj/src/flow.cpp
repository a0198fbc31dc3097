#include "szego/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "szego/hankel.hpp"

namespace szego {
namespace {

bool finite(const Eigen::VectorXcd& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i].real()) || !std::isfinite(v[i].imag())) return false;
  }
  return true;
}

Eigen::VectorXcd evaluate_field(const Eigen::VectorXcd& y, const Field& field, double t) {
  if (!finite(y)) throw NumericalError("integrate: nonfinite state at t = " + std::to_string(t), t);
  if (field.kind == Field::Kind::Szego) return -kI * detail::cubic_projected(y, y.size());
  return hierarchy_field(FourierSymbol(y), field.n).coeffs();
}

struct Integrator {
  const FlowConfig& cfg;
  const Field& field;
  StepDiagnostics diag;
  double h_adapt;
  double err_prev = 1.0;

  Eigen::VectorXcd f(const Eigen::VectorXcd& y, double t) const { return evaluate_field(y, field, t); }

  Eigen::VectorXcd rk4(const Eigen::VectorXcd& y, double t, double h) const {
    const Eigen::VectorXcd k1 = f(y, t);
    const Eigen::VectorXcd k2 = f(y + 0.5 * h * k1, t + 0.5 * h);
    const Eigen::VectorXcd k3 = f(y + 0.5 * h * k2, t + 0.5 * h);
    const Eigen::VectorXcd k4 = f(y + h * k3, t + h);
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }

  // Fixed steps of size <= dt covering [t0, t1].
  Eigen::VectorXcd advance_rk4(Eigen::VectorXcd y, double t0, double t1) {
    const double span = t1 - t0;
    const auto n = static_cast<std::size_t>(std::max(1.0, std::ceil(span / cfg.dt - 1e-9)));
    const double h = span / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
      y = rk4(y, t0 + static_cast<double>(i) * h, h);
      ++diag.accepted;
    }
    diag.last_dt = h;
    if (!finite(y)) throw NumericalError("integrate: nonfinite state at t = " + std::to_string(t1), t1);
    return y;
  }

  // Dormand-Prince 5(4) with PI step control, landing exactly on t1.
  Eigen::VectorXcd advance_rk45(Eigen::VectorXcd y, double t0, double t1) {
    static constexpr double a21 = 1.0 / 5, a31 = 3.0 / 40, a32 = 9.0 / 40, a41 = 44.0 / 45, a42 = -56.0 / 15,
                            a43 = 32.0 / 9, a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729, a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656, b1 = 35.0 / 384, b3 = 500.0 / 1113,
                            b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84, e1 = 71.0 / 57600,
                            e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200, e6 = 22.0 / 525,
                            e7 = -1.0 / 40;
    double t = t0;
    while (t < t1) {
      double h = std::min(h_adapt, t1 - t);
      const bool clipped = h < h_adapt;
      if (h < cfg.dt_min) throw NumericalError("integrate: step-size underflow at t = " + std::to_string(t), t);
      const Eigen::VectorXcd k1 = f(y, t);
      const Eigen::VectorXcd k2 = f(y + h * a21 * k1, t + h / 5);
      const Eigen::VectorXcd k3 = f(y + h * (a31 * k1 + a32 * k2), t + 3 * h / 10);
      const Eigen::VectorXcd k4 = f(y + h * (a41 * k1 + a42 * k2 + a43 * k3), t + 4 * h / 5);
      const Eigen::VectorXcd k5 = f(y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4), t + 8 * h / 9);
      const Eigen::VectorXcd k6 = f(y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5), t + h);
      const Eigen::VectorXcd y5 = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
      const Eigen::VectorXcd k7 = f(y5, t + h);
      const Eigen::VectorXcd err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

      double acc = 0.0;
      for (Eigen::Index i = 0; i < y.size(); ++i) {
        const double scale = cfg.atol + cfg.rtol * std::max(std::abs(y[i]), std::abs(y5[i]));
        acc += std::norm(err[i]) / (scale * scale);
      }
      const double en = std::sqrt(acc / static_cast<double>(y.size()));
      if (!std::isfinite(en)) throw NumericalError("integrate: nonfinite error estimate at t = " + std::to_string(t), t);

      if (en <= 1.0) {
        y = y5;
        t = (t1 - (t + h) < 1e-14 * std::max(1.0, t1)) ? t1 : t + h;
        ++diag.accepted;
        diag.last_dt = h;
        const double fac = en == 0.0 ? 5.0 : 0.9 * std::pow(en, -0.7 / 5.0) * std::pow(err_prev, 0.4 / 5.0);
        err_prev = std::max(en, 1e-4);
        if (!clipped) h_adapt = h * std::clamp(fac, 0.2, 5.0);
      } else {
        ++diag.rejected;
        h_adapt = h * std::clamp(0.9 * std::pow(en, -0.2), 0.2, 1.0);
      }
    }
    return y;
  }
};

double rel_drift(double x, double x0) { return std::abs(x - x0) / std::max(std::abs(x0), 1e-300); }

}  // namespace

void FlowConfig::validate() const {
  if (!(dt > 0.0)) throw std::invalid_argument("FlowConfig: dt must be positive");
  if (!(t_end >= 0.0)) throw std::invalid_argument("FlowConfig: t_end must be nonnegative");
  if (K < 2) throw std::invalid_argument("FlowConfig: K must be >= 2");
  if (sample_every < 1) throw std::invalid_argument("FlowConfig: sample_every must be >= 1");
  if (scheme == Scheme::Rk45 && !(rtol > 0.0 && atol > 0.0)) {
    throw std::invalid_argument("FlowConfig: rk45 tolerances must be positive");
  }
}

FourierSymbol rhs_szego(const FourierSymbol& u) {
  return FourierSymbol(Eigen::VectorXcd(-kI * detail::cubic_projected(u.coeffs(), u.coeffs().size())));
}

FourierSymbol hierarchy_field(const FourierSymbol& u, int n, bool truncate) {
  if (n < 1) throw std::invalid_argument("hierarchy_field: n must be >= 1");
  const std::size_t K = u.cutoff();
  const HankelRep rep = hankel_matrix(u, K);
  std::vector<FourierSymbol> powers;
  powers.reserve(static_cast<std::size_t>(2 * n));
  powers.push_back(FourierSymbol::constant(1.0).resized(K));
  for (int k = 1; k < 2 * n; ++k) powers.push_back(apply_hankel(rep, powers.back()));

  FourierSymbol sum(2 * K - 1);
  for (int j = 0; j < n; ++j) {
    sum += multiply(powers[static_cast<std::size_t>(2 * j)], powers[static_cast<std::size_t>(2 * n - 2 * j - 1)]);
  }
  sum *= 1.0 / (2.0 * kI);
  return truncate ? sum.resized(K) : sum;
}

void fill_monitors(TimeSeries& s, const FlowConfig& cfg) {
  const std::size_t n = s.states.size();
  s.Q.assign(n, 0.0);
  s.M.assign(n, 0.0);
  s.E.assign(n, 0.0);
  s.J6.assign(n, 0.0);
  s.J8.assign(n, 0.0);
  s.hs.clear();
  for (double order : cfg.hs_orders) s.hs[order].assign(n, 0.0);
  s.spectrum.assign(n, {});
  s.spectrum_drift.assign(n, 0.0);

  for (std::size_t i = 0; i < n; ++i) {
    const FourierSymbol& u = s.states[i];
    s.Q[i] = mass(u);
    s.M[i] = momentum(u);
    s.E[i] = energy(u);
    const FourierSymbol h6 = hankel_power_of_one(u, 6);
    s.J6[i] = h6[0].real();
    const HankelRep rep = hankel_matrix(u, u.cutoff());
    s.J8[i] = apply_hankel(rep, apply_hankel(rep, h6))[0].real();
    for (double order : cfg.hs_orders) s.hs[order][i] = hs_norm(u, order);
    if (cfg.monitor_spectrum) {
      const SpectralData sd = hankel_square_spectrum(u, u.cutoff());
      const std::size_t m = std::min(cfg.spectrum_count, sd.eigenvalues.size());
      s.spectrum[i].assign(sd.eigenvalues.begin(), sd.eigenvalues.begin() + static_cast<std::ptrdiff_t>(m));
    }
  }
  if (cfg.monitor_spectrum && n > 0 && !s.spectrum[0].empty()) {
    const double scale = std::max(s.spectrum[0][0], 1e-300);
    for (std::size_t i = 0; i < n; ++i) {
      double worst = 0.0;
      for (std::size_t j = 0; j < s.spectrum[i].size(); ++j) {
        worst = std::max(worst, std::abs(s.spectrum[i][j] - s.spectrum[0][j]) / scale);
      }
      s.spectrum_drift[i] = worst;
    }
  }
}

TimeSeries integrate(const FourierSymbol& u0, const FlowConfig& cfg, Field field) {
  cfg.validate();
  if (field.kind == Field::Kind::Hierarchy && field.n < 1) throw std::invalid_argument("integrate: hierarchy n >= 1");

  TimeSeries series;
  Integrator integ{cfg, field, {}, cfg.dt};
  Eigen::VectorXcd y = u0.resized(cfg.K).coeffs();

  const double interval = cfg.dt * static_cast<double>(cfg.sample_every);
  std::vector<double> sample_times;
  for (std::size_t j = 0;; ++j) {
    const double t = static_cast<double>(j) * interval;
    if (t > cfg.t_end * (1.0 + 1e-12)) break;
    sample_times.push_back(std::min(t, cfg.t_end));
  }
  if (cfg.t_end - sample_times.back() > 1e-12 * std::max(1.0, cfg.t_end)) sample_times.push_back(cfg.t_end);

  series.times.push_back(0.0);
  series.states.emplace_back(y);
  series.steps.push_back(integ.diag);
  for (std::size_t j = 1; j < sample_times.size(); ++j) {
    const double t0 = sample_times[j - 1];
    const double t1 = sample_times[j];
    y = cfg.scheme == Scheme::Rk4 ? integ.advance_rk4(std::move(y), t0, t1) : integ.advance_rk45(std::move(y), t0, t1);
    series.times.push_back(t1);
    series.states.emplace_back(y);
    series.steps.push_back(integ.diag);
  }
  fill_monitors(series, cfg);
  return series;
}

double poisson_bracket(const FourierSymbol& u, int n, int p) {
  const FourierSymbol x = hierarchy_field(u, n, false);
  const FourierSymbol y = hierarchy_field(u, p, false);
  return 4.0 * inner(x, y).imag();
}

MonitorReport lax_residual_along(TimeSeries& s) {
  const std::size_t n = s.states.size();
  if (n < 3) throw std::invalid_argument("lax_residual_along: need at least 3 samples");
  const std::size_t K = s.states.front().cutoff();

  std::vector<Eigen::MatrixXcd> gam(n);
  for (std::size_t i = 0; i < n; ++i) gam[i] = hankel_matrix(s.states[i], K).gamma;

  s.lax_residual.assign(n, 0.0);
  MonitorReport rep;
  for (std::size_t i = 0; i < n; ++i) {
    // Second-order three-point derivative on a possibly nonuniform grid.
    std::size_t i0 = i == 0 ? 0 : (i == n - 1 ? n - 3 : i - 1);
    const double t0 = s.times[i0], t1 = s.times[i0 + 1], t2 = s.times[i0 + 2], t = s.times[i];
    const double w0 = ((t - t1) + (t - t2)) / ((t0 - t1) * (t0 - t2));
    const double w1 = ((t - t0) + (t - t2)) / ((t1 - t0) * (t1 - t2));
    const double w2 = ((t - t0) + (t - t1)) / ((t2 - t0) * (t2 - t1));
    const Eigen::MatrixXcd dgam = w0 * gam[i0] + w1 * gam[i0 + 1] + w2 * gam[i0 + 2];

    const Eigen::MatrixXcd B = lax_b_operator(s.states[i], K);
    // [B, H_u] is antilinear with matrix B gamma - gamma conj(B).
    const Eigen::MatrixXcd comm = B * gam[i] - gam[i] * B.conjugate();
    const double r = AntilinearOp{dgam - comm, true}.norm();
    s.lax_residual[i] = r;
    rep.lax_residual = std::max(rep.lax_residual, r);
  }

  auto drift = [&](const std::vector<double>& col) {
    double worst = 0.0;
    for (double x : col) worst = std::max(worst, rel_drift(x, col.front()));
    return worst;
  };
  if (!s.Q.empty()) {
    rep.conserved_drift["Q"] = drift(s.Q);
    rep.conserved_drift["M"] = drift(s.M);
    rep.conserved_drift["E"] = drift(s.E);
    rep.conserved_drift["J6"] = drift(s.J6);
    rep.conserved_drift["J8"] = drift(s.J8);
  }
  for (double d : s.spectrum_drift) rep.eigenvalue_drift = std::max(rep.eigenvalue_drift, d);
  return rep;
}

namespace {

// g(theta) = sum (k+1) u(k) r^k e^{-ik theta} and its first two derivatives.
struct TorusProfile {
  std::vector<cplx> w;  // (k+1) u(k) r^k

  TorusProfile(const FourierSymbol& u, double r) : w(u.cutoff()) {
    double rk = 1.0;
    for (std::size_t k = 0; k < u.cutoff(); ++k) {
      w[k] = static_cast<double>(k + 1) * u[k] * rk;
      rk *= r;
    }
  }

  void eval(double theta, cplx& g, cplx& g1, cplx& g2) const {
    g = g1 = g2 = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k) {
      const double dk = static_cast<double>(k);
      const cplx e = w[k] * std::polar(1.0, -dk * theta);
      g += e;
      g1 += -kI * dk * e;
      g2 += -dk * dk * e;
    }
  }

  // max over theta of |g(theta)|: 64-point grid, then Newton on |g|^2.
  double max_modulus() const {
    constexpr int grid = 64;
    std::vector<std::pair<double, double>> cand;
    for (int j = 0; j < grid; ++j) {
      const double th = 2.0 * kPi * j / grid;
      cplx g, g1, g2;
      eval(th, g, g1, g2);
      cand.emplace_back(std::norm(g), th);
    }
    std::sort(cand.begin(), cand.end(), [](auto& a, auto& b) { return a.first > b.first; });
    double best = cand.front().first;
    for (int c = 0; c < 3; ++c) {
      double th = cand[static_cast<std::size_t>(c)].second;
      for (int it = 0; it < 20; ++it) {
        cplx g, g1, g2;
        eval(th, g, g1, g2);
        best = std::max(best, std::norm(g));
        const double f1 = 2.0 * std::real(g1 * std::conj(g));
        const double f2 = 2.0 * (std::norm(g1) + std::real(g2 * std::conj(g)));
        if (!(f2 < 0.0)) break;
        const double step = std::clamp(-f1 / f2, -kPi / grid, kPi / grid);
        th += step;
        if (std::abs(step) < 1e-15) break;
      }
      cplx g, g1, g2;
      eval(th, g, g1, g2);
      best = std::max(best, std::norm(g));
    }
    return std::sqrt(best);
  }
};

}  // namespace

double torus_distance(const FourierSymbol& u, double a, double r) {
  if (!(a > 0.0) || !(r > 0.0 && r < 1.0)) throw std::invalid_argument("torus_distance: need a > 0, 0 < r < 1");
  // ||u - phi||^2 = ||u||^2 + a^2/(1-r^2)^2 - 2 a max|g|, the alpha phase
  // being optimal in closed form.
  const double g = TorusProfile(u, r).max_modulus();
  const double one_m = 1.0 - r * r;
  const double d2 = h_half_norm_sq(u) + a * a / (one_m * one_m) - 2.0 * a * g;
  return std::sqrt(std::max(d2, 0.0));
}

TorusFit fit_torus(const FourierSymbol& u) {
  // For fixed r the optimal a is (1-r^2)^2 max|g|, leaving the scalar
  // objective (1-r^2) max|g| to maximize over r.
  auto objective = [&](double r) { return (1.0 - r * r) * TorusProfile(u, r).max_modulus(); };
  constexpr int coarse = 200;
  constexpr double rmax = 0.999;
  int best_j = 1;
  double best_v = -1.0;
  for (int j = 1; j < coarse; ++j) {
    const double v = objective(rmax * j / coarse);
    if (v > best_v) {
      best_v = v;
      best_j = j;
    }
  }
  double lo = rmax * (best_j - 1) / coarse, hi = rmax * (best_j + 1) / coarse;
  lo = std::max(lo, 1e-9);
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
  double f1 = objective(x1), f2 = objective(x2);
  for (int it = 0; it < 80 && hi - lo > 1e-13; ++it) {
    if (f1 > f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - phi * (hi - lo);
      f1 = objective(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + phi * (hi - lo);
      f2 = objective(x2);
    }
  }
  TorusFit fit;
  fit.r = 0.5 * (lo + hi);
  const double one_m = 1.0 - fit.r * fit.r;
  fit.a = one_m * one_m * TorusProfile(u, fit.r).max_modulus();
  if (!(fit.a > 0.0)) throw std::invalid_argument("fit_torus: u is orthogonal to every torus element");
  fit.distance = torus_distance(u, fit.a, fit.r);
  return fit;
}

}  // namespace szego
