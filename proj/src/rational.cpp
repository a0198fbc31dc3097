#include "szego/rational.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "szego/poly.hpp"

namespace szego {
namespace {

cplx product(const std::vector<cplx>& v) {
  cplx acc = 1.0;
  for (const cplx& x : v) acc *= x;
  return acc;
}

void check_chart(const RationalState& s, double t) {
  for (std::size_t j = 0; j < s.poles.size(); ++j) {
    if (std::abs(s.poles[j]) >= 1.0 - kCircleProximityTol) {
      throw NumericalError("chart: pole reached the unit circle at t = " + std::to_string(t), t);
    }
    for (std::size_t l = j + 1; l < s.poles.size(); ++l) {
      if (std::abs(s.poles[j] - s.poles[l]) <= kPoleCollisionTol) {
        throw NumericalError("chart: pole collision at t = " + std::to_string(t), t);
      }
    }
  }
  for (const cplx& a : s.residues) {
    if (!std::isfinite(a.real()) || !std::isfinite(a.imag())) {
      throw NumericalError("chart: nonfinite residue at t = " + std::to_string(t), t);
    }
  }
}

Eigen::VectorXcd pack(const RationalState& s) {
  const auto n = static_cast<Eigen::Index>(s.size());
  Eigen::VectorXcd y(2 * n + 1);
  for (Eigen::Index j = 0; j < n; ++j) {
    y[j] = s.residues[static_cast<std::size_t>(j)];
    y[n + j] = s.poles[static_cast<std::size_t>(j)];
  }
  y[2 * n] = s.constant.value_or(0.0);
  return y;
}

RationalState unpack(const Eigen::VectorXcd& y, bool has_constant) {
  const Eigen::Index n = (y.size() - 1) / 2;
  RationalState s;
  for (Eigen::Index j = 0; j < n; ++j) {
    s.residues.push_back(y[j]);
    s.poles.push_back(y[n + j]);
  }
  if (has_constant) s.constant = y[2 * n];
  return s;
}

Eigen::VectorXcd pack(const ChartVelocity& v) {
  const auto n = static_cast<Eigen::Index>(v.poles.size());
  Eigen::VectorXcd y(2 * n + 1);
  for (Eigen::Index j = 0; j < n; ++j) {
    y[j] = v.residues[static_cast<std::size_t>(j)];
    y[n + j] = v.poles[static_cast<std::size_t>(j)];
  }
  y[2 * n] = v.constant;
  return y;
}

// Sum over k >= 1 of k^n x^(k-1) = A_n(x) / (1 - x)^(n+1), A_n Eulerian.
double power_series_moment(int n, double x) {
  std::vector<double> e{1.0};  // Eulerian numbers of row n
  for (int m = 1; m <= n; ++m) {
    std::vector<double> next(static_cast<std::size_t>(m), 0.0);
    for (int k = 0; k < m; ++k) {
      const double left = k < static_cast<int>(e.size()) ? e[static_cast<std::size_t>(k)] : 0.0;
      const double down = k >= 1 && k - 1 < static_cast<int>(e.size()) ? e[static_cast<std::size_t>(k - 1)] : 0.0;
      next[static_cast<std::size_t>(k)] = (k + 1) * left + (m - k) * down;
    }
    e = std::move(next);
  }
  double poly = 0.0;
  for (std::size_t m = e.size(); m-- > 0;) poly = poly * x + e[m];
  return poly / std::pow(1.0 - x, n + 1);
}

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

void RationalState::validate() const {
  if (residues.size() != poles.size()) throw std::invalid_argument("RationalState: residues/poles size mismatch");
  for (std::size_t j = 0; j < poles.size(); ++j) {
    if (!(std::abs(poles[j]) < 1.0 - kCircleProximityTol)) {
      throw std::invalid_argument("RationalState: pole on or outside the unit circle");
    }
    for (std::size_t l = j + 1; l < poles.size(); ++l) {
      if (!(std::abs(poles[j] - poles[l]) > kPoleCollisionTol)) {
        throw std::invalid_argument("RationalState: poles collide");
      }
    }
  }
}

cplx RationalState::value(cplx z) const {
  cplx acc = constant.value_or(0.0);
  for (std::size_t j = 0; j < poles.size(); ++j) acc += residues[j] / (1.0 - poles[j] * z);
  return acc;
}

FourierSymbol rational_to_fourier(const RationalState& state, std::size_t K) {
  if (state.residues.size() != state.poles.size()) {
    throw std::invalid_argument("rational_to_fourier: residues/poles size mismatch");
  }
  for (const cplx& p : state.poles) {
    if (!(std::abs(p) < 1.0)) throw std::invalid_argument("rational_to_fourier: pole on or outside the unit circle");
  }
  Eigen::VectorXcd c = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(K));
  for (std::size_t j = 0; j < state.poles.size(); ++j) {
    cplx term = state.residues[j];
    for (std::size_t k = 0; k < K; ++k) {
      c[static_cast<Eigen::Index>(k)] += term;
      term *= state.poles[j];
    }
  }
  if (state.constant) c[0] += *state.constant;
  return FourierSymbol(std::move(c));
}

double rational_tail_bound(const RationalState& state, std::size_t K) {
  double acc = 0.0;
  for (std::size_t j = 0; j < state.poles.size(); ++j) {
    const double r = std::abs(state.poles[j]);
    acc += std::abs(state.residues[j]) * std::pow(r, static_cast<double>(K)) / std::sqrt(1.0 - r * r);
  }
  return acc;
}

double chart_mass(const RationalState& s) {
  cplx sum_alpha{};
  cplx gram{};
  for (std::size_t j = 0; j < s.size(); ++j) {
    sum_alpha += s.residues[j];
    for (std::size_t k = 0; k < s.size(); ++k) {
      gram += s.residues[j] * std::conj(s.residues[k]) / (1.0 - s.poles[j] * std::conj(s.poles[k]));
    }
  }
  const cplx c0 = s.constant.value_or(0.0);
  return gram.real() + std::norm(c0 + sum_alpha) - std::norm(sum_alpha);
}

double chart_momentum(const RationalState& s) {
  cplx acc{};
  for (std::size_t j = 0; j < s.size(); ++j) {
    for (std::size_t k = 0; k < s.size(); ++k) {
      const cplx d = 1.0 - s.poles[j] * std::conj(s.poles[k]);
      acc += s.residues[j] * s.poles[j] * std::conj(s.residues[k] * s.poles[k]) / (d * d);
    }
  }
  return acc.real();
}

double chart_S(const RationalState& s) { return s.constant ? 0.0 : std::norm(product(s.poles)); }

double chart_S_tilde(const RationalState& s) {
  return s.constant ? std::norm(*s.constant * product(s.poles)) : 0.0;
}

ChartVelocity eqn_rhs(const RationalState& s) {
  s.validate();
  const std::size_t n = s.size();
  const cplx a0 = s.constant.value_or(0.0);
  const auto& al = s.residues;
  const auto& p = s.poles;

  ChartVelocity v;
  v.residues.resize(n);
  v.poles.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    // conj(u) continued off the circle, evaluated at the pole 1/p_j
    cplx g = std::conj(a0);
    cplx g2 = std::conj(a0);
    for (std::size_t k = 0; k < n; ++k) {
      const cplx d = 1.0 - p[j] * std::conj(p[k]);
      g += std::conj(al[k]) / d;
      g2 += std::conj(al[k]) / (d * d);
    }
    // regular part of u at 1/p_j
    cplx h = a0;
    for (std::size_t l = 0; l < n; ++l) {
      if (l != j) h += al[l] * p[j] / (p[j] - p[l]);
    }
    const cplx ip = al[j] * g * p[j];
    const cplx ia = al[j] * al[j] * g2 + 2.0 * al[j] * h * g;
    v.poles[j] = -kI * ip;
    v.residues[j] = -kI * ia;
  }
  if (s.constant) {
    cplx u0 = a0;
    for (const cplx& a : al) u0 += a;
    v.constant = -kI * std::conj(u0) * a0 * a0;
  }
  return v;
}

void RationalSymbol::validate() const {
  if (numerator.empty() || denominator.empty()) throw std::invalid_argument("RationalSymbol: empty polynomial");
  if (std::abs(denominator[0] - 1.0) > 1e-12) throw std::invalid_argument("RationalSymbol: B(0) must equal 1");
  const auto zs = poly::roots(denominator);
  double scale = 0.0;
  for (const cplx& a : numerator) scale = std::max(scale, std::abs(a));
  for (const cplx& z : zs) {
    if (!(std::abs(z) > 1.0 + 1e-10)) throw std::invalid_argument("RationalSymbol: B vanishes in the closed unit disc");
    double mag = 0.0;
    for (std::size_t k = 0; k < numerator.size(); ++k) mag += std::abs(numerator[k]) * std::pow(std::abs(z), k);
    if (std::abs(poly::eval(numerator, z)) <= 1e-10 * mag) {
      throw std::invalid_argument("RationalSymbol: A and B share a factor");
    }
  }
  if (scale == 0.0) throw std::invalid_argument("RationalSymbol: zero numerator");
}

std::size_t RationalSymbol::rank() const {
  return std::max(poly::degree(numerator) + 1, poly::degree(denominator));
}

std::vector<cplx> RationalSymbol::poles() const {
  std::vector<cplx> out;
  for (const cplx& z : poly::roots(denominator)) out.push_back(1.0 / z);
  const std::size_t n = rank();
  while (out.size() < n) out.push_back(0.0);
  return out;
}

FourierSymbol RationalSymbol::to_fourier(std::size_t K) const {
  return FourierSymbol(poly::series_quotient(numerator, denominator, K));
}

cplx RationalSymbol::value(cplx z) const { return poly::eval(numerator, z) / poly::eval(denominator, z); }

RationalSymbol to_symbol(const RationalState& s) {
  RationalSymbol out;
  out.denominator = poly::from_reciprocal_roots(s.poles);
  std::vector<cplx> num(s.size() + 1, cplx{});
  if (s.constant) {
    for (std::size_t k = 0; k < out.denominator.size(); ++k) num[k] += *s.constant * out.denominator[k];
  }
  for (std::size_t j = 0; j < s.size(); ++j) {
    std::vector<cplx> others;
    for (std::size_t l = 0; l < s.size(); ++l) {
      if (l != j) others.push_back(s.poles[l]);
    }
    const auto part = poly::from_reciprocal_roots(others);
    for (std::size_t k = 0; k < part.size(); ++k) num[k] += s.residues[j] * part[k];
  }
  num.resize(poly::degree(num) + 1);
  out.numerator = std::move(num);
  return out;
}

RationalSeries integrate_rational(const RationalState& state0, const RationalFlowConfig& cfg) {
  state0.validate();
  if (!(cfg.dt > 0.0) || !(cfg.t_end >= 0.0) || cfg.sample_every < 1) {
    throw std::invalid_argument("integrate_rational: invalid configuration");
  }
  const bool has_c = state0.constant.has_value();
  auto f = [&](const Eigen::VectorXcd& y, double t) {
    const RationalState s = unpack(y, has_c);
    check_chart(s, t);
    return pack(eqn_rhs(s));
  };

  RationalSeries out;
  auto record = [&](double t, const RationalState& s) {
    out.times.push_back(t);
    out.states.push_back(s);
    out.S.push_back(chart_S(s));
    out.S_tilde.push_back(chart_S_tilde(s));
  };

  Eigen::VectorXcd y = pack(state0);
  const auto n_steps = static_cast<std::size_t>(std::llround(std::ceil(cfg.t_end / cfg.dt - 1e-9)));
  const double h = n_steps == 0 ? 0.0 : cfg.t_end / static_cast<double>(n_steps);
  record(0.0, state0);
  for (std::size_t i = 0; i < n_steps; ++i) {
    const double t = static_cast<double>(i) * h;
    const Eigen::VectorXcd k1 = f(y, t);
    const Eigen::VectorXcd k2 = f(y + 0.5 * h * k1, t + 0.5 * h);
    const Eigen::VectorXcd k3 = f(y + 0.5 * h * k2, t + 0.5 * h);
    const Eigen::VectorXcd k4 = f(y + h * k3, t + h);
    y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    const double t1 = static_cast<double>(i + 1) * h;
    const RationalState s = unpack(y, has_c);
    check_chart(s, t1);
    if ((i + 1) % cfg.sample_every == 0 || i + 1 == n_steps) record(t1, s);
  }
  return out;
}

void MTilde1State::validate() const {
  if (!(std::abs(p) < 1.0)) throw std::invalid_argument("M~(1): |p| must be < 1");
  if (a == cplx{}) throw std::invalid_argument("M~(1): a must be nonzero");
  // a z + b proportional to 1 - p z collapses u to a constant.
  if (std::abs(a + b * p) <= 1e-14 * (std::abs(a) + std::abs(b))) {
    throw std::invalid_argument("M~(1): a z + b and 1 - p z share a factor");
  }
}

cplx MTilde1State::value(cplx z) const { return (a * z + b) / (1.0 - p * z); }

FourierSymbol MTilde1State::to_fourier(std::size_t K) const {
  Eigen::VectorXcd c = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(K));
  c[0] = b;
  cplx term = a + b * p;
  for (std::size_t k = 1; k < K; ++k) {
    c[static_cast<Eigen::Index>(k)] = term;
    term *= p;
  }
  return FourierSymbol(std::move(c));
}

double MTilde1State::mass() const { return std::norm(b) + std::norm(a + b * p) / (1.0 - std::norm(p)); }

double MTilde1State::momentum() const {
  const double d = 1.0 - std::norm(p);
  return std::norm(a + b * p) / (d * d);
}

MTilde1State mtilde1_rhs(const MTilde1State& s) {
  const double Q = s.mass();
  const double M = s.momentum();
  MTilde1State d;
  d.a = -kI * Q * s.a;
  d.b = -kI * ((M + Q) * s.b + M * s.a * std::conj(s.p));
  d.p = -kI * (s.a + s.b * s.p) * (std::conj(s.a) * s.p + std::conj(s.b)) / (1.0 - std::norm(s.p));
  return d;
}

MTilde1Series integrate_mtilde1(const MTilde1State& s0, const RationalFlowConfig& cfg) {
  s0.validate();
  if (!(cfg.dt > 0.0) || !(cfg.t_end >= 0.0) || cfg.sample_every < 1) {
    throw std::invalid_argument("integrate_mtilde1: invalid configuration");
  }
  auto axpy = [](const MTilde1State& x, double h, const MTilde1State& d) {
    return MTilde1State{x.a + h * d.a, x.b + h * d.b, x.p + h * d.p};
  };
  MTilde1Series out;
  auto record = [&](double t, const MTilde1State& s) {
    out.times.push_back(t);
    out.states.push_back(s);
    out.S_tilde.push_back(s.S_tilde());
    out.p_sq.push_back(std::norm(s.p));
  };
  MTilde1State y = s0;
  const auto n_steps = static_cast<std::size_t>(std::llround(std::ceil(cfg.t_end / cfg.dt - 1e-9)));
  const double h = n_steps == 0 ? 0.0 : cfg.t_end / static_cast<double>(n_steps);
  record(0.0, y);
  for (std::size_t i = 0; i < n_steps; ++i) {
    const MTilde1State k1 = mtilde1_rhs(y);
    const MTilde1State k2 = mtilde1_rhs(axpy(y, 0.5 * h, k1));
    const MTilde1State k3 = mtilde1_rhs(axpy(y, 0.5 * h, k2));
    const MTilde1State k4 = mtilde1_rhs(axpy(y, h, k3));
    y.a += (h / 6.0) * (k1.a + 2.0 * k2.a + 2.0 * k3.a + k4.a);
    y.b += (h / 6.0) * (k1.b + 2.0 * k2.b + 2.0 * k3.b + k4.b);
    y.p += (h / 6.0) * (k1.p + 2.0 * k2.p + 2.0 * k3.p + k4.p);
    const double t1 = static_cast<double>(i + 1) * h;
    if (!(std::abs(y.p) < 1.0 - kCircleProximityTol)) {
      throw NumericalError("integrate_mtilde1: pole reached the unit circle at t = " + std::to_string(t1), t1);
    }
    if ((i + 1) % cfg.sample_every == 0 || i + 1 == n_steps) record(t1, y);
  }
  return out;
}

std::pair<double, double> m1_frequencies(cplx alpha0, cplx p0) {
  const double d = 1.0 - std::norm(p0);
  return {std::norm(alpha0) / (d * d), std::norm(alpha0) / d};
}

std::pair<cplx, cplx> m1_solution(cplx alpha0, cplx p0, double t) {
  if (!(std::abs(p0) < 1.0)) throw std::invalid_argument("m1_solution: |p0| must be < 1");
  const auto [omega, c] = m1_frequencies(alpha0, p0);
  return {alpha0 * std::polar(1.0, -omega * t), p0 * std::polar(1.0, -c * t)};
}

MTilde1Solution mtilde1_invariants(const MTilde1State& s0) {
  s0.validate();
  MTilde1Solution inv;
  inv.Q = s0.mass();
  inv.M = s0.momentum();
  inv.S_tilde = s0.S_tilde();
  const double sigma1 = inv.Q + inv.M;
  inv.Omega = std::sqrt(std::max(sigma1 * sigma1 - 4.0 * inv.M * inv.S_tilde, 0.0));
  inv.r_plus = 0.5 * (sigma1 + inv.Omega);
  inv.r_minus = 0.5 * (sigma1 - inv.Omega);
  inv.f_plus0 = inv.r_plus * s0.b + inv.M * s0.a * std::conj(s0.p);
  inv.f_minus0 = inv.r_minus * s0.b + inv.M * s0.a * std::conj(s0.p);
  inv.stationary = std::abs(inv.Q - inv.S_tilde) <= 1e-12 * inv.Q;
  const double sm = std::sqrt(inv.M), ss = std::sqrt(inv.S_tilde), root = 2.0 * std::sqrt(inv.M * inv.S_tilde);
  if (inv.stationary) {
    inv.rho_min = inv.rho_max = std::abs(s0.p);
  } else {
    inv.rho_max = (sm + ss) / std::sqrt(inv.M + inv.Q + root);
    inv.rho_min = std::abs(sm - ss) / std::sqrt(inv.M + inv.Q - root);
  }
  return inv;
}

std::pair<MTilde1State, MTilde1Solution> mtilde1_solution(cplx a0, cplx b0, cplx p0, double t) {
  const MTilde1State s0{a0, b0, p0};
  const MTilde1Solution inv = mtilde1_invariants(s0);
  const cplx phase_q = std::polar(1.0, -inv.Q * t);
  if (inv.stationary) return {MTilde1State{a0 * phase_q, b0 * phase_q, p0}, inv};

  const cplx fp = inv.f_plus0 * std::polar(1.0, -inv.r_plus * t);
  const cplx fm = inv.f_minus0 * std::polar(1.0, -inv.r_minus * t);
  MTilde1State s;
  s.a = a0 * phase_q;
  s.b = (fp - fm) / inv.Omega;
  s.p = std::conj((inv.r_plus * fm - inv.r_minus * fp) / (inv.Omega * inv.M * s.a));
  return {s, inv};
}

cplx blaschke_value(const std::vector<cplx>& poles, cplx z) {
  cplx acc = 1.0;
  for (const cplx& p : poles) acc *= (z - std::conj(p)) / (1.0 - p * z);
  return acc;
}

BlaschkeData blaschke_decompose(const RationalSymbol& sym, std::size_t K) {
  sym.validate();
  BlaschkeData out;
  const std::size_t N = sym.rank();
  const std::size_t degB = poly::degree(sym.denominator);
  out.poles = sym.poles();

  std::vector<cplx> top{1.0};
  for (const cplx& p : out.poles) top = poly::multiply(top, {-std::conj(p), 1.0});
  out.b = FourierSymbol(poly::series_quotient(top, sym.denominator, K));

  const cplx prod = degB == N ? product(out.poles) : cplx{};
  out.S = std::norm(prod);
  const double sign = N % 2 == 0 ? 1.0 : -1.0;
  out.v = (sign * prod) * out.b;
  if (degB < N) {
    const cplx a = sym.numerator[N - 1];
    out.leading = a;
    out.S_tilde = std::norm(a);
    // b has a zero at the origin here, so b / z is a shift.
    Eigen::VectorXcd w = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(K));
    for (std::size_t k = 0; k + 1 < K; ++k) w[static_cast<Eigen::Index>(k)] = out.b[k + 1] / std::conj(a);
    out.w = FourierSymbol(std::move(w));
  }
  return out;
}

FourierSymbol blaschke_w(const RationalSymbol& sym, std::size_t K) {
  auto d = blaschke_decompose(sym, K);
  if (!d.w) throw std::invalid_argument("blaschke_w: 1 is not in the range of H_u (not an M~ symbol)");
  return *d.w;
}

EvolutionReport evolution_checks(const RationalSeries& series, std::size_t grid) {
  const std::size_t n = series.states.size();
  if (n < 3) throw std::invalid_argument("evolution_checks: need at least 3 samples");
  std::vector<cplx> zs(grid);
  for (std::size_t m = 0; m < grid; ++m) zs[m] = std::polar(1.0, 2.0 * kPi * static_cast<double>(m) / static_cast<double>(grid));

  const bool mtilde = series.states.front().constant.has_value();
  const std::size_t N = series.states.front().size() + (mtilde ? 1 : 0);
  const double sign = N % 2 == 0 ? 1.0 : -1.0;
  auto v_of = [&](const RationalState& s, cplx z) { return sign * product(s.poles) * blaschke_value(s.poles, z); };
  // b = z * btilde in the M~ chart
  auto b_of = [&](const RationalState& s, cplx z) { return (mtilde ? z : cplx{1.0}) * blaschke_value(s.poles, z); };
  auto a_of = [&](const RationalState& s) { return (N % 2 == 1 ? 1.0 : -1.0) * product(s.poles) * s.constant.value_or(0.0); };

  EvolutionReport rep;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const auto& sm = series.states[i - 1];
    const auto& s = series.states[i];
    const auto& sp = series.states[i + 1];
    const double dt = series.times[i + 1] - series.times[i - 1];
    const double Q = chart_mass(s);
    for (const cplx& z : zs) {
      const double u2 = std::norm(s.value(z));
      if (!mtilde) {
        const cplx dv = (v_of(sp, z) - v_of(sm, z)) / dt;
        rep.v_residual = std::max(rep.v_residual, std::abs(kI * dv - u2 * v_of(s, z)));
      } else {
        const cplx am = std::conj(a_of(sm)), a0 = std::conj(a_of(s)), ap = std::conj(a_of(sp));
        const cplx wm = blaschke_value(sm.poles, z) / am, w0 = blaschke_value(s.poles, z) / a0,
                   wp = blaschke_value(sp.poles, z) / ap;
        rep.w_residual = std::max(rep.w_residual, std::abs(kI * (wp - wm) / dt - u2 * w0));
      }
      const cplx db = (b_of(sp, z) - b_of(sm, z)) / dt;
      rep.b_residual = std::max(rep.b_residual, std::abs(kI * db - (u2 - Q) * b_of(s, z)));
    }
    if (!mtilde) {
      const cplx P = product(s.poles);
      if (std::abs(P) > 0.0) {
        const cplx dP = (product(sp.poles) - product(sm.poles)) / dt;
        rep.product_rate_residual = std::max(rep.product_rate_residual, std::abs(kI * dP / P - Q));
      }
    } else {
      const cplx da = (a_of(sp) - a_of(sm)) / dt;
      rep.a_residual = std::max(rep.a_residual, std::abs(kI * da - Q * a_of(s)));
    }
  }
  return rep;
}

EvolutionReport evolution_checks(const MTilde1Series& series, std::size_t grid) {
  const std::size_t n = series.states.size();
  if (n < 3) throw std::invalid_argument("evolution_checks: need at least 3 samples");
  EvolutionReport rep;
  auto b_of = [](const MTilde1State& s, cplx z) { return z * (z - std::conj(s.p)) / (1.0 - s.p * z); };
  auto w_of = [](const MTilde1State& s, cplx z) { return (z - std::conj(s.p)) / ((1.0 - s.p * z) * std::conj(s.a)); };
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const auto& sm = series.states[i - 1];
    const auto& s = series.states[i];
    const auto& sp = series.states[i + 1];
    const double dt = series.times[i + 1] - series.times[i - 1];
    const double Q = s.mass();
    rep.a_residual = std::max(rep.a_residual, std::abs(kI * (sp.a - sm.a) / dt - Q * s.a));
    for (std::size_t m = 0; m < grid; ++m) {
      const cplx z = std::polar(1.0, 2.0 * kPi * static_cast<double>(m) / static_cast<double>(grid));
      const double u2 = std::norm(s.value(z));
      rep.w_residual = std::max(rep.w_residual, std::abs(kI * (w_of(sp, z) - w_of(sm, z)) / dt - u2 * w_of(s, z)));
      rep.b_residual =
          std::max(rep.b_residual, std::abs(kI * (b_of(sp, z) - b_of(sm, z)) / dt - (u2 - Q) * b_of(s, z)));
    }
  }
  return rep;
}

double mtilde1_hs_norm(const MTilde1State& s, double order) {
  const double x = std::norm(s.p);
  double tail = 0.0;  // sum_{k>=1} (1 + k^2)^s x^(k-1)
  const double rounded = std::round(order);
  if (std::abs(order - rounded) < 1e-12 && rounded >= 0.0 && rounded <= 12.0) {
    const int si = static_cast<int>(rounded);
    for (int j = 0; j <= si; ++j) tail += binomial(si, j) * power_series_moment(2 * j, x);
  } else {
    const double peak = x > 0.0 ? 2.0 * order / -std::log(x) : 1.0;
    double xk = 1.0;
    for (std::size_t k = 1;; ++k) {
      const double term = std::pow(1.0 + static_cast<double>(k * k), order) * xk;
      tail += term;
      if (static_cast<double>(k) > peak && term < 1e-18 * tail) break;
      xk *= x;
      if (xk == 0.0) break;
    }
  }
  return std::sqrt(std::norm(s.b) + std::norm(s.a + s.b * s.p) * tail);
}

HsGrowthTable hs_growth_series(const std::vector<double>& eps_list, double order) {
  HsGrowthTable table;
  table.order = order;
  for (double eps : eps_list) {
    if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("hs_growth_series: eps must lie in (0, 1)");
    if (!(order > 0.5)) throw std::invalid_argument("hs_growth_series: s must exceed 1/2");
    HsGrowthRow row;
    row.eps = eps;
    row.t_eps = kPi / (eps * std::sqrt(4.0 + eps * eps));
    const auto [s, inv] = mtilde1_solution(1.0, eps, 0.0, row.t_eps);
    row.hs_norm = mtilde1_hs_norm(s, order);
    table.rows.push_back(row);
  }
  if (table.rows.size() >= 2) {
    double mx = 0, my = 0;
    for (const auto& r : table.rows) {
      mx += std::log(r.t_eps);
      my += std::log(r.hs_norm);
    }
    mx /= static_cast<double>(table.rows.size());
    my /= static_cast<double>(table.rows.size());
    double sxy = 0, sxx = 0;
    for (const auto& r : table.rows) {
      sxy += (std::log(r.t_eps) - mx) * (std::log(r.hs_norm) - my);
      sxx += (std::log(r.t_eps) - mx) * (std::log(r.t_eps) - mx);
    }
    table.slope = sxy / sxx;
  }
  return table;
}

PeriodEnvelope mtilde1_period_envelope(const MTilde1State& s0, double order, std::size_t samples) {
  const MTilde1Solution inv = mtilde1_invariants(s0);
  const double period = inv.stationary || inv.Omega == 0.0 ? 1.0 : 2.0 * kPi / inv.Omega;
  PeriodEnvelope env;
  env.inf_p = std::abs(s0.p);
  for (std::size_t i = 0; i <= samples; ++i) {
    const double t = period * static_cast<double>(i) / static_cast<double>(samples);
    const auto [s, unused] = mtilde1_solution(s0.a, s0.b, s0.p, t);
    env.sup_hs = std::max(env.sup_hs, mtilde1_hs_norm(s, order));
    env.sup_p = std::max(env.sup_p, std::abs(s.p));
    env.inf_p = std::min(env.inf_p, std::abs(s.p));
  }
  return env;
}

}  // namespace szego
