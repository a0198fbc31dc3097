#include "szego/kronecker.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

#include "szego/hankel.hpp"
#include "szego/poly.hpp"

namespace szego {
namespace {

double binom(std::size_t n, std::size_t k) {
  double r = 1.0;
  for (std::size_t i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return r;
}

struct Cluster {
  cplx center{};
  int multiplicity = 0;
};

// Groups values whose chain distance is below tol; centers are means.
std::vector<Cluster> cluster(const std::vector<cplx>& xs, double tol) {
  std::vector<std::size_t> parent(xs.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (std::size_t i = 0; i < xs.size(); ++i) {
    for (std::size_t j = i + 1; j < xs.size(); ++j) {
      if (std::abs(xs[i] - xs[j]) < tol) parent[find(i)] = find(j);
    }
  }
  std::vector<Cluster> out;
  std::vector<std::size_t> roots;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const std::size_t r = find(i);
    auto it = std::find(roots.begin(), roots.end(), r);
    std::size_t idx;
    if (it == roots.end()) {
      roots.push_back(r);
      out.push_back({});
      idx = out.size() - 1;
    } else {
      idx = static_cast<std::size_t>(it - roots.begin());
    }
    out[idx].center += xs[i];
    ++out[idx].multiplicity;
  }
  for (auto& c : out) {
    c.center /= static_cast<double>(c.multiplicity);
    if (std::abs(c.center) < tol) c.center = 0.0;
  }
  std::sort(out.begin(), out.end(), [](const Cluster& a, const Cluster& b) {
    if (std::abs(a.center) != std::abs(b.center)) return std::abs(a.center) < std::abs(b.center);
    return std::arg(a.center) < std::arg(b.center);
  });
  return out;
}

Eigen::MatrixXcd term_basis(const std::vector<Cluster>& cl, std::size_t K) {
  std::size_t cols = 0;
  for (const auto& c : cl) cols += static_cast<std::size_t>(c.multiplicity);
  Eigen::MatrixXcd B = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(K), static_cast<Eigen::Index>(cols));
  Eigen::Index col = 0;
  for (const auto& c : cl) {
    for (int r = 1; r <= c.multiplicity; ++r, ++col) {
      if (c.center == cplx{}) {
        if (static_cast<std::size_t>(r - 1) < K) B(r - 1, col) = 1.0;
        continue;
      }
      cplx pk = 1.0;
      for (std::size_t k = 0; k < K; ++k) {
        B(static_cast<Eigen::Index>(k), col) = binom(k + static_cast<std::size_t>(r) - 1, static_cast<std::size_t>(r) - 1) * pk;
        pk *= c.center;
      }
    }
  }
  return B;
}

Eigen::VectorXcd least_squares(const Eigen::MatrixXcd& A, const Eigen::VectorXcd& b) {
  // Column equilibration keeps the confluent columns comparable.
  Eigen::VectorXd scale(A.cols());
  for (Eigen::Index j = 0; j < A.cols(); ++j) scale(j) = std::max(A.col(j).norm(), 1e-300);
  const Eigen::MatrixXcd As = A * scale.cwiseInverse().asDiagonal();
  Eigen::VectorXcd x = As.colPivHouseholderQr().solve(b);
  return scale.cwiseInverse().asDiagonal() * x;
}

// Gauss-Newton on u(k) = sum beta_j p_j^k for simple nonzero poles.
void polish_simple(std::vector<PoleTerm>& terms, const Eigen::VectorXcd& data, double margin) {
  const auto K = data.size();
  const auto n = static_cast<Eigen::Index>(terms.size());
  auto residual = [&](const std::vector<PoleTerm>& t) {
    Eigen::VectorXcd r = -data;
    for (const auto& term : t) {
      cplx pk = 1.0;
      for (Eigen::Index k = 0; k < K; ++k) {
        r[k] += term.coeffs[0] * pk;
        pk *= term.pole;
      }
    }
    return r;
  };
  Eigen::VectorXcd r = residual(terms);
  for (int it = 0; it < 20; ++it) {
    Eigen::MatrixXcd J(K, 2 * n);
    for (Eigen::Index j = 0; j < n; ++j) {
      const auto& t = terms[static_cast<std::size_t>(j)];
      cplx pk = 1.0, dpk = 0.0;
      for (Eigen::Index k = 0; k < K; ++k) {
        J(k, j) = pk;
        J(k, n + j) = t.coeffs[0] * dpk;
        dpk = pk * static_cast<double>(k + 1);
        pk *= t.pole;
      }
    }
    const Eigen::VectorXcd step = least_squares(J, -r);
    auto trial = terms;
    bool inside = true;
    for (Eigen::Index j = 0; j < n; ++j) {
      auto& t = trial[static_cast<std::size_t>(j)];
      t.coeffs[0] += step[j];
      t.pole += step[n + j];
      inside = inside && std::abs(t.pole) < 1.0 - margin;
    }
    if (!inside) break;
    const Eigen::VectorXcd rt = residual(trial);
    if (!(rt.norm() < r.norm())) break;
    const double move = step.tail(n).cwiseAbs().maxCoeff();
    terms = std::move(trial);
    r = rt;
    if (move < 1e-15) break;
  }
}

}  // namespace

std::size_t numerical_rank(const FourierSymbol& u, std::size_t k_op, double tol) {
  const Eigen::MatrixXcd G = hankel_matrix(u, k_op).gamma;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(G);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  std::size_t rank = 0;
  for (Eigen::Index j = 0; j < s.size(); ++j) rank += s(j) > tol * s(0) ? 1 : 0;
  return rank;
}

std::vector<cplx> expand_terms(const std::vector<PoleTerm>& terms, std::size_t K) {
  std::vector<cplx> out(K, cplx{});
  for (const auto& t : terms) {
    for (std::size_t r = 1; r <= t.coeffs.size(); ++r) {
      if (t.pole == cplx{}) {
        if (r - 1 < K) out[r - 1] += t.coeffs[r - 1];
        continue;
      }
      cplx pk = 1.0;
      for (std::size_t k = 0; k < K; ++k) {
        out[k] += t.coeffs[r - 1] * binom(k + r - 1, r - 1) * pk;
        pk *= t.pole;
      }
    }
  }
  return out;
}

RecoveryResult recover_rational(const std::vector<cplx>& coeffs, std::size_t N, const RecoveryOptions& opt) {
  const std::size_t K = coeffs.size();
  if (N < 1) throw std::invalid_argument("recover_rational: N must be >= 1");
  if (K < 2 * N + 2) throw std::invalid_argument("recover_rational: need K >= 2N + 2 coefficients");

  const auto rows = static_cast<Eigen::Index>(K - N);
  const auto cols = static_cast<Eigen::Index>(N + 1);
  Eigen::MatrixXcd H(rows, cols);
  for (Eigen::Index k = 0; k < rows; ++k) {
    for (Eigen::Index l = 0; l < cols; ++l) H(k, l) = coeffs[static_cast<std::size_t>(k + l)];
  }
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(H, Eigen::ComputeFullV);
  const Eigen::VectorXd s = svd.singularValues();
  if (s(0) == 0.0) throw std::invalid_argument("recover_rational: zero coefficient sequence");
  std::size_t null_dim = 0;
  for (Eigen::Index j = 0; j < s.size(); ++j) null_dim += s(j) <= opt.null_tol * s(0) ? 1 : 0;
  if (null_dim != 1) {
    throw std::invalid_argument("recover_rational: recurrence nullspace has dimension " + std::to_string(null_dim) +
                                " (rank mismatch with N = " + std::to_string(N) + ")");
  }

  RecoveryResult res;
  res.singular_values.assign(s.data(), s.data() + s.size());
  Eigen::VectorXcd c = svd.matrixV().col(cols - 1);
  // Fix the phase so that c_N is real and positive.
  if (std::abs(c[cols - 1]) > 0.0) c *= std::abs(c[cols - 1]) / c[cols - 1];
  res.model.order = N;
  res.model.c.assign(c.data(), c.data() + c.size());
  if (poly::degree(res.model.c, 1e-14) != N) {
    throw std::invalid_argument("recover_rational: degenerate recurrence (leading coefficient vanishes)");
  }

  const auto rts = poly::roots(res.model.c);
  for (const cplx& r : rts) {
    if (!(std::abs(r) < 1.0 - opt.disc_margin)) {
      throw std::invalid_argument("recover_rational: root outside the unit disc, not a Hardy symbol");
    }
  }
  const auto cl = cluster(rts, opt.cluster_tol);

  Eigen::VectorXcd data(static_cast<Eigen::Index>(K));
  for (std::size_t k = 0; k < K; ++k) data[static_cast<Eigen::Index>(k)] = coeffs[k];
  const Eigen::VectorXcd beta = least_squares(term_basis(cl, K), data);

  Eigen::Index idx = 0;
  bool all_simple = true;
  for (const auto& cc : cl) {
    PoleTerm t;
    t.pole = cc.center;
    t.multiplicity = cc.multiplicity;
    for (int r = 0; r < cc.multiplicity; ++r) t.coeffs.push_back(beta[idx++]);
    all_simple = all_simple && cc.multiplicity == 1 && cc.center != cplx{};
    res.terms.push_back(std::move(t));
  }
  if (opt.polish && all_simple) polish_simple(res.terms, data, opt.disc_margin);

  for (const auto& t : res.terms) {
    res.model.roots.push_back(t.pole);
    res.model.multiplicities.push_back(t.multiplicity);
  }

  const auto fitted = expand_terms(res.terms, K);
  double r2 = 0.0;
  for (std::size_t k = 0; k < K; ++k) r2 += std::norm(fitted[k] - coeffs[k]);
  res.residual = std::sqrt(r2);

  std::vector<cplx> B{1.0};
  for (const auto& t : res.terms) {
    if (t.pole == cplx{}) continue;
    for (int r = 0; r < t.multiplicity; ++r) B = poly::multiply(B, {1.0, -t.pole});
  }
  std::vector<cplx> A(N, cplx{});
  for (std::size_t k = 0; k < N; ++k) {
    for (std::size_t j = 0; j <= k && j < B.size(); ++j) A[k] += B[j] * fitted[k - j];
  }
  res.symbol = RationalSymbol{std::move(A), std::move(B)};
  return res;
}

namespace {

RoundtripReport roundtrip(std::vector<cplx> true_poles, std::vector<cplx> coeffs, std::size_t N, double noise,
                          std::uint64_t seed) {
  RoundtripReport rep;
  rep.N = N;
  rep.K = coeffs.size();
  rep.noise = noise;
  if (noise > 0.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, noise / std::sqrt(2.0));
    for (auto& x : coeffs) x += cplx(g(rng), g(rng));
  }
  rep.detected_rank = numerical_rank(FourierSymbol(coeffs), rep.K, noise > 0.0 ? 100.0 * noise : 1e-10);
  const auto rec = recover_rational(coeffs, N);
  rep.residual = rec.residual;

  std::vector<cplx> found;
  for (const auto& t : rec.terms) {
    rep.multiplicities.push_back(t.multiplicity);
    for (int r = 0; r < t.multiplicity; ++r) found.push_back(t.pole);
  }
  std::vector<bool> used(found.size(), false);
  rep.true_poles = std::move(true_poles);
  for (const cplx& p : rep.true_poles) {
    std::size_t best = found.size();
    for (std::size_t j = 0; j < found.size(); ++j) {
      if (!used[j] && (best == found.size() || std::abs(found[j] - p) < std::abs(found[best] - p))) best = j;
    }
    if (best == found.size()) {
      rep.recovered_poles.push_back(cplx(std::nan(""), std::nan("")));
      rep.max_pole_error = std::numeric_limits<double>::infinity();
      continue;
    }
    used[best] = true;
    rep.recovered_poles.push_back(found[best]);
    rep.max_pole_error = std::max(rep.max_pole_error, std::abs(found[best] - p));
  }
  return rep;
}

}  // namespace

RoundtripReport roundtrip_check(const RationalState& state, std::size_t K, double noise, std::uint64_t seed) {
  std::vector<cplx> poles = state.poles;
  if (state.constant) poles.push_back(0.0);
  const std::size_t N = poles.size();
  return roundtrip(std::move(poles), rational_to_fourier(state, K).to_vector(), N, noise, seed);
}

RoundtripReport roundtrip_check(const RationalSymbol& sym, std::size_t K, double noise, std::uint64_t seed) {
  sym.validate();
  // Repeated roots of B come back from the eigensolver split by ~sqrt(eps);
  // their mean is accurate.
  std::vector<cplx> poles;
  std::vector<cplx> inv;
  for (const cplx& z : poly::roots(sym.denominator)) inv.push_back(1.0 / z);
  for (const auto& c : cluster(inv, 1e-6)) {
    for (int r = 0; r < c.multiplicity; ++r) poles.push_back(c.center);
  }
  const std::size_t N = sym.rank();
  while (poles.size() < N) poles.push_back(0.0);
  return roundtrip(std::move(poles), sym.to_fourier(K).to_vector(), N, noise, seed);
}

}  // namespace szego
