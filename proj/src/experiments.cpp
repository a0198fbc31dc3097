#include "szego/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <ostream>
#include <random>
#include <thread>

#include "szego/flow.hpp"
#include "szego/hankel.hpp"
#include "szego/initial_data.hpp"
#include "szego/kronecker.hpp"
#include "szego/rational.hpp"
#include "szego/waves.hpp"

namespace szego {
namespace fs = std::filesystem;

namespace {

struct Log {
  std::ostream* os = nullptr;
  bool verbose = false;
  void operator()(const std::string& msg) const {
    if (os && verbose) *os << msg << '\n';
  }
};

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : g_(seed) {}
  double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(g_); }
  int integer(int a, int b) { return std::uniform_int_distribution<int>(a, b)(g_); }
  cplx cnormal() {
    std::normal_distribution<double> n(0.0, 1.0);
    const double re = n(g_);
    return {re, n(g_)};
  }
  cplx in_disc(double radius) { return std::polar(radius * std::sqrt(uniform(0.0, 1.0)), uniform(0.0, 2.0 * kPi)); }

 private:
  std::mt19937_64 g_;
};

class Checker {
 public:
  Checker(const Config& cfg, ExperimentResult& res) : cfg_(cfg), res_(res) {}

  void check(const std::string& name, double value, const std::string& rel, double fallback) {
    const std::string key = "assert." + name;
    if (cfg_.get_string(key, "") == "off") return;
    const double thr = cfg_.get_double(key, fallback);
    bool pass = false;
    if (rel == "<") pass = value < thr;
    if (rel == "<=") pass = value <= thr;
    if (rel == ">") pass = value > thr;
    if (rel == ">=") pass = value >= thr;
    if (rel == "==") pass = value == thr;
    res_.assertions.push_back({name, value, rel, thr, pass});
  }

 private:
  const Config& cfg_;
  ExperimentResult& res_;
};

using Compute = std::function<void(ExperimentResult&, Checker&, const fs::path&)>;

std::size_t positive(const Config& c, const std::string& key, long fallback) {
  const long v = c.get_int(key, fallback);
  if (v < 1) throw ConfigError(key + " must be >= 1");
  return static_cast<std::size_t>(v);
}

FlowConfig read_flow(const Config& c) {
  FlowConfig f;
  f.dt = c.get_double("flow.dt", f.dt);
  f.t_end = c.get_double("flow.t_end", f.t_end);
  const std::string scheme = c.get_string("flow.scheme", "rk4");
  if (scheme == "rk4") {
    f.scheme = Scheme::Rk4;
  } else if (scheme == "rk45") {
    f.scheme = Scheme::Rk45;
  } else {
    throw ConfigError("flow.scheme must be rk4 or rk45");
  }
  f.sample_every = positive(c, "flow.sample_every", static_cast<long>(f.sample_every));
  f.K = positive(c, "flow.K", static_cast<long>(f.K));
  f.rtol = c.get_double("flow.rtol", f.rtol);
  f.atol = c.get_double("flow.atol", f.atol);
  f.dt_min = c.get_double("flow.dt_min", f.dt_min);
  f.hs_orders = c.get_doubles("flow.hs_orders", f.hs_orders);
  f.monitor_spectrum = c.get_bool("flow.monitor_spectrum", f.monitor_spectrum);
  f.spectrum_count = positive(c, "flow.spectrum_count", static_cast<long>(f.spectrum_count));
  try {
    f.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("flow: ") + e.what());
  }
  return f;
}

double rel_drift(const std::vector<double>& col) {
  double d = 0.0;
  if (col.empty()) return d;
  const double scale = std::max(std::abs(col.front()), 1e-300);
  for (double x : col) d = std::max(d, std::abs(x - col.front()) / scale);
  return d;
}

void add_column(CsvTable& t, const std::string& name, const std::vector<double>& values) {
  t.columns.push_back(name);
  for (std::size_t i = 0; i < t.rows.size(); ++i) t.rows[i].push_back(values[i]);
}

std::uint64_t seed_of(const Config& c) { return static_cast<std::uint64_t>(c.get_int("seed", 0)); }

json mtilde1_json(const MTilde1State& s) { return {{"a", to_json(s.a)}, {"b", to_json(s.b)}, {"p", to_json(s.p)}}; }

json chart_json(const RationalState& s) {
  json j = {{"residues", to_json(s.residues)}, {"poles", to_json(s.poles)}};
  j["constant"] = s.constant ? to_json(*s.constant) : json(nullptr);
  return j;
}

// ---------------------------------------------------------------- evolve

Compute prepare_flow_run(const Config& cfg, Log log, bool hierarchy) {
  const InitialData init = read_initial_data(cfg);
  const FlowConfig fc = read_flow(cfg);
  const long n = cfg.get_int("hierarchy.n", 2);
  if (hierarchy && n < 1) throw ConfigError("hierarchy.n must be >= 1");

  return [=](ExperimentResult& res, Checker& chk, const fs::path& out) {
    const FourierSymbol u0 = init.fourier(fc.K);
    log("integrating " + init.description + " to t = " + format_double(fc.t_end));
    TimeSeries s = integrate(u0, fc, hierarchy ? Field::hierarchy(static_cast<int>(n)) : Field::szego());
    MonitorReport rep;
    if (s.size() >= 3) rep = lax_residual_along(s);

    CsvTable t = series_table(s);
    t.comment = (hierarchy ? "flow of J_" + std::to_string(2 * n) : std::string("cubic Szego flow")) + ", u0 = " +
                init.description;
    json drift = {{"Q", rel_drift(s.Q)}, {"M", rel_drift(s.M)}, {"E", rel_drift(s.E)},
                  {"J6", rel_drift(s.J6)}, {"J8", rel_drift(s.J8)}};
    for (const auto& [order, col] : s.hs) drift["Hs_" + format_double(order)] = rel_drift(col);

    if (hierarchy) {
      std::vector<double> jcol;
      for (const auto& u : s.states) jcol.push_back(conserved_J(u, static_cast<int>(2 * n)).real());
      add_column(t, "J_2n", jcol);
      drift["J_2n"] = rel_drift(jcol);
      chk.check("Q_drift", drift["Q"], "<", 1e-8);
      chk.check("J_2n_drift", drift["J_2n"], "<", 1e-8);
    } else {
      chk.check("Q_drift", drift["Q"], "<", 1e-8);
      chk.check("M_drift", drift["M"], "<", 1e-8);
      chk.check("E_drift", drift["E"], "<", 1e-8);
      if (fc.monitor_spectrum) chk.check("spectrum_drift", rep.eigenvalue_drift, "<", 1e-7);
    }
    if (init.exact) {
      std::vector<double> err;
      double emax = 0.0;
      for (std::size_t i = 0; i < s.size(); ++i) {
        err.push_back(l2_norm(s.states[i] - init.exact(s.times[i], fc.K)));
        emax = std::max(emax, err.back());
      }
      add_column(t, "exact_error", err);
      res.metrics["exact_error_max"] = emax;
      if (!hierarchy) chk.check("exact_error", emax, "<", 1e-8);
    }
    res.metrics["drift"] = drift;
    res.metrics["eigenvalue_drift"] = rep.eigenvalue_drift;
    res.metrics["lax_residual_max"] = rep.lax_residual;
    res.metrics["K"] = fc.K;
    res.metrics["samples"] = s.size();
    if (!s.spectrum.empty()) res.metrics["spectrum_t0"] = s.spectrum.front();
    write_csv(out / "series.csv", t);
    write_json(out / "states.json", states_json(s));
  };
}

// ---------------------------------------------------------------- torus

Compute prepare_torus(const Config& cfg, Log log) {
  const InitialData init = read_initial_data(cfg);
  const FlowConfig fc = read_flow(cfg);
  return [=](ExperimentResult& res, Checker& chk, const fs::path& out) {
    const FourierSymbol u0 = init.fourier(fc.K);
    const TorusFit fit = fit_torus(u0);
    log("torus fit a = " + format_double(fit.a) + ", r = " + format_double(fit.r));
    TimeSeries s = integrate(u0, fc);
    CsvTable t = series_table(s);
    t.comment = "torus distance along the flow of u0 = " + init.description;
    std::vector<double> dist;
    double sup = 0.0;
    for (const auto& u : s.states) {
      dist.push_back(torus_distance(u, fit.a, fit.r));
      sup = std::max(sup, dist.back());
    }
    add_column(t, "torus_distance", dist);
    res.metrics["a"] = fit.a;
    res.metrics["r"] = fit.r;
    res.metrics["initial_distance"] = fit.distance;
    res.metrics["distance_sup"] = sup;
    chk.check("torus_distance_sup", sup, "<", 0.1);
    write_csv(out / "series.csv", t);
    write_json(out / "states.json", states_json(s));
  };
}

// ------------------------------------------------------- rational charts

Compute prepare_rational(const Config& cfg, Log log) {
  const InitialData init = read_initial_data(cfg);
  if (!init.mtilde1 && !init.chart) {
    throw ConfigError("rational-evolve needs a chart family (phi, rational, z+eps or mtilde1)");
  }
  RationalFlowConfig rc;
  rc.dt = cfg.get_double("rational.dt", rc.dt);
  rc.t_end = cfg.get_double("rational.t_end", rc.t_end);
  rc.sample_every = positive(cfg, "rational.sample_every", static_cast<long>(rc.sample_every));
  const double periods = cfg.get_double("rational.periods", 0.0);
  if (periods < 0.0) throw ConfigError("rational.periods must be >= 0");
  if (!(rc.dt > 0.0) || rc.t_end < 0.0) throw ConfigError("rational: need dt > 0 and t_end >= 0");
  const std::size_t grid = positive(cfg, "rational.grid", 64);

  if (init.mtilde1) {
    const MTilde1State s0 = *init.mtilde1;
    const MTilde1Solution inv = mtilde1_invariants(s0);
    if (periods > 0.0) {
      if (inv.stationary) throw ConfigError("rational.periods: the orbit is stationary");
      rc.t_end = periods * 2.0 * kPi / inv.Omega;
    }
    return [=](ExperimentResult& res, Checker& chk, const fs::path& out) {
      log("integrating the (a, b, p) chart to t = " + format_double(rc.t_end));
      const MTilde1Series s = integrate_mtilde1(s0, rc);
      CsvTable t;
      t.comment = "M~(1) chart, u0 = " + init.description;
      t.columns = {"t", "a_re", "a_im", "b_re", "b_im", "p_re", "p_im", "p_sq", "p_sq_exact", "state_error",
                   "Q", "M", "S_tilde"};
      if (init.eps) t.columns.push_back("p_sq_law");
      double law_err = 0.0, state_err = 0.0, pmax = 0.0, pmin = std::abs(s0.p);
      std::vector<double> Q, M, St;
      json states = json::array();
      for (std::size_t i = 0; i < s.states.size(); ++i) {
        const auto& st = s.states[i];
        const double tt = s.times[i];
        const MTilde1State ex = mtilde1_solution(s0.a, s0.b, s0.p, tt).first;
        const double e = std::sqrt(std::norm(st.a - ex.a) + std::norm(st.b - ex.b) + std::norm(st.p - ex.p));
        state_err = std::max(state_err, e);
        pmax = std::max(pmax, std::abs(st.p));
        pmin = std::min(pmin, std::abs(st.p));
        Q.push_back(st.mass());
        M.push_back(st.momentum());
        St.push_back(st.S_tilde());
        std::vector<double> row{tt, st.a.real(), st.a.imag(), st.b.real(), st.b.imag(), st.p.real(), st.p.imag(),
                                std::norm(st.p), std::norm(ex.p), e, Q.back(), M.back(), St.back()};
        double ref = std::norm(ex.p);
        if (init.eps) {
          const double eps = *init.eps;
          const double w = eps * std::sqrt(4.0 + eps * eps);
          ref = 2.0 / (4.0 + eps * eps) * (1.0 - std::cos(w * tt));
          row.push_back(ref);
        }
        law_err = std::max(law_err, std::abs(std::norm(st.p) - ref));
        t.add_row(std::move(row));
        json sj = mtilde1_json(st);
        sj["t"] = tt;
        states.push_back(std::move(sj));
      }
      const EvolutionReport ev = evolution_checks(s, grid);
      res.metrics["rho_min"] = inv.rho_min;
      res.metrics["rho_max"] = inv.rho_max;
      res.metrics["observed_p_min"] = pmin;
      res.metrics["observed_p_max"] = pmax;
      res.metrics["Omega"] = inv.Omega;
      res.metrics["t_end"] = rc.t_end;
      res.metrics["state_error_max"] = state_err;
      res.metrics["evolution"] = {{"a_residual", ev.a_residual},
                                  {"w_residual", ev.w_residual},
                                  {"b_residual", ev.b_residual}};
      res.metrics["drift"] = {{"Q", rel_drift(Q)}, {"M", rel_drift(M)}, {"S_tilde", rel_drift(St)}};
      chk.check("p_sq_law", law_err, "<", 1e-6);
      chk.check("rho_max_attained", std::abs(pmax - inv.rho_max), "<", 1e-6);
      chk.check("rho_min_attained", std::abs(pmin - inv.rho_min), "<", 1e-6);
      chk.check("Q_drift", rel_drift(Q), "<", 1e-8);
      chk.check("S_tilde_drift", rel_drift(St), "<", 1e-8);
      write_csv(out / "series.csv", t);
      write_json(out / "states.json", states);
    };
  }

  const RationalState s0 = *init.chart;
  const std::size_t K = positive(cfg, "rational.K", 128);
  return [=](ExperimentResult& res, Checker& chk, const fs::path& out) {
    log("integrating the pole/residue chart to t = " + format_double(rc.t_end));
    const RationalSeries s = integrate_rational(s0, rc);
    CsvTable t;
    t.comment = "rational chart, u0 = " + init.description;
    t.columns = {"t", "Q", "M", "S", "S_tilde"};
    for (std::size_t j = 0; j < s0.size(); ++j) t.columns.push_back("abs_p" + std::to_string(j + 1));
    std::vector<double> Q, M;
    json states = json::array();
    for (std::size_t i = 0; i < s.states.size(); ++i) {
      const auto& st = s.states[i];
      Q.push_back(chart_mass(st));
      M.push_back(chart_momentum(st));
      std::vector<double> row{s.times[i], Q.back(), M.back(), s.S[i], s.S_tilde[i]};
      for (const cplx& p : st.poles) row.push_back(std::abs(p));
      t.add_row(std::move(row));
      json sj = chart_json(st);
      sj["t"] = s.times[i];
      states.push_back(std::move(sj));
    }
    if (init.exact) {
      std::vector<double> err;
      double emax = 0.0;
      for (std::size_t i = 0; i < s.states.size(); ++i) {
        err.push_back(l2_norm(rational_to_fourier(s.states[i], K) - init.exact(s.times[i], K)));
        emax = std::max(emax, err.back());
      }
      add_column(t, "exact_error", err);
      res.metrics["exact_error_max"] = emax;
      chk.check("exact_error", emax, "<", 1e-8);
    }
    if (s.states.size() >= 3) {
      const EvolutionReport ev = evolution_checks(s, grid);
      res.metrics["evolution"] = {{"v_residual", ev.v_residual},
                                  {"b_residual", ev.b_residual},
                                  {"product_rate_residual", ev.product_rate_residual},
                                  {"a_residual", ev.a_residual},
                                  {"w_residual", ev.w_residual}};
    }
    const bool mt = s0.constant.has_value();
    const double sdrift = rel_drift(mt ? s.S_tilde : s.S);
    res.metrics["drift"] = {{"Q", rel_drift(Q)}, {"M", rel_drift(M)}, {mt ? "S_tilde" : "S", sdrift}};
    chk.check("Q_drift", rel_drift(Q), "<", 1e-8);
    chk.check("M_drift", rel_drift(M), "<", 1e-8);
    chk.check(mt ? "S_tilde_drift" : "S_drift", sdrift, "<", 1e-8);
    write_csv(out / "series.csv", t);
    write_json(out / "states.json", states);
  };
}

// ---------------------------------------------------------------- waves

Compute prepare_waves(const Config& cfg, Log log) {
  const int n_max = static_cast<int>(positive(cfg, "waves.N_max", 4));
  const auto ps = cfg.get_complexes("waves.p", {cplx(0.3), std::polar(0.6, kPi / 5.0)});
  const cplx alpha = cfg.get_complex("waves.alpha", 1.0);
  const double orbit_t = cfg.get_double("waves.orbit_t", 5.0);
  const double dt = cfg.get_double("waves.dt", 1e-3);
  const auto stat_poles = cfg.get_complexes("waves.stationary_poles", {cplx(0.5)});
  const cplx stat_alpha = cfg.get_complex("waves.stationary_alpha", 1.0);
  for (const cplx& p : ps) {
    if (!(std::abs(p) > 0.0 && std::abs(p) < 1.0)) throw ConfigError("waves.p: need 0 < |p| < 1");
  }
  for (const cplx& p : stat_poles) {
    if (!(std::abs(p) < 1.0)) throw ConfigError("waves.stationary_poles: need |p| < 1");
  }
  if (alpha == cplx{}) throw ConfigError("waves.alpha must be nonzero");
  if (!(dt > 0.0) || !(orbit_t >= 0.0)) throw ConfigError("waves: need dt > 0 and orbit_t >= 0");

  return [=](ExperimentResult& res, Checker& chk, const fs::path& out) {
    CsvTable t;
    t.comment = "traveling-wave certificates";
    t.columns = {"N", "ell", "p_re", "p_im", "c", "omega", "Q", "wave_residual", "commutator_norm", "eqop_residual",
                 "q_minus_nc", "orbit_error", "one_in_range"};
    json certs = json::array();
    double r_max = 0, c_max = 0, e_max = 0, q_max = 0, o_max = 0;
    std::size_t applicable = 0;
    for (const cplx& p : ps) {
      for (int N = 1; N <= n_max; ++N) {
        for (int ell = 0; ell < N; ++ell) {
          log("wave N = " + std::to_string(N) + ", ell = " + std::to_string(ell));
          const WaveCertificate c = certify_traveling_wave(N, ell, p, alpha, orbit_t, dt);
          r_max = std::max(r_max, c.residual);
          c_max = std::max(c_max, c.commutator_norm);
          e_max = std::max(e_max, c.eqop_residual);
          q_max = std::max(q_max, c.q_minus_nc);
          o_max = std::max(o_max, c.orbit_error);
          if (c.mtilde_relation) {
            ++applicable;
            chk.check("mtilde_relation_N" + std::to_string(N), *c.mtilde_relation, "<", 1e-10);
          }
          t.add_row({double(N), double(ell), p.real(), p.imag(), c.wave.c, c.wave.omega, c.wave.Q, c.residual,
                     c.commutator_norm, c.eqop_residual, c.q_minus_nc, c.orbit_error, c.one_in_range ? 1.0 : 0.0});
          certs.push_back(to_json(c));
        }
      }
    }
    const StationaryWave sw = stationary_wave(stat_poles, stat_alpha);
    const double sres = wave_residual(sw.u, 0.0, sw.omega);
    const double sorbit = orbit_error(sw.u, 0.0, sw.omega, 1.0, dt);

    res.metrics["waves"] = certs.size();
    res.metrics["mtilde_relation_applicable"] = applicable;
    res.metrics["stationary"] = {{"poles", to_json(stat_poles)}, {"omega", sw.omega},
                                 {"modulus_defect", sw.modulus_defect}, {"wave_residual", sres},
                                 {"orbit_error_t1", sorbit}};
    chk.check("wave_residual_max", r_max, "<", 1e-10);
    chk.check("commutator_max", c_max, "<", 1e-10);
    chk.check("eqop_max", e_max, "<", 1e-10);
    chk.check("q_minus_nc_max", q_max, "<", 1e-12);
    chk.check("orbit_error_max", o_max, "<", 1e-7);
    chk.check("stationary_residual", sres, "<", 1e-11);
    chk.check("stationary_orbit_error", sorbit, "<", 1e-8);
    write_csv(out / "series.csv", t);
    write_json(out / "states.json", {{"traveling", certs}, {"stationary", to_json(sw.u)}});
  };
}

// ------------------------------------------------------------- kronecker

RationalState random_chart(Rng& rng, std::size_t N, double radius, double sep) {
  RationalState s;
  while (s.poles.size() < N) {
    const cplx p = rng.in_disc(radius);
    bool ok = true;
    for (const cplx& q : s.poles) ok = ok && std::abs(p - q) >= sep;
    if (!ok) continue;
    s.poles.push_back(p);
    s.residues.push_back(std::polar(rng.uniform(0.5, 1.5), rng.uniform(0.0, 2.0 * kPi)));
  }
  return s;
}

Compute prepare_kronecker(const Config& cfg, Log log) {
  const std::size_t count = positive(cfg, "kronecker.count", 50);
  const std::size_t n_max = positive(cfg, "kronecker.N_max", 6);
  const std::size_t K = positive(cfg, "kronecker.K", 128);
  const double radius = cfg.get_double("kronecker.radius", 0.9);
  const double sep = cfg.get_double("kronecker.separation", 0.05);
  const double rank_tol = cfg.get_double("kronecker.rank_tol", 1e-10);
  const cplx confluent = cfg.get_complex("kronecker.confluent_pole", cplx(0.5, 0.3));
  const std::uint64_t seed = seed_of(cfg);
  if (!(radius > 0.0 && radius < 1.0)) throw ConfigError("kronecker.radius must lie in (0, 1)");
  if (K < 2 * n_max + 2) throw ConfigError("kronecker.K must be >= 2 N_max + 2");
  if (!(std::abs(confluent) > 0.0 && std::abs(confluent) < 1.0)) throw ConfigError("kronecker.confluent_pole");

  return [=](ExperimentResult& res, Checker& chk, const fs::path& out) {
    Rng rng(seed);
    CsvTable t;
    t.comment = "Kronecker rank and pole recovery on random M(N) symbols";
    t.columns = {"index", "N", "detected_rank", "max_pole_error", "residual"};
    json reports = json::array();
    std::size_t mismatches = 0;
    double err_max = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
      const auto N = static_cast<std::size_t>(rng.integer(1, static_cast<int>(n_max)));
      const RationalState s = random_chart(rng, N, radius, sep);
      const FourierSymbol u = rational_to_fourier(s, K);
      const std::size_t rank = numerical_rank(u, K / 2, rank_tol);
      if (rank != N) ++mismatches;
      double err = std::numeric_limits<double>::infinity();
      double resid = std::numeric_limits<double>::infinity();
      json rj;
      try {
        const RoundtripReport rep = roundtrip_check(s, K, 0.0);
        err = rep.max_pole_error;
        resid = rep.residual;
        rj = to_json(rep);
      } catch (const std::invalid_argument& e) {
        rj = {{"error", e.what()}};
      }
      rj["rank"] = rank;
      err_max = std::max(err_max, err);
      log("instance " + std::to_string(i) + ": N = " + std::to_string(N) + ", pole error " + format_double(err));
      t.add_row({double(i), double(N), double(rank), err, resid});
      reports.push_back(std::move(rj));
    }
    RationalSymbol dbl{{1.0, 0.5}, {1.0, -2.0 * confluent, confluent * confluent}};
    const RoundtripReport crep = roundtrip_check(dbl, K, 0.0);
    const double mult = crep.multiplicities.size() == 1 ? crep.multiplicities[0] : -1.0;

    res.metrics["count"] = count;
    res.metrics["rank_mismatches"] = mismatches;
    res.metrics["pole_error_max"] = err_max;
    res.metrics["confluent"] = to_json(crep);
    chk.check("rank_mismatches", double(mismatches), "==", 0.0);
    chk.check("pole_error_max", err_max, "<", 1e-9);
    chk.check("confluent_multiplicity", mult, "==", 2.0);
    write_csv(out / "series.csv", t);
    write_json(out / "states.json", {{"instances", reports}, {"confluent", to_json(crep)}});
  };
}

// ------------------------------------------------------------ hs-growth

Compute prepare_hs_growth(const Config& cfg, Log) {
  const auto eps = cfg.get_doubles("hs.eps", {0.1, 0.05, 0.025});
  const auto orders = cfg.get_doubles("hs.s", {1.0, 2.0});
  const double tol = cfg.get_double("hs.slope_tol", 0.1);
  for (double e : eps) {
    if (!(e > 0.0 && e < 1.0)) throw ConfigError("hs.eps entries must lie in (0, 1)");
  }
  for (double s : orders) {
    if (!(s > 0.5)) throw ConfigError("hs.s entries must exceed 1/2");
  }
  if (eps.size() < 2) throw ConfigError("hs.eps needs at least two values");

  return [=](ExperimentResult& res, Checker& chk, const fs::path& out) {
    CsvTable t;
    t.comment = "H^s norm of the M~(1) solution from z + eps at t_eps";
    t.columns = {"s", "eps", "t_eps", "hs_norm"};
    json tables = json::array();
    for (double s : orders) {
      const HsGrowthTable tab = hs_growth_series(eps, s);
      json rows = json::array();
      for (const auto& r : tab.rows) {
        t.add_row({s, r.eps, r.t_eps, r.hs_norm});
        const auto st = mtilde1_solution(1.0, r.eps, 0.0, r.t_eps).first;
        rows.push_back({{"eps", r.eps}, {"t_eps", r.t_eps}, {"state", mtilde1_json(st)}});
      }
      const double expected = 2.0 * s - 1.0;
      const double rel = std::abs(tab.slope - expected) / expected;
      res.metrics["slope_s" + format_double(s)] = tab.slope;
      chk.check("slope_rel_error_s" + format_double(s), rel, "<", tol);
      tables.push_back({{"s", s}, {"slope", tab.slope}, {"rows", rows}});
    }
    write_csv(out / "series.csv", t);
    write_json(out / "states.json", tables);
  };
}

// ----------------------------------------------------------- identities

FourierSymbol random_polynomial(Rng& rng, int degree) {
  std::vector<cplx> c(static_cast<std::size_t>(degree) + 1);
  for (auto& x : c) x = rng.cnormal();
  return FourierSymbol(std::move(c));
}

FourierSymbol random_m1(Rng& rng, double radius) {
  const cplx alpha = std::polar(rng.uniform(0.2, 1.0), rng.uniform(0.0, 2.0 * kPi));
  const cplx p = rng.in_disc(radius);
  const double r = std::abs(p);
  const std::size_t K = r < 1e-3 ? 16 : std::max<std::size_t>(16, static_cast<std::size_t>(std::ceil(std::log(1e-17) / std::log(r))) + 1);
  return rational_to_fourier(RationalState{{alpha}, {p}, std::nullopt}, K);
}

Compute prepare_identities(const Config& cfg, Log log) {
  const auto checks = cfg.get_strings("identities.checks", {"rio", "sharp", "hierarchy", "genericity"});
  for (const auto& c : checks) {
    if (c != "rio" && c != "sharp" && c != "hierarchy" && c != "genericity") {
      throw ConfigError("identities.checks: unknown check '" + c + "'");
    }
  }
  const std::size_t rio_count = positive(cfg, "identities.rio_count", 100);
  const int rio_degree = static_cast<int>(positive(cfg, "identities.rio_degree", 8));
  const std::size_t sharp_count = positive(cfg, "identities.sharp_count", 1000);
  const std::size_t sharp_K = positive(cfg, "identities.sharp_K", 32);
  const std::size_t m1_count = positive(cfg, "identities.m1_count", 100);
  const double m1_radius = cfg.get_double("identities.m1_radius", 0.7);
  const std::size_t h_count = positive(cfg, "identities.hierarchy_count", 50);
  const int h_degree = static_cast<int>(positive(cfg, "identities.hierarchy_degree", 6));
  const int h_max = static_cast<int>(positive(cfg, "identities.hierarchy_n_max", 4));
  const std::size_t g_count = positive(cfg, "identities.genericity_count", 20);
  const int g_max = static_cast<int>(positive(cfg, "identities.genericity_N_max", 4));
  const std::uint64_t seed = seed_of(cfg);
  if (!(m1_radius > 0.0 && m1_radius < 1.0)) throw ConfigError("identities.m1_radius must lie in (0, 1)");
  auto wants = [checks](const std::string& c) { return std::find(checks.begin(), checks.end(), c) != checks.end(); };

  return [=](ExperimentResult& res, Checker& chk, const fs::path& out) {
    Rng rng(seed);
    CsvTable t;
    t.comment = "check codes: 1 rio residual, 2 sharp gap (random), 3 sharp gap (M(1)), 4 max |bracket|, "
                "5 X_J2 + (i/2) u, 6 scaled F_2 on M(1), 7 scaled F_N(z^(N-1) + z^(N-2)) with index N";
    t.columns = {"check", "index", "value"};
    json worst = json::object();

    if (wants("rio")) {
      double mx = 0.0;
      for (std::size_t i = 0; i < rio_count; ++i) {
        const FourierSymbol u = random_polynomial(rng, rng.integer(0, rio_degree));
        const double r = rio_residual(u);
        t.add_row({1.0, double(i), r});
        if (r >= mx) worst["rio"] = to_json(u);
        mx = std::max(mx, r);
      }
      res.metrics["rio_residual_max"] = mx;
      chk.check("rio_residual_max", mx, "<", 1e-11);
      log("rio residual max " + format_double(mx));
    }
    if (wants("sharp")) {
      double gmin = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < sharp_count; ++i) {
        std::vector<cplx> c(sharp_K);
        for (std::size_t k = 0; k < sharp_K; ++k) c[k] = rng.cnormal() / (1.0 + double(k));
        const FourierSymbol u(std::move(c));
        const double g = sharp_inequality_gap(u);
        t.add_row({2.0, double(i), g});
        if (g <= gmin) worst["sharp_random"] = to_json(u);
        gmin = std::min(gmin, g);
      }
      double gmax = -std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < m1_count; ++i) {
        const FourierSymbol u = random_m1(rng, m1_radius);
        const double g = sharp_inequality_gap(u);
        t.add_row({3.0, double(i), g});
        gmax = std::max(gmax, g);
      }
      res.metrics["sharp_gap_min_random"] = gmin;
      res.metrics["sharp_gap_max_m1"] = gmax;
      chk.check("sharp_gap_min_random", gmin, ">=", -1e-10);
      chk.check("sharp_gap_max_m1", gmax, "<=", 1e-10);
    }
    if (wants("hierarchy")) {
      double bmax = 0.0, fmax = 0.0;
      for (std::size_t i = 0; i < h_count; ++i) {
        FourierSymbol u = random_polynomial(rng, rng.integer(1, h_degree));
        u *= 1.0 / l2_norm(u);
        double b = 0.0;
        for (int n = 1; n <= h_max; ++n) {
          for (int p = n + 1; p <= h_max; ++p) b = std::max(b, std::abs(poisson_bracket(u, n, p)));
        }
        const double f = l2_norm(hierarchy_field(u, 1) - (-0.5 * kI) * u) / l2_norm(u);
        t.add_row({4.0, double(i), b});
        t.add_row({5.0, double(i), f});
        if (b >= bmax) worst["hierarchy"] = to_json(u);
        bmax = std::max(bmax, b);
        fmax = std::max(fmax, f);
      }
      res.metrics["bracket_max"] = bmax;
      res.metrics["field1_error_max"] = fmax;
      chk.check("bracket_max", bmax, "<", 1e-10);
      chk.check("field1_error_max", fmax, "<", 1e-14);
    }
    if (wants("genericity")) {
      double fm1 = 0.0;
      for (std::size_t i = 0; i < g_count; ++i) {
        const double v = std::abs(genericity_det(random_m1(rng, m1_radius), 2).scaled);
        t.add_row({6.0, double(i), v});
        fm1 = std::max(fm1, v);
      }
      const double f_onez = genericity_det(FourierSymbol(std::vector<cplx>{1.0, 1.0}), 2).scaled;
      double fn_min = std::numeric_limits<double>::infinity();
      json fn = json::object();
      for (int N = 2; N <= g_max; ++N) {
        std::vector<cplx> c(static_cast<std::size_t>(N), cplx{});
        c[static_cast<std::size_t>(N - 1)] = 1.0;
        c[static_cast<std::size_t>(N - 2)] = 1.0;
        const GenericityDet g = genericity_det(FourierSymbol(std::move(c)), N);
        const double v = g.scaled;
        t.add_row({7.0, double(N), v});
        fn[std::to_string(N)] = {{"value", g.value}, {"scaled", v}};
        fn_min = std::min(fn_min, v);
      }
      res.metrics["F2_scaled_max_m1"] = fm1;
      res.metrics["F2_scaled_1_plus_z"] = f_onez;
      res.metrics["FN_scaled"] = fn;
      chk.check("F2_scaled_max_m1", fm1, "<", 1e-10);
      // Nonzero means well above the rounding floor of a scaled determinant.
      chk.check("F2_scaled_1_plus_z", f_onez, ">", 1e-12);
      chk.check("FN_scaled_min", fn_min, ">", 1e-12);
    }
    write_csv(out / "series.csv", t);
    write_json(out / "states.json", {{"worst_cases", worst}});
  };
}

// ---------------------------------------------------------------- sweep

Compute prepare_sweep(const Config& cfg, Log log);

Compute prepare(const Config& cfg, Log log, std::string& kind) {
  kind = cfg.get_string("kind");
  std::set<std::string> allowed{"kind", "name", "seed", "out", "assert.*"};
  auto allow = [&](std::initializer_list<const char*> keys) {
    for (const char* k : keys) allowed.insert(k);
  };
  Compute c;
  if (kind == "evolve" || kind == "hierarchy" || kind == "torus-stability") {
    allow({"initial.*", "flow.*"});
    if (kind == "hierarchy") allow({"hierarchy.n"});
    cfg.require_known(allowed);
    c = kind == "torus-stability" ? prepare_torus(cfg, log) : prepare_flow_run(cfg, log, kind == "hierarchy");
  } else if (kind == "rational-evolve") {
    allow({"initial.*", "rational.*"});
    cfg.require_known(allowed);
    c = prepare_rational(cfg, log);
  } else if (kind == "waves") {
    allow({"waves.*"});
    cfg.require_known(allowed);
    c = prepare_waves(cfg, log);
  } else if (kind == "kronecker") {
    allow({"kronecker.*"});
    cfg.require_known(allowed);
    c = prepare_kronecker(cfg, log);
  } else if (kind == "hs-growth") {
    allow({"hs.*"});
    cfg.require_known(allowed);
    c = prepare_hs_growth(cfg, log);
  } else if (kind == "identities") {
    allow({"identities.*"});
    cfg.require_known(allowed);
    c = prepare_identities(cfg, log);
  } else if (kind == "sweep") {
    allow({"sweep.*"});
    cfg.require_known(allowed);
    c = prepare_sweep(cfg, log);
  } else {
    throw ConfigError("unknown experiment kind '" + kind + "' (see `szego list-experiments`)");
  }
  return c;
}

ExperimentResult execute(const Config& cfg, const Compute& compute, const std::string& kind, const fs::path& out) {
  ExperimentResult res;
  res.kind = kind;
  res.name = cfg.get_string("name", fs::path(cfg.source()).stem().string());
  Checker chk(cfg, res);
  fs::create_directories(out);
  try {
    compute(res, chk, out);
  } catch (const NumericalError& e) {
    res.error = e.what();
  } catch (const std::invalid_argument& e) {
    res.error = e.what();
  }
  json s = res.summary();
  s["seed"] = cfg.get_int("seed", 0);
  write_json(out / "summary.json", s);
  return res;
}

Compute prepare_sweep(const Config& cfg, Log log) {
  const auto members = cfg.get_strings("sweep.members");
  if (members.empty()) throw ConfigError("sweep.members must list at least one config");
  const long threads = cfg.get_int("sweep.threads", 0);
  struct Member {
    Config cfg;
    std::string kind;
    Compute compute;
    std::string stem;
  };
  std::vector<Member> prepared;
  for (const auto& m : members) {
    const fs::path p = cfg.base_dir() / m;
    Member mem{Config::load(p), {}, {}, p.stem().string()};
    Log quiet{};  // member logging would interleave across threads
    mem.compute = prepare(mem.cfg, quiet, mem.kind);
    if (mem.kind == "sweep") throw ConfigError("sweep members cannot be sweeps: " + m);
    prepared.push_back(std::move(mem));
  }
  const std::size_t n_threads = std::max<std::size_t>(
      1, std::min<std::size_t>(prepared.size(),
                               threads > 0 ? static_cast<std::size_t>(threads) : std::thread::hardware_concurrency()));

  return [prepared, n_threads, log](ExperimentResult& res, Checker& chk, const fs::path& out) {
    std::vector<ExperimentResult> results(prepared.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (std::size_t i; (i = next.fetch_add(1)) < prepared.size();) {
        const auto& m = prepared[i];
        try {
          results[i] = execute(m.cfg, m.compute, m.kind, out / m.stem);
        } catch (const std::exception& e) {
          results[i].kind = m.kind;
          results[i].name = m.stem;
          results[i].error = e.what();
        }
      }
    };
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();

    CsvTable t;
    t.comment = "sweep members in listed order";
    t.columns = {"index", "pass", "assertions", "failed"};
    json list = json::array();
    for (std::size_t i = 0; i < results.size(); ++i) {
      const auto& r = results[i];
      std::size_t failed = 0;
      for (const auto& a : r.assertions) failed += a.pass ? 0 : 1;
      t.add_row({double(i), r.pass() ? 1.0 : 0.0, double(r.assertions.size()), double(failed)});
      json j = r.summary();
      j["member"] = prepared[i].stem;
      list.push_back(std::move(j));
      chk.check("member_" + prepared[i].stem, r.pass() ? 1.0 : 0.0, "==", 1.0);
      log(prepared[i].stem + (r.pass() ? ": pass" : ": FAIL"));
    }
    res.metrics["members"] = results.size();
    write_csv(out / "series.csv", t);
    write_json(out / "states.json", {{"members", list}});
  };
}

}  // namespace

bool ExperimentResult::pass() const {
  if (!error.empty() || assertions.empty()) return false;
  return std::all_of(assertions.begin(), assertions.end(), [](const Assertion& a) { return a.pass; });
}

json ExperimentResult::summary() const {
  json as = json::array();
  for (const auto& a : assertions) {
    as.push_back({{"name", a.name}, {"value", a.value}, {"relation", a.relation}, {"threshold", a.threshold},
                  {"pass", a.pass}});
  }
  json j = {{"kind", kind}, {"name", name}, {"pass", pass()}, {"assertions", as}, {"metrics", metrics}};
  if (!error.empty()) j["error"] = error;
  return j;
}

const std::vector<ExperimentInfo>& experiment_kinds() {
  static const std::vector<ExperimentInfo> kinds{
      {"evolve", "Galerkin-truncated Szego flow with conservation, isospectrality and exact-solution monitors"},
      {"rational-evolve", "RK4 in rational chart coordinates (poles/residues or (a, b, p)) against closed forms"},
      {"hierarchy", "flow of X_{J_2n} with conservation of Q and J_2n"},
      {"waves", "traveling- and stationary-wave certificates"},
      {"kronecker", "Hankel rank detection and rational recovery on random M(N) symbols"},
      {"hs-growth", "H^s norm growth along the M~(1) orbit of z + eps"},
      {"identities", "Lax identity, sharp inequality, hierarchy brackets and genericity determinants"},
      {"torus-stability", "H^{1/2} distance to the best-fitting M(1) torus along the flow"},
      {"sweep", "runs member configs concurrently, one subdirectory each"},
  };
  return kinds;
}

fs::path default_out_dir(const Config& cfg) {
  if (cfg.has("out")) return fs::path(cfg.get_string("out"));
  return fs::path("out") / fs::path(cfg.source()).stem();
}

ExperimentResult run_experiment(const Config& cfg, const RunOptions& opt) {
  Log log{opt.log, opt.verbose};
  std::string kind;
  const Compute compute = prepare(cfg, log, kind);
  const fs::path out = opt.out_dir.empty() ? default_out_dir(cfg) : opt.out_dir;
  return execute(cfg, compute, kind, out);
}

bool VerifyReport::pass() const {
  return !entries.empty() &&
         std::all_of(entries.begin(), entries.end(), [](const VerifyEntry& e) { return e.result.pass(); });
}

fs::path acceptance_dir() {
  if (const char* env = std::getenv("SZEGO_ACCEPTANCE_DIR"); env && *env) return env;
#ifdef SZEGO_ACCEPTANCE_DIR
  return SZEGO_ACCEPTANCE_DIR;
#else
  return "configs/acceptance";
#endif
}

VerifyReport verify_suite(const fs::path& config_dir, const fs::path& out_root, std::ostream* log) {
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(config_dir)) {
    if (e.is_regular_file() && e.path().extension() == ".cfg") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw ConfigError("no *.cfg files in " + config_dir.string());

  // Parse everything before computing anything.
  std::vector<Config> cfgs;
  for (const auto& f : files) cfgs.push_back(Config::load(f));

  VerifyReport rep;
  json list = json::array();
  for (std::size_t i = 0; i < files.size(); ++i) {
    RunOptions opt;
    opt.out_dir = out_root / files[i].stem();
    VerifyEntry e{files[i].filename().string(), run_experiment(cfgs[i], opt)};
    if (log) *log << (e.result.pass() ? "PASS  " : "FAIL  ") << e.config << '\n';
    list.push_back({{"config", e.config}, {"pass", e.result.pass()}});
    rep.entries.push_back(std::move(e));
  }
  write_json(out_root / "verify.json", {{"pass", rep.pass()}, {"configs", list}});
  return rep;
}

}  // namespace szego
