#include "szego/initial_data.hpp"

#include <cmath>
#include <sstream>

namespace szego {
namespace {

// "name(arg, arg)" -> name and arguments; plain strings give no arguments.
std::pair<std::string, std::vector<std::string>> split_call(const std::string& text) {
  const auto open = text.find('(');
  if (open == std::string::npos) return {text, {}};
  if (text.back() != ')') throw ConfigError("initial.u0: missing ')' in '" + text + "'");
  std::vector<std::string> args;
  std::stringstream ss(text.substr(open + 1, text.size() - open - 2));
  std::string item;
  while (std::getline(ss, item, ',')) args.push_back(item);
  std::string name = text.substr(0, open);
  while (!name.empty() && name.back() == ' ') name.pop_back();
  return {name, args};
}

cplx arg_or_key(const std::vector<std::string>& args, std::size_t i, const Config& cfg, const std::string& key,
                std::optional<cplx> fallback = std::nullopt) {
  if (i < args.size()) return parse_complex(args[i]);
  if (cfg.has(key)) return cfg.get_complex(key, {});
  if (fallback) return *fallback;
  throw ConfigError("missing required key '" + key + "'");
}

}  // namespace

InitialData read_initial_data(const Config& cfg) {
  std::string family = cfg.get_string("initial.family", "");
  std::vector<std::string> args;
  if (cfg.has("initial.u0")) {
    auto [name, a] = split_call(cfg.get_string("initial.u0"));
    if (!family.empty() && family != name) throw ConfigError("initial.u0 and initial.family disagree");
    family = name;
    args = std::move(a);
  }
  if (family.empty()) throw ConfigError("missing required key 'initial.family'");

  InitialData d;
  d.family = family;
  std::ostringstream desc;

  if (family == "phi") {
    const cplx alpha = arg_or_key(args, 0, cfg, "initial.alpha");
    const cplx p = arg_or_key(args, 1, cfg, "initial.p");
    if (!(std::abs(p) < 1.0)) throw ConfigError("initial: phi needs |p| < 1");
    if (alpha == cplx{}) throw ConfigError("initial: phi needs alpha != 0");
    d.chart = RationalState{{alpha}, {p}, std::nullopt};
    d.fourier = [s = *d.chart](std::size_t K) { return rational_to_fourier(s, K); };
    d.exact = [alpha, p](double t, std::size_t K) {
      const auto [a, q] = m1_solution(alpha, p, t);
      return rational_to_fourier(RationalState{{a}, {q}, std::nullopt}, K);
    };
    desc << "alpha/(1-pz), alpha=" << alpha << ", p=" << p;
  } else if (family == "z+eps" || family == "mtilde1") {
    MTilde1State s;
    if (family == "z+eps") {
      const double eps = arg_or_key(args, 0, cfg, "initial.eps").real();
      s = {1.0, eps, 0.0};
      d.eps = eps;
      desc << "z + " << eps;
    } else {
      s = {arg_or_key(args, 0, cfg, "initial.a"), arg_or_key(args, 1, cfg, "initial.b"),
           arg_or_key(args, 2, cfg, "initial.p", cplx{})};
      desc << "(az+b)/(1-pz), a=" << s.a << ", b=" << s.b << ", p=" << s.p;
    }
    try {
      s.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("initial: ") + e.what());
    }
    d.mtilde1 = s;
    d.fourier = [s](std::size_t K) { return s.to_fourier(K); };
    d.exact = [s](double t, std::size_t K) { return mtilde1_solution(s.a, s.b, s.p, t).first.to_fourier(K); };
  } else if (family == "constant") {
    const cplx c = arg_or_key(args, 0, cfg, "initial.value");
    d.fourier = [c](std::size_t K) { return FourierSymbol::constant(c).resized(K); };
    d.exact = [c](double t, std::size_t K) {
      return FourierSymbol::constant(c * std::polar(1.0, -std::norm(c) * t)).resized(K);
    };
    desc << "constant " << c;
  } else if (family == "coeffs") {
    const auto c = cfg.get_complexes("initial.coeffs");
    if (c.empty()) throw ConfigError("initial.coeffs must list at least one coefficient");
    d.fourier = [c](std::size_t K) { return FourierSymbol(c).resized(K); };
    desc << "coefficients (" << c.size() << ")";
  } else if (family == "rational") {
    RationalState s;
    s.residues = cfg.get_complexes("initial.residues");
    s.poles = cfg.get_complexes("initial.poles");
    if (cfg.has("initial.constant")) s.constant = cfg.get_complex("initial.constant", {});
    try {
      s.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("initial: ") + e.what());
    }
    if (s.size() == 0) throw ConfigError("initial: rational family needs at least one pole");
    d.chart = s;
    d.fourier = [s](std::size_t K) { return rational_to_fourier(s, K); };
    if (s.size() == 1 && !s.constant) {
      d.exact = [s](double t, std::size_t K) {
        const auto [a, q] = m1_solution(s.residues[0], s.poles[0], t);
        return rational_to_fourier(RationalState{{a}, {q}, std::nullopt}, K);
      };
    }
    desc << "rational, " << s.size() << " poles" << (s.constant ? " + constant" : "");
  } else {
    throw ConfigError("initial: unknown family '" + family + "'");
  }

  if (cfg.has("initial.perturbation")) {
    std::vector<std::pair<std::size_t, cplx>> terms;
    for (const auto& item : cfg.get_strings("initial.perturbation")) {
      const auto colon = item.find(':');
      if (colon == std::string::npos) throw ConfigError("initial.perturbation: expected k:value, got '" + item + "'");
      const long k = std::stol(item.substr(0, colon));
      if (k < 0) throw ConfigError("initial.perturbation: negative frequency");
      terms.emplace_back(static_cast<std::size_t>(k), parse_complex(item.substr(colon + 1)));
      desc << " + (" << terms.back().second << ") z^" << k;
    }
    auto base = d.fourier;
    d.fourier = [base, terms](std::size_t K) {
      FourierSymbol u = base(K);
      for (const auto& [k, c] : terms) u += FourierSymbol::monomial(k, c).resized(K);
      return u.resized(K);
    };
    d.exact = nullptr;
    d.chart.reset();
    d.mtilde1.reset();
    d.perturbed = true;
  }
  d.description = desc.str();
  return d;
}

}  // namespace szego
