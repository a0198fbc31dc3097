#include "szego/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace szego {
namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  std::string out = s.substr(b, e - b);
  if (out.size() >= 2 && out.front() == '"' && out.back() == '"') out = out.substr(1, out.size() - 2);
  return out;
}

std::vector<std::string> split_list(std::string s) {
  s = trim(s);
  if (!s.empty() && s.front() == '[') {
    if (s.back() != ']') throw ConfigError("unterminated list: " + s);
    s = s.substr(1, s.size() - 2);
  }
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_real(const std::string& text, const std::string& what) {
  const std::string t = trim(text);
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (t.empty() || end != t.c_str() + t.size() || !std::isfinite(v)) {
    throw ConfigError("invalid number for " + what + ": '" + text + "'");
  }
  return v;
}

void flatten(const boost::property_tree::ptree& tree, const std::string& prefix,
             std::map<std::string, std::string>& out) {
  for (const auto& [key, child] : tree) {
    const std::string full = prefix.empty() ? key : prefix + "." + key;
    if (child.empty()) {
      out[full] = trim(child.data());
    } else {
      flatten(child, full, out);
    }
  }
}

}  // namespace

std::complex<double> parse_complex(const std::string& text) {
  const std::string t = trim(text);
  if (t.empty()) throw ConfigError("empty complex literal");
  if (const auto at = t.find('@'); at != std::string::npos) {
    const double r = parse_real(t.substr(0, at), "modulus");
    std::string ang = trim(t.substr(at + 1));
    double scale = 1.0;
    if (ang.size() >= 2 && ang.compare(ang.size() - 2, 2, "pi") == 0) {
      scale = 3.14159265358979323846;
      ang = ang.substr(0, ang.size() - 2);
      if (ang.empty()) ang = "1";
    }
    return std::polar(r, parse_real(ang, "angle") * scale);
  }
  if (t.back() != 'i') return {parse_real(t, "complex literal"), 0.0};

  // a+bi, a-bi, bi, +-i: split at the last sign that is not part of an exponent
  const std::string body = t.substr(0, t.size() - 1);
  std::size_t split = std::string::npos;
  for (std::size_t k = body.size(); k-- > 1;) {
    if ((body[k] == '+' || body[k] == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') {
      split = k;
      break;
    }
  }
  auto imag_part = [](const std::string& s) {
    if (s.empty() || s == "+") return 1.0;
    if (s == "-") return -1.0;
    return parse_real(s, "imaginary part");
  };
  if (split == std::string::npos) return {0.0, imag_part(body)};
  return {parse_real(body.substr(0, split), "real part"), imag_part(body.substr(split))};
}

Config Config::parse(const std::string& text, const std::string& source) {
  boost::property_tree::ptree tree;
  std::istringstream in(text);
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(source + ":" + std::to_string(e.line()) + ": " + e.message(), static_cast<long>(e.line()));
  }
  Config cfg;
  cfg.source_ = source;
  flatten(tree, "", cfg.values_);
  return cfg;
}

Config Config::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  Config cfg = parse(ss.str(), path.string());
  cfg.base_dir_ = path.parent_path();
  return cfg;
}

std::string Config::get_string(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("missing required key '" + key + "'");
  return it->second;
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

double Config::get_double(const std::string& key) const { return parse_real(get_string(key), key); }

double Config::get_double(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

long Config::get_int(const std::string& key, long fallback) const {
  if (!has(key)) return fallback;
  const std::string t = get_string(key);
  char* end = nullptr;
  const long v = std::strtol(t.c_str(), &end, 10);
  if (t.empty() || end != t.c_str() + t.size()) throw ConfigError("invalid integer for " + key + ": '" + t + "'");
  return v;
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const std::string t = get_string(key);
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  throw ConfigError("invalid boolean for " + key + ": '" + t + "'");
}

std::complex<double> Config::get_complex(const std::string& key, std::complex<double> fallback) const {
  if (!has(key)) return fallback;
  try {
    return parse_complex(get_string(key));
  } catch (const ConfigError& e) {
    throw ConfigError(key + ": " + e.what());
  }
}

std::vector<double> Config::get_doubles(const std::string& key, std::vector<double> fallback) const {
  if (!has(key)) return fallback;
  std::vector<double> out;
  for (const auto& item : split_list(get_string(key))) out.push_back(parse_real(item, key));
  return out;
}

std::vector<std::complex<double>> Config::get_complexes(const std::string& key,
                                                        std::vector<std::complex<double>> fallback) const {
  if (!has(key)) return fallback;
  std::vector<std::complex<double>> out;
  for (const auto& item : split_list(get_string(key))) {
    try {
      out.push_back(parse_complex(item));
    } catch (const ConfigError& e) {
      throw ConfigError(key + ": " + e.what());
    }
  }
  return out;
}

std::vector<std::string> Config::get_strings(const std::string& key, std::vector<std::string> fallback) const {
  return has(key) ? split_list(get_string(key)) : fallback;
}

void Config::require_known(const std::set<std::string>& allowed) const {
  for (const auto& [key, value] : values_) {
    bool ok = allowed.count(key) != 0;
    for (const auto& a : allowed) {
      if (!ok && !a.empty() && a.back() == '*' && key.compare(0, a.size() - 1, a, 0, a.size() - 1) == 0) ok = true;
    }
    if (!ok) throw ConfigError(source_ + ": unknown key '" + key + "'");
  }
}

}  // namespace szego
