#pragma once

// Experiment configuration: INI-style "key = value" text where a [section]
// header prefixes the following keys ("[flow]" then "dt = 1e-3" gives the
// key "flow.dt"). Lines starting with '#' or ';' are comments.

#include <complex>
#include <filesystem>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace szego {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& what, long line = 0) : std::runtime_error(what), line_(line) {}
  /// 1-based source line for parse errors, 0 otherwise.
  long line() const noexcept { return line_; }

 private:
  long line_;
};

/// Complex literal: "1", "-2.5e-3", "0.3+0.2i", "-i", "0.6@0.2pi" (polar,
/// modulus@angle, angle in radians unless suffixed with "pi").
std::complex<double> parse_complex(const std::string& text);

class Config {
 public:
  static Config parse(const std::string& text, const std::string& source = "<string>");
  static Config load(const std::filesystem::path& path);

  /// Directory relative paths inside the config resolve against.
  const std::filesystem::path& base_dir() const noexcept { return base_dir_; }
  const std::string& source() const noexcept { return source_; }

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  long get_int(const std::string& key, long fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::complex<double> get_complex(const std::string& key, std::complex<double> fallback) const;
  /// Comma-separated, optionally bracketed: "[0.1, 0.05]" or "0.1, 0.05".
  std::vector<double> get_doubles(const std::string& key, std::vector<double> fallback = {}) const;
  std::vector<std::complex<double>> get_complexes(const std::string& key,
                                                  std::vector<std::complex<double>> fallback = {}) const;
  std::vector<std::string> get_strings(const std::string& key, std::vector<std::string> fallback = {}) const;

  /// Throws ConfigError naming the first key that matches none of the
  /// allowed keys. An allowed entry ending in '*' matches any suffix.
  void require_known(const std::set<std::string>& allowed) const;

  const std::map<std::string, std::string>& values() const noexcept { return values_; }
  void set(const std::string& key, const std::string& value) { values_[key] = value; }

 private:
  std::map<std::string, std::string> values_;
  std::filesystem::path base_dir_;
  std::string source_;
};

}  // namespace szego
