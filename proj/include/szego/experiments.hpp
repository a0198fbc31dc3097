#pragma once

// Configured experiments. Every run writes series.csv, summary.json and
// states.json into its output directory; the summary lists each assertion
// as {name, value, relation, threshold, pass} plus an overall pass flag.
// Thresholds default to the documented values and can be overridden with
// "assert.<name> = <value>" or disabled with "assert.<name> = off".

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "szego/config.hpp"
#include "szego/io.hpp"

namespace szego {

struct Assertion {
  std::string name;
  double value = 0.0;
  std::string relation;  // "<", "<=", ">", ">=", "=="
  double threshold = 0.0;
  bool pass = false;
};

struct ExperimentResult {
  std::string kind;
  std::string name;
  std::vector<Assertion> assertions;
  json metrics = json::object();
  std::string error;  // set when the run aborted
  bool pass() const;
  json summary() const;
};

struct ExperimentInfo {
  std::string kind;
  std::string description;
};

const std::vector<ExperimentInfo>& experiment_kinds();

struct RunOptions {
  std::filesystem::path out_dir;  // empty: the config's "out" key, else out/<config stem>
  bool verbose = false;
  std::ostream* log = nullptr;
};

/// Output directory a config resolves to when none is given.
std::filesystem::path default_out_dir(const Config& cfg);

/// Validates all keys and parameters first (ConfigError), then computes and
/// writes artifacts. Numerical aborts are recorded in the result's error
/// field and in summary.json.
ExperimentResult run_experiment(const Config& cfg, const RunOptions& opt);

struct VerifyEntry {
  std::string config;
  ExperimentResult result;
};

struct VerifyReport {
  std::vector<VerifyEntry> entries;
  bool pass() const;
};

/// Directory of the shipped acceptance configs: $SZEGO_ACCEPTANCE_DIR if
/// set, else the source-tree location compiled in.
std::filesystem::path acceptance_dir();

/// Runs every *.cfg in config_dir in name order, each into
/// out_root/<stem>, and writes out_root/verify.json.
VerifyReport verify_suite(const std::filesystem::path& config_dir, const std::filesystem::path& out_root,
                          std::ostream* log = nullptr);

}  // namespace szego
