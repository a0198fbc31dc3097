// szego: command-line front end for the experiment runner.
//
//   szego run --config <file> [--out <dir>] [--verbose]
//   szego list-experiments
//   szego verify [--out <dir>] [--verbose]

#include <iostream>

#include <CLI11.hpp>

#include "szego/experiments.hpp"

namespace {

void print_result(const szego::ExperimentResult& r) {
  for (const auto& a : r.assertions) {
    std::cout << (a.pass ? "  pass  " : "  FAIL  ") << a.name << " = " << szego::format_double(a.value) << ' '
              << a.relation << ' ' << szego::format_double(a.threshold) << '\n';
  }
  if (!r.error.empty()) std::cout << "  error: " << r.error << '\n';
  std::cout << (r.pass() ? "PASS" : "FAIL") << ' ' << r.kind << " (" << r.name << ")\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical laboratory for the cubic Szego equation"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  bool verbose = false;

  auto* run = app.add_subcommand("run", "run one configured experiment");
  run->add_option("--config", config_path, "experiment config file")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out_dir, "output directory (default: config 'out' key, else out/<config name>)");
  run->add_flag("--verbose", verbose, "progress messages on stderr");

  app.add_subcommand("list-experiments", "list experiment kinds");

  auto* verify = app.add_subcommand("verify", "run the named acceptance suite");
  verify->add_option("--out", out_dir, "output root (default: out/verify)");
  verify->add_flag("--verbose", verbose, "progress messages on stderr");

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand("list-experiments")) {
      for (const auto& k : szego::experiment_kinds()) std::cout << k.kind << "\t" << k.description << '\n';
      return 0;
    }
    if (app.got_subcommand("run")) {
      const auto cfg = szego::Config::load(config_path);
      szego::RunOptions opt;
      opt.out_dir = out_dir;
      opt.verbose = verbose;
      opt.log = &std::cerr;
      const auto res = szego::run_experiment(cfg, opt);
      print_result(res);
      return res.pass() ? 0 : 1;
    }
    const auto rep = szego::verify_suite(szego::acceptance_dir(), out_dir.empty() ? "out/verify" : out_dir,
                                         verbose ? &std::cerr : nullptr);
    for (const auto& e : rep.entries) {
      std::cout << e.config << '\n';
      print_result(e.result);
    }
    std::cout << (rep.pass() ? "verify: PASS" : "verify: FAIL") << '\n';
    return rep.pass() ? 0 : 1;
  } catch (const szego::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}
