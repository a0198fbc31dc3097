#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "szego/config.hpp"
#include "szego/experiments.hpp"
#include "szego/initial_data.hpp"
#include "szego/io.hpp"

using namespace szego;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("szego-test-" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

const char* kSmallEvolve = R"(
kind = evolve
[initial]
u0 = phi(1, 0.5)
[flow]
K = 32
dt = 1e-3
t_end = 0.5
sample_every = 100
)";

}  // namespace

TEST_CASE("complex literals") {
  CHECK(parse_complex("1") == cplx(1.0));
  CHECK(parse_complex("-2.5e-3") == cplx(-2.5e-3));
  CHECK(parse_complex("0.3+0.2i") == cplx(0.3, 0.2));
  CHECK(parse_complex("0.3-0.2i") == cplx(0.3, -0.2));
  CHECK(parse_complex("-i") == cplx(0.0, -1.0));
  CHECK(std::abs(parse_complex("0.6@0.2pi") - std::polar(0.6, 0.2 * kPi)) < 1e-15);
  CHECK_THROWS_AS(parse_complex("abc"), ConfigError);
}

TEST_CASE("config sections, comments and lists") {
  const auto cfg = Config::parse("kind = evolve\n# comment\n; another\n[flow]\ndt = 1e-3\nK = 64\n"
                                 "[hs]\neps = [0.1, 0.05]\n");
  CHECK(cfg.get_string("kind") == "evolve");
  CHECK(cfg.get_double("flow.dt") == 1e-3);
  CHECK(cfg.get_int("flow.K", 0) == 64);
  CHECK(cfg.get_doubles("hs.eps") == std::vector<double>{0.1, 0.05});
  CHECK(cfg.get_double("missing", 2.0) == 2.0);
  CHECK_THROWS_AS(cfg.get_double("missing"), ConfigError);
  CHECK_NOTHROW(cfg.require_known({"kind", "flow.*", "hs.eps"}));
  CHECK_THROWS_AS(cfg.require_known({"kind", "flow.dt"}), ConfigError);
}

TEST_CASE("config parse errors carry a line number") {
  try {
    Config::parse("kind = evolve\n[flow\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.line() == 2);
  }
}

TEST_CASE("initial data families") {
  const auto phi = read_initial_data(Config::parse("[initial]\nu0 = phi(1, 0.5)\n"));
  CHECK(phi.fourier(4)[2] == cplx(0.25));
  CHECK(phi.exact);
  REQUIRE(phi.chart.has_value());

  const auto zeps = read_initial_data(Config::parse("[initial]\nu0 = z+eps(0.1)\n"));
  REQUIRE(zeps.eps.has_value());
  CHECK(zeps.mtilde1.has_value());

  const auto pert = read_initial_data(Config::parse("[initial]\nu0 = phi(1, 0.5)\nperturbation = 2:0.01\n"));
  CHECK(pert.perturbed);
  CHECK_FALSE(pert.exact);
  CHECK(pert.fourier(4)[2] == cplx(0.26));

  CHECK_THROWS_AS(read_initial_data(Config::parse("[initial]\nu0 = phi(1, 1.5)\n")), ConfigError);
}

TEST_CASE("CSV tables") {
  CsvTable t;
  t.columns = {"t", "Q"};
  CHECK(to_csv(t) == "# columns: t Q\nt,Q\n");
  t.add_row({0.0, 1.0});
  t.add_row({0.5, 1.0 / 3.0});
  t.add_row({1.0, 2.0});
  const auto text = to_csv(t);
  CHECK(text.find("0.33333333333333331") != std::string::npos);
  CHECK(std::count(text.begin(), text.end(), '\n') == 5);
  CHECK_THROWS_AS(t.add_row({1.0}), std::logic_error);
}

TEST_CASE("evolve run writes artifacts deterministically") {
  const auto dir = scratch("evolve");
  const auto cfg = Config::parse(kSmallEvolve, "small.cfg");
  RunOptions opt;
  opt.out_dir = dir / "a";
  const auto r = run_experiment(cfg, opt);
  CHECK(r.pass());
  CHECK(r.error.empty());
  for (const char* f : {"series.csv", "summary.json", "states.json"}) CHECK(fs::exists(opt.out_dir / f));

  const auto csv = slurp(opt.out_dir / "series.csv");
  std::istringstream lines(csv);
  std::string line;
  std::vector<double> times;
  std::getline(lines, line);
  CHECK(line.rfind("# ", 0) == 0);
  std::getline(lines, line);
  CHECK(line.rfind("t,Q,M,E,J6,J8", 0) == 0);
  while (std::getline(lines, line)) times.push_back(std::stod(line.substr(0, line.find(','))));
  CHECK(times.size() == 6);
  CHECK(std::is_sorted(times.begin(), times.end()));

  const auto summary = json::parse(slurp(opt.out_dir / "summary.json"));
  CHECK(summary["pass"] == true);
  CHECK(summary["kind"] == "evolve");

  RunOptions again = opt;
  again.out_dir = dir / "b";
  run_experiment(cfg, again);
  for (const char* f : {"series.csv", "summary.json", "states.json"}) {
    CHECK(slurp(opt.out_dir / f) == slurp(again.out_dir / f));
  }
  fs::remove_all(dir);
}

TEST_CASE("validation happens before any computation") {
  const auto dir = scratch("invalid");
  RunOptions opt;
  opt.out_dir = dir;
  CHECK_THROWS_AS(run_experiment(Config::parse("kind = evolve\nbogus = 1\n"), opt), ConfigError);
  CHECK_THROWS_AS(run_experiment(Config::parse("kind = nope\n"), opt), ConfigError);
  CHECK_THROWS_AS(run_experiment(Config::parse(std::string(kSmallEvolve) + "dt = -1\n"), opt), ConfigError);
  CHECK_FALSE(fs::exists(dir / "summary.json"));
}

TEST_CASE("assertion overrides") {
  const auto dir = scratch("override");
  RunOptions opt;
  opt.out_dir = dir;
  auto cfg = Config::parse(std::string(kSmallEvolve) + "[assert]\nQ_drift = 1e-30\nexact_error = off\n");
  const auto r = run_experiment(cfg, opt);
  CHECK_FALSE(r.pass());
  for (const auto& a : r.assertions) CHECK(a.name != "exact_error");
  fs::remove_all(dir);
}

TEST_CASE("identities kind") {
  const auto dir = scratch("identities");
  RunOptions opt;
  opt.out_dir = dir;
  const auto r = run_experiment(
      Config::parse("kind = identities\nseed = 1\n[identities]\nchecks = rio\nrio_count = 5\nrio_degree = 4\n"), opt);
  CHECK(r.pass());
  const auto summary = json::parse(slurp(dir / "summary.json"));
  CHECK(summary["pass"] == true);
  fs::remove_all(dir);
}

TEST_CASE("every kind is listed") {
  std::vector<std::string> kinds;
  for (const auto& k : experiment_kinds()) kinds.push_back(k.kind);
  for (const char* k : {"evolve", "hierarchy", "rational-evolve", "waves", "kronecker", "hs-growth", "identities",
                        "torus-stability", "sweep"}) {
    CHECK(std::find(kinds.begin(), kinds.end(), k) != kinds.end());
  }
}
