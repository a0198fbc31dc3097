#include "szego/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace szego {

void CsvTable::add_row(std::vector<double> row) {
  if (row.size() != columns.size()) throw std::logic_error("CsvTable: row width does not match the columns");
  rows.push_back(std::move(row));
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string to_csv(const CsvTable& t) {
  std::ostringstream out;
  out << "# " << (t.comment.empty() ? "" : t.comment + "; ") << "columns:";
  for (const auto& c : t.columns) out << ' ' << c;
  out << '\n';
  for (std::size_t j = 0; j < t.columns.size(); ++j) out << (j ? "," : "") << t.columns[j];
  out << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t j = 0; j < row.size(); ++j) out << (j ? "," : "") << format_double(row[j]);
    out << '\n';
  }
  return out.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

void write_csv(const std::filesystem::path& path, const CsvTable& table) { write_text(path, to_csv(table)); }

void write_json(const std::filesystem::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

json to_json(cplx z) { return json::array({z.real(), z.imag()}); }

json to_json(const std::vector<cplx>& v) {
  json out = json::array();
  for (const cplx& z : v) out.push_back(to_json(z));
  return out;
}

json to_json(const FourierSymbol& u) {
  json re = json::array(), im = json::array();
  for (std::size_t k = 0; k < u.cutoff(); ++k) {
    re.push_back(u[k].real());
    im.push_back(u[k].imag());
  }
  return {{"re", re}, {"im", im}};
}

json to_json(const WaveCertificate& c) {
  json j = {{"N", c.wave.N},
            {"ell", c.wave.ell},
            {"p", to_json(c.wave.p)},
            {"alpha", to_json(c.wave.alpha)},
            {"c", c.wave.c},
            {"omega", c.wave.omega},
            {"Q", c.wave.Q},
            {"S", c.wave.S},
            {"cutoff", c.wave.u.cutoff()},
            {"wave_residual", c.residual},
            {"commutator_norm", c.commutator_norm},
            {"eqop_residual", c.eqop_residual},
            {"q_minus_nc", c.q_minus_nc},
            {"orbit_time", c.orbit_time},
            {"orbit_error", c.orbit_error},
            {"one_in_range", c.one_in_range}};
  j["mtilde_relation"] = c.mtilde_relation ? json(*c.mtilde_relation) : json(nullptr);
  return j;
}

json to_json(const RecoveryResult& r) {
  json terms = json::array();
  for (const auto& t : r.terms) {
    terms.push_back({{"pole", to_json(t.pole)}, {"multiplicity", t.multiplicity}, {"coeffs", to_json(t.coeffs)}});
  }
  return {{"order", r.model.order},
          {"c", to_json(r.model.c)},
          {"roots", to_json(r.model.roots)},
          {"multiplicities", r.model.multiplicities},
          {"terms", terms},
          {"numerator", to_json(r.symbol.numerator)},
          {"denominator", to_json(r.symbol.denominator)},
          {"residual", r.residual},
          {"singular_values", r.singular_values}};
}

json to_json(const RoundtripReport& r) {
  return {{"N", r.N},
          {"K", r.K},
          {"noise", r.noise},
          {"detected_rank", r.detected_rank},
          {"true_poles", to_json(r.true_poles)},
          {"recovered_poles", to_json(r.recovered_poles)},
          {"multiplicities", r.multiplicities},
          {"max_pole_error", r.max_pole_error},
          {"residual", r.residual}};
}

CsvTable series_table(const TimeSeries& s) {
  CsvTable t;
  t.columns = {"t", "Q", "M", "E", "J6", "J8"};
  for (const auto& [order, col] : s.hs) t.columns.push_back("Hs_" + format_double(order));
  t.columns.insert(t.columns.end(), {"spectrum_drift", "lax_residual", "accepted_steps"});
  for (std::size_t i = 0; i < s.size(); ++i) {
    std::vector<double> row{s.times[i], s.Q[i], s.M[i], s.E[i], s.J6[i], s.J8[i]};
    for (const auto& [order, col] : s.hs) row.push_back(col[i]);
    row.push_back(i < s.spectrum_drift.size() ? s.spectrum_drift[i] : 0.0);
    row.push_back(i < s.lax_residual.size() ? s.lax_residual[i] : 0.0);
    row.push_back(i < s.steps.size() ? static_cast<double>(s.steps[i].accepted) : 0.0);
    t.add_row(std::move(row));
  }
  return t;
}

json states_json(const TimeSeries& s) {
  json out = json::array();
  for (std::size_t i = 0; i < s.size(); ++i) {
    json j = to_json(s.states[i]);
    j["t"] = s.times[i];
    out.push_back(std::move(j));
  }
  return out;
}

}  // namespace szego
