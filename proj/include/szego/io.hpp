#pragma once

// Artifact writers. CSV files start with one '#' comment line naming the
// columns in order, followed by a plain header row; numbers use %.17g so
// that reruns are byte-identical and drifts survive a round trip.

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "szego/flow.hpp"
#include "szego/kronecker.hpp"
#include "szego/waves.hpp"

namespace szego {

using json = nlohmann::json;

struct CsvTable {
  std::string comment;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  void add_row(std::vector<double> row);
};

std::string format_double(double x);
std::string to_csv(const CsvTable& table);
void write_text(const std::filesystem::path& path, const std::string& text);
void write_csv(const std::filesystem::path& path, const CsvTable& table);
void write_json(const std::filesystem::path& path, const json& j);

json to_json(cplx z);
json to_json(const std::vector<cplx>& v);
json to_json(const FourierSymbol& u);
json to_json(const WaveCertificate& cert);
json to_json(const RecoveryResult& rec);
json to_json(const RoundtripReport& rep);

/// Standard columns of an evolution series: t, Q, M, E, J6, J8, one H^s
/// column per order, spectrum_drift, lax_residual, accepted_steps.
CsvTable series_table(const TimeSeries& series);
/// [{t, re: [...], im: [...]}, ...]
json states_json(const TimeSeries& series);

}  // namespace szego
