#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include <json.hpp>

#include "rqla/applications.hpp"

namespace rqla::io {

using json = nlohmann::json;

// A problem document plus the directory its relative paths resolve against.
struct ProblemFile {
  json doc;
  std::filesystem::path dir;

  static ProblemFile load(const std::string& path);
  static ProblemFile from_json(json doc, std::filesystem::path dir = ".");

  bool has(const std::string& key) const { return doc.contains(key); }
  const json& params() const;

  double param(const std::string& key) const;
  double param_or(const std::string& key, double fallback) const;
  std::optional<double> optional_param(const std::string& key) const;

  // "<key>": path to Pauli text, or "<key>_terms": inline Pauli text.
  PauliOperator pauli(const std::string& key) const;
  std::optional<PauliOperator> optional_pauli(const std::string& key) const;
  // "<key>": inline Pauli text, or "<key>_file": path.
  Observable observable(const std::string& key = "observable") const;

  StatePrep state(const std::string& key, std::size_t n) const;
  // A state object or a sparse vector {"entries": [[i, b_i], ...], "normalization"?: m}.
  InputState input(const std::string& key, std::size_t n) const;
};

StatePrep parse_state(const json& j, std::size_t n);
ClassicalVector parse_vector(const json& j, std::size_t n);
std::vector<cplx> parse_complex_list(const json& j);
json complex_json(cplx z);

json depth_json(const DepthStats& d);
json estimate_json(const EstimateReport& r, bool canonical);
json series_summary(const FourierSeries& s);
// Application report in the published schema; wall time dropped when canonical.
json report_json(const AppReport& r, bool canonical);

json shot_json(const ShotRecord& rec, const std::string& stage);
void write_trace(std::ostream& out, const EstimateReport& r, const std::string& stage);
// One header line, then one line per term.
void write_series_jsonl(std::ostream& out, const FourierSeries& s);
FourierSeries read_series_jsonl(std::istream& in);

}  // namespace rqla::io
