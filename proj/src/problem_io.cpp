#include "rqla/problem_io.hpp"

#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "rqla/errors.hpp"

namespace rqla::io {

namespace {

[[noreturn]] void bad(const std::string& what) { throw ValidationError("problem file: " + what); }

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) bad("cannot open " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

double number(const json& j, const std::string& what) {
  if (!j.is_number()) bad(what + " must be a number");
  return j.get<double>();
}

cplx complex_value(const json& j, const std::string& what) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  if (j.is_object() && j.contains("re")) return {number(j.at("re"), what), j.contains("im") ? number(j.at("im"), what) : 0.0};
  bad(what + " must be a number, [re, im] or {re, im}");
}

std::size_t qubit(const json& g, const char* key, std::size_t n) {
  if (!g.contains(key) || !g.at(key).is_number_unsigned()) bad(std::string("gate needs a qubit index '") + key + "'");
  const auto q = g.at(key).get<std::size_t>();
  if (q >= n) throw DimensionError("problem file: qubit " + std::to_string(q) + " out of range");
  return q;
}

PrepGate parse_gate(const json& g, std::size_t n) {
  if (!g.is_object() || !g.contains("gate") || !g.at("gate").is_string()) bad("each gate needs a \"gate\" name");
  const std::string name = g.at("gate").get<std::string>();
  PrepGate out{};
  if (name == "h" || name == "s") {
    out.kind = name == "h" ? PrepGate::Kind::h : PrepGate::Kind::s;
    out.q0 = out.q1 = qubit(g, "q", n);
  } else if (name == "cnot") {
    out.kind = PrepGate::Kind::cnot;
    out.q0 = qubit(g, "control", n);
    out.q1 = qubit(g, "target", n);
  } else if (name == "pauli" || name == "rotation") {
    if (!g.contains("pauli") || !g.at("pauli").is_string()) bad(name + " gate needs a \"pauli\" string");
    const PauliString p = PauliString::parse(g.at("pauli").get<std::string>());
    if (p.size() != n) throw DimensionError("problem file: gate Pauli width does not match");
    if (name == "pauli") {
      out.kind = PrepGate::Kind::pauli;
      out.pauli = {static_cast<int>(g.value("phase", 0)) & 3, p};
    } else {
      out.kind = PrepGate::Kind::rotation;
      out.pauli = {0, p};
      out.angle = number(g.value("angle", json()), "rotation angle");
    }
  } else {
    bad("unknown gate '" + name + "'");
  }
  return out;
}

}  // namespace

ProblemFile ProblemFile::load(const std::string& path) {
  ProblemFile f;
  try {
    f.doc = json::parse(slurp(path));
  } catch (const json::parse_error& e) {
    bad(std::string("JSON parse error: ") + e.what());
  }
  if (!f.doc.is_object()) bad("top level must be an object");
  f.dir = std::filesystem::path(path).parent_path();
  return f;
}

ProblemFile ProblemFile::from_json(json doc, std::filesystem::path dir) {
  if (!doc.is_object()) bad("top level must be an object");
  return {std::move(doc), std::move(dir)};
}

const json& ProblemFile::params() const {
  static const json empty = json::object();
  if (!doc.contains("params")) return empty;
  if (!doc.at("params").is_object()) bad("\"params\" must be an object");
  return doc.at("params");
}

double ProblemFile::param(const std::string& key) const {
  const auto v = optional_param(key);
  if (!v) bad("missing params." + key);
  return *v;
}

double ProblemFile::param_or(const std::string& key, double fallback) const {
  return optional_param(key).value_or(fallback);
}

std::optional<double> ProblemFile::optional_param(const std::string& key) const {
  const json& p = params();
  if (!p.contains(key) || p.at(key).is_null()) return std::nullopt;
  return number(p.at(key), "params." + key);
}

std::optional<PauliOperator> ProblemFile::optional_pauli(const std::string& key) const {
  if (doc.contains(key)) {
    if (!doc.at(key).is_string()) bad("\"" + key + "\" must be a path to a Pauli text file");
    return parse_pauli_text(slurp(dir / doc.at(key).get<std::string>()));
  }
  if (doc.contains(key + "_terms")) {
    if (!doc.at(key + "_terms").is_string()) bad("\"" + key + "_terms\" must be Pauli text");
    return parse_pauli_text(doc.at(key + "_terms").get<std::string>());
  }
  return std::nullopt;
}

PauliOperator ProblemFile::pauli(const std::string& key) const {
  auto op = optional_pauli(key);
  if (!op) bad("missing \"" + key + "\" (or \"" + key + "_terms\")");
  return *op;
}

Observable ProblemFile::observable(const std::string& key) const {
  if (doc.contains(key)) {
    if (!doc.at(key).is_string()) bad("\"" + key + "\" must be Pauli text");
    return Observable(parse_pauli_text(doc.at(key).get<std::string>()));
  }
  if (doc.contains(key + "_file")) return Observable(parse_pauli_text(slurp(dir / doc.at(key + "_file").get<std::string>())));
  bad("missing \"" + key + "\"");
}

StatePrep ProblemFile::state(const std::string& key, std::size_t n) const {
  if (!doc.contains(key)) bad("missing \"" + key + "\"");
  return parse_state(doc.at(key), n);
}

InputState ProblemFile::input(const std::string& key, std::size_t n) const {
  if (!doc.contains(key)) bad("missing \"" + key + "\"");
  const json& j = doc.at(key);
  if (j.is_object() && j.contains("entries")) return InputState(parse_vector(j, n));
  return InputState(parse_state(j, n));
}

StatePrep parse_state(const json& j, std::size_t n) {
  if (j.is_number_unsigned()) return StatePrep::basis(n, j.get<std::uint64_t>());
  if (!j.is_object()) bad("a state must be a basis index or an object");
  if (j.contains("basis")) {
    if (!j.at("basis").is_number_unsigned()) bad("\"basis\" must be a nonnegative index");
    return StatePrep::basis(n, j.at("basis").get<std::uint64_t>());
  }
  if (j.contains("amplitudes")) {
    const auto amps = parse_complex_list(j.at("amplitudes"));
    if (amps.size() != (std::size_t{1} << n)) throw DimensionError("problem file: amplitude count is not 2^n");
    StateVector v(amps.begin(), amps.end());
    if (j.value("normalize", false)) {
      const double nv = norm(v);
      if (!(nv > 0.0)) bad("zero amplitude vector");
      for (auto& a : v) a /= nv;
    }
    return StatePrep::dense(n, std::move(v));
  }
  if (j.contains("gates")) {
    if (!j.at("gates").is_array()) bad("\"gates\" must be a list");
    std::vector<PrepGate> gates;
    for (const auto& g : j.at("gates")) gates.push_back(parse_gate(g, n));
    return StatePrep::gates(n, std::move(gates));
  }
  bad("a state needs \"basis\", \"amplitudes\" or \"gates\"");
}

ClassicalVector parse_vector(const json& j, std::size_t n) {
  if (!j.at("entries").is_array()) bad("\"entries\" must be a list of [index, value]");
  std::vector<std::pair<std::uint64_t, double>> entries;
  for (const auto& e : j.at("entries")) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_number_unsigned() || !e[1].is_number())
      bad("vector entries must be [index, value]");
    entries.emplace_back(e[0].get<std::uint64_t>(), e[1].get<double>());
  }
  std::optional<double> m;
  if (j.contains("normalization")) m = number(j.at("normalization"), "normalization");
  return ClassicalVector(n, std::move(entries), m);
}

std::vector<cplx> parse_complex_list(const json& j) {
  if (!j.is_array()) bad("expected a list of numbers");
  std::vector<cplx> out;
  for (const auto& v : j) out.push_back(complex_value(v, "list entry"));
  return out;
}

json complex_json(cplx z) { return {{"re", z.real()}, {"im", z.imag()}}; }

json depth_json(const DepthStats& d) {
  return {{"max_rotations", d.max_rotations}, {"mean_rotations", d.mean_rotations}, {"mean_paulis", d.mean_paulis}};
}

json estimate_json(const EstimateReport& r, bool canonical) {
  json j = {{"mode", r.mode},         {"mean", complex_json(r.mean)}, {"M", r.M},
            {"std_error", r.std_error}, {"R", r.R},                   {"eps", r.eps},
            {"delta", r.delta},       {"r_vec", r.r_vec},             {"depth_stats", depth_json(r.depth)},
            {"seed", r.seed}};
  if (!canonical) j["wall_seconds"] = r.wall_seconds;
  return j;
}

json series_summary(const FourierSeries& s) {
  json dom = json::array();
  for (const auto& iv : s.domain) dom.push_back({iv.lo, iv.hi});
  return {{"function", s.function}, {"terms", s.terms.size()}, {"alpha", s.alpha()}, {"t_max", s.t_max()},
          {"eps", s.eps},           {"achieved", s.achieved},  {"domain", dom},       {"warnings", s.warnings}};
}

json report_json(const AppReport& r, bool canonical) {
  json j;
  j["estimate"] = complex_json(r.estimate);
  j["eps"] = r.eps;
  j["delta"] = r.delta;
  j["bound"] = r.bound;
  j["M"] = r.core.M;
  j["R"] = r.core.R;
  j["r_vec"] = r.core.r_vec;
  j["depth_stats"] = depth_json(r.core.depth);
  if (r.q_estimate) j["q_estimate"] = *r.q_estimate;
  j["seed"] = r.core.seed;
  j["annotations"] = r.annotations;
  j["total_shots"] = r.total_shots();
  j["core"] = estimate_json(r.core, canonical);
  j["core"].erase("r_vec");  // already at top level
  if (r.norm) j["norm"] = estimate_json(*r.norm, canonical);
  if (!r.series_function.empty())
    j["series"] = {{"function", r.series_function},
                   {"alpha", r.series_alpha},
                   {"t_max", r.series_t_max},
                   {"eps", r.series_eps}};
  if (!canonical) j["wall_seconds"] = r.core.wall_seconds + (r.norm ? r.norm->wall_seconds : 0.0);
  return j;
}

json shot_json(const ShotRecord& rec, const std::string& stage) {
  return {{"stage", stage},       {"shot", rec.shot_index},   {"terms", rec.terms},
          {"rotations", rec.rotations}, {"paulis", rec.paulis}, {"o1", rec.o1},
          {"o2", rec.o2},         {"pauli_index", rec.pauli_index}, {"z", complex_json(rec.z)}};
}

void write_trace(std::ostream& out, const EstimateReport& r, const std::string& stage) {
  for (const auto& rec : r.trace) out << shot_json(rec, stage).dump() << '\n';
}

void write_series_jsonl(std::ostream& out, const FourierSeries& s) {
  json head = series_summary(s);
  head["record"] = "series";
  out << head.dump() << '\n';
  for (const auto& t : s.terms)
    out << json{{"record", "term"}, {"alpha", complex_json(t.alpha)}, {"t", t.t}}.dump() << '\n';
}

FourierSeries read_series_jsonl(std::istream& in) {
  FourierSeries s;
  std::string line;
  bool header = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      bad(std::string("series JSONL parse error: ") + e.what());
    }
    const std::string kind = j.value("record", "");
    if (kind == "series") {
      header = true;
      s.function = j.value("function", "");
      s.eps = j.value("eps", 0.0);
      s.achieved = j.value("achieved", 0.0);
      for (const auto& iv : j.value("domain", json::array())) s.domain.push_back({iv[0].get<double>(), iv[1].get<double>()});
      s.warnings = j.value("warnings", std::vector<std::string>{});
    } else if (kind == "term") {
      s.terms.push_back({complex_value(j.at("alpha"), "alpha"), number(j.at("t"), "t")});
    } else {
      bad("unknown series record '" + kind + "'");
    }
  }
  if (!header) bad("series JSONL has no header record");
  return s;
}

}  // namespace rqla::io
