#pragma once

// Run manifests, verification reports and their JSON / CSV serializations.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "lgpos/numerics/ball.hpp"
#include "lgpos/numerics/precision.hpp"
#include "lgpos/version.hpp"

namespace lgpos::report {

using json = nlohmann::ordered_json;

inline constexpr const char* kReportSchemaId = "lgpos.report.v1";
inline constexpr const char* kManifestSchemaId = "lgpos.manifest.v1";

/// Keys that carry wall-clock information; everything else is reproducible.
inline const std::vector<std::string>& volatile_keys() {
  static const std::vector<std::string> keys = {"started_at", "wall_time_s", "duration_s"};
  return keys;
}

inline std::string utc_timestamp() {
  std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

/// 64-bit FNV-1a, hex encoded.
inline std::string fnv1a_hex(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

struct Outcome {
  int exit_code = 0;
  std::size_t passed = 0;
  std::size_t failed = 0;
  std::size_t indeterminate = 0;
};

struct RunManifest {
  std::string run_id;
  std::string command;
  std::map<std::string, std::string> params;
  std::uint64_t seed = 0;
  int start_digits = num::kDefaultStartDigits;
  int cap_digits = num::kDefaultPrecisionCap;
  std::string tool_version = kVersion;
  std::string started_at;
  double wall_time_s = 0.0;
  Outcome outcome;

  /// The id is a hash of everything that determines the results, so a
  /// replayed manifest keeps its id.
  void assign_id() {
    json j;
    j["command"] = command;
    j["params"] = params;
    j["seed"] = seed;
    j["cap_digits"] = cap_digits;
    j["tool_version"] = tool_version;
    run_id = fnv1a_hex(j.dump());
  }
};

inline json to_json(const RunManifest& m) {
  json j;
  j["schema"] = kManifestSchemaId;
  j["run_id"] = m.run_id;
  j["command"] = m.command;
  j["params"] = m.params;
  j["seed"] = m.seed;
  j["precision"] = {{"start_digits", m.start_digits}, {"cap_digits", m.cap_digits}};
  j["tool_version"] = m.tool_version;
  j["started_at"] = m.started_at;
  j["wall_time_s"] = m.wall_time_s;
  j["outcome"] = {{"exit_code", m.outcome.exit_code},
                  {"passed", m.outcome.passed},
                  {"failed", m.outcome.failed},
                  {"indeterminate", m.outcome.indeterminate}};
  return j;
}

inline RunManifest manifest_from_json(const json& j) {
  RunManifest m;
  m.run_id = j.at("run_id").get<std::string>();
  m.command = j.at("command").get<std::string>();
  m.params = j.at("params").get<std::map<std::string, std::string>>();
  m.seed = j.at("seed").get<std::uint64_t>();
  m.start_digits = j.at("precision").at("start_digits").get<int>();
  m.cap_digits = j.at("precision").at("cap_digits").get<int>();
  m.tool_version = j.at("tool_version").get<std::string>();
  m.started_at = j.value("started_at", "");
  m.wall_time_s = j.value("wall_time_s", 0.0);
  return m;
}

enum class Verdict { Positive, Negative, Indeterminate, Evidence, Pass, Fail };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Positive: return "Positive";
    case Verdict::Negative: return "Negative";
    case Verdict::Indeterminate: return "Indeterminate";
    case Verdict::Evidence: return "Evidence";
    case Verdict::Pass: return "Pass";
    case Verdict::Fail: return "Fail";
  }
  return "?";
}

inline Verdict from_sign(num::Sign s) {
  switch (s) {
    case num::Sign::Positive: return Verdict::Positive;
    case num::Sign::Negative: return Verdict::Negative;
    default: return Verdict::Indeterminate;
  }
}

struct ResultRow {
  std::string test;
  json inputs = json::object();
  double value = 0.0;
  std::string value_str;  // full-precision midpoint when available
  double err = 0.0;
  Verdict verdict = Verdict::Pass;
  std::string detail;
};

inline ResultRow row(std::string test, json inputs, const num::Ball& v, Verdict verdict, std::string detail = {}) {
  ResultRow r;
  r.test = std::move(test);
  r.inputs = std::move(inputs);
  r.value = v.mid_double();
  r.value_str = v.mid().to_string(30);
  r.err = v.rad_double();
  r.verdict = verdict;
  r.detail = std::move(detail);
  return r;
}

inline ResultRow row(std::string test, json inputs, double value, double err, Verdict verdict,
                     std::string detail = {}) {
  ResultRow r;
  r.test = std::move(test);
  r.inputs = std::move(inputs);
  r.value = value;
  r.err = err;
  r.verdict = verdict;
  r.detail = std::move(detail);
  return r;
}

struct CounterexampleFlag {
  std::string test;
  json inputs = json::object();
  std::string note;
};

struct VerificationReport {
  RunManifest manifest;
  std::vector<ResultRow> results;
  std::vector<CounterexampleFlag> counterexample_flags;
  json sections = json::object();

  Outcome tally() const {
    Outcome o;
    for (const auto& r : results) {
      if (r.verdict == Verdict::Fail) ++o.failed;
      else if (r.verdict == Verdict::Indeterminate) ++o.indeterminate;
      else ++o.passed;
    }
    return o;
  }
};

namespace detail {
inline json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }
}  // namespace detail

inline json to_json(const ResultRow& r) {
  json j;
  j["test"] = r.test;
  j["inputs"] = r.inputs;
  j["value"] = detail::finite_or_null(r.value);
  if (!r.value_str.empty()) j["value_str"] = r.value_str;
  j["err"] = detail::finite_or_null(r.err);
  j["verdict"] = to_string(r.verdict);
  if (!r.detail.empty()) j["detail"] = r.detail;
  return j;
}

inline json to_json(const VerificationReport& rep) {
  json j;
  j["schema"] = kReportSchemaId;
  j["manifest"] = to_json(rep.manifest);
  j["results"] = json::array();
  for (const auto& r : rep.results) j["results"].push_back(to_json(r));
  j["counterexample_flags"] = json::array();
  for (const auto& c : rep.counterexample_flags)
    j["counterexample_flags"].push_back({{"test", c.test}, {"inputs", c.inputs}, {"note", c.note}});
  j["sections"] = rep.sections;
  return j;
}

/// Copy of j with the wall-clock keys removed at every level.
inline json strip_volatile(const json& j) {
  if (j.is_object()) {
    json out = json::object();
    for (auto it = j.begin(); it != j.end(); ++it) {
      bool skip = false;
      for (const auto& k : volatile_keys())
        if (it.key() == k) skip = true;
      if (!skip) out[it.key()] = strip_volatile(it.value());
    }
    return out;
  }
  if (j.is_array()) {
    json out = json::array();
    for (const auto& v : j) out.push_back(strip_volatile(v));
    return out;
  }
  return j;
}

class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header) : header_(std::move(header)) {}

  void add(std::vector<std::string> row) {
    if (row.size() != header_.size()) throw std::invalid_argument("CsvWriter: row width mismatch");
    rows_.push_back(std::move(row));
  }

  std::string str() const {
    std::ostringstream os;
    write_line(os, header_);
    for (const auto& r : rows_) write_line(os, r);
    return os.str();
  }

  void save(const std::filesystem::path& path) const {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << str();
  }

  std::size_t size() const { return rows_.size(); }

 private:
  static void write_line(std::ostream& os, const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) os << ',';
      const std::string& c = cells[i];
      if (c.find_first_of(",\"\n") != std::string::npos) {
        os << '"';
        for (char ch : c) os << (ch == '"' ? "\"\"" : std::string(1, ch));
        os << '"';
      } else {
        os << c;
      }
    }
    os << '\n';
  }

  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

/// Shortest round-trip decimal form of a double.
inline std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

inline void write_json(const std::filesystem::path& path, const json& j) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << j.dump(2) << '\n';
}

inline json read_json(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot read " + path.string());
  return json::parse(f);
}

}  // namespace lgpos::report
