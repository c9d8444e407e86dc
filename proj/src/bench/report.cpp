#include <cstdio>
#include <fstream>

#include "zkmcp/bench.hpp"
#include "zkmcp/errors.hpp"

namespace zkmcp {

using nlohmann::json;

const std::vector<std::string> kBenchColumns = {
    "n",           "setup_ms",       "prove_ms", "verify_ms",          "peak_mem_setup",
    "peak_mem_prove", "constraints", "wires",    "proof_bytes",        "vk_bytes",
    "pk_bytes",    "private_input_count", "public_output_count", "constraints_per_sec"};

const std::vector<std::string> kOverheadColumns = {
    "model_profile",        "n",
    "sessions",             "comm_ms_baseline",
    "comm_ms_with_audit",   "per_message_ms_baseline",
    "per_message_ms_with_audit", "prove_ms",
    "verify_ms",            "overhead_pct",
    "verify_share_pct",     "serial_overhead_pct",
    "sessions_verified"};

namespace {

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

std::string num(uint64_t v) { return std::to_string(v); }

json row_json(const BenchRow& r) {
  return {{"n", r.n},
          {"setup_ms", r.setup_ms},
          {"prove_ms", r.prove_ms},
          {"verify_ms", r.verify_ms},
          {"peak_mem_setup", r.peak_mem_setup},
          {"peak_mem_prove", r.peak_mem_prove},
          {"constraints", r.constraints},
          {"wires", r.wires},
          {"proof_bytes", r.proof_bytes},
          {"vk_bytes", r.vk_bytes},
          {"pk_bytes", r.pk_bytes},
          {"private_input_count", r.private_input_count},
          {"public_output_count", r.public_output_count},
          {"constraints_per_sec", r.constraints_per_sec}};
}

json row_json(const OverheadRow& r) {
  return {{"model_profile", r.model_profile},
          {"n", r.n},
          {"sessions", r.sessions},
          {"comm_ms_baseline", r.comm_ms_baseline},
          {"comm_ms_with_audit", r.comm_ms_with_audit},
          {"per_message_ms_baseline", r.per_message_ms_baseline},
          {"per_message_ms_with_audit", r.per_message_ms_with_audit},
          {"prove_ms", r.prove_ms},
          {"verify_ms", r.verify_ms},
          {"overhead_pct", r.overhead_pct},
          {"verify_share_pct", r.verify_share_pct},
          {"serial_overhead_pct", r.serial_overhead_pct},
          {"sessions_verified", r.sessions_verified}};
}

// Exactly the listed keys, each of the expected JSON type.
void check_keys(const json& j, const std::vector<std::string>& columns, const char* what) {
  if (!j.is_object()) throw Error(ErrorCode::kDecode, std::string(what) + " is not an object");
  if (j.size() != columns.size()) {
    throw Error(ErrorCode::kDecode, std::string(what) + " has " + std::to_string(j.size()) +
                                        " fields, expected " + std::to_string(columns.size()));
  }
  for (const auto& c : columns) {
    if (!j.contains(c)) throw Error(ErrorCode::kDecode, std::string(what) + " lacks '" + c + "'");
    const json& v = j[c];
    const bool ok = c == "model_profile" ? v.is_string() : (v.is_number() && v >= 0);
    if (!ok) throw Error(ErrorCode::kDecode, std::string(what) + " field '" + c + "' is invalid");
  }
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoFailure, "cannot open " + path.string());
  out << text;
  out.close();
  if (!out) throw Error(ErrorCode::kIoFailure, "cannot write " + path.string());
}

std::string header(const std::vector<std::string>& columns) {
  std::string out;
  for (size_t i = 0; i < columns.size(); ++i) out += (i ? "," : "") + columns[i];
  return out + "\n";
}

template <class F>
auto decode(const char* what, F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kDecode, std::string(what) + ": " + e.what());
  }
}

}  // namespace

json BenchReport::to_json() const {
  json rows_j = json::array();
  for (const auto& r : rows) rows_j.push_back(row_json(r));
  json skipped_j = json::array();
  for (const auto& s : skipped) skipped_j.push_back({{"n", s.n}, {"reason", s.reason}});
  return {{"report", "bench"}, {"backend", backend}, {"rows", rows_j}, {"skipped", skipped_j}};
}

BenchReport BenchReport::from_json(const json& j) {
  return decode("bench report", [&] {
    if (j.at("report") != "bench") throw Error(ErrorCode::kDecode, "not a bench report");
    BenchReport r;
    r.backend = j.at("backend").get<std::string>();
    for (const json& row : j.at("rows")) {
      check_keys(row, kBenchColumns, "bench row");
      BenchRow b;
      b.n = row["n"].get<size_t>();
      b.setup_ms = row["setup_ms"].get<double>();
      b.prove_ms = row["prove_ms"].get<double>();
      b.verify_ms = row["verify_ms"].get<double>();
      b.peak_mem_setup = row["peak_mem_setup"].get<uint64_t>();
      b.peak_mem_prove = row["peak_mem_prove"].get<uint64_t>();
      b.constraints = row["constraints"].get<uint64_t>();
      b.wires = row["wires"].get<uint64_t>();
      b.proof_bytes = row["proof_bytes"].get<uint64_t>();
      b.vk_bytes = row["vk_bytes"].get<uint64_t>();
      b.pk_bytes = row["pk_bytes"].get<uint64_t>();
      b.private_input_count = row["private_input_count"].get<uint64_t>();
      b.public_output_count = row["public_output_count"].get<uint64_t>();
      b.constraints_per_sec = row["constraints_per_sec"].get<double>();
      if (!r.rows.empty() && b.n <= r.rows.back().n) {
        throw Error(ErrorCode::kDecode, "bench rows not strictly increasing in n");
      }
      r.rows.push_back(b);
    }
    for (const json& s : j.at("skipped")) {
      r.skipped.push_back({s.at("n").get<size_t>(), s.at("reason").get<std::string>()});
    }
    return r;
  });
}

json OverheadReport::to_json() const {
  json rows_j = json::array();
  for (const auto& r : rows) rows_j.push_back(row_json(r));
  return {{"report", "overhead"}, {"rows", rows_j}};
}

OverheadReport OverheadReport::from_json(const json& j) {
  return decode("overhead report", [&] {
    if (j.at("report") != "overhead") throw Error(ErrorCode::kDecode, "not an overhead report");
    OverheadReport r;
    for (const json& row : j.at("rows")) {
      // Overhead may be negative when the audited run is faster by noise.
      json checked = row;
      for (const char* k : {"overhead_pct", "serial_overhead_pct"}) {
        if (checked.contains(k) && checked[k].is_number()) checked[k] = 0;
      }
      check_keys(checked, kOverheadColumns, "overhead row");
      OverheadRow o;
      o.model_profile = row["model_profile"].get<std::string>();
      o.n = row["n"].get<size_t>();
      o.sessions = row["sessions"].get<size_t>();
      o.comm_ms_baseline = row["comm_ms_baseline"].get<double>();
      o.comm_ms_with_audit = row["comm_ms_with_audit"].get<double>();
      o.per_message_ms_baseline = row["per_message_ms_baseline"].get<double>();
      o.per_message_ms_with_audit = row["per_message_ms_with_audit"].get<double>();
      o.prove_ms = row["prove_ms"].get<double>();
      o.verify_ms = row["verify_ms"].get<double>();
      o.overhead_pct = row["overhead_pct"].get<double>();
      o.verify_share_pct = row["verify_share_pct"].get<double>();
      o.serial_overhead_pct = row["serial_overhead_pct"].get<double>();
      o.sessions_verified = row["sessions_verified"].get<size_t>();
      r.rows.push_back(o);
    }
    return r;
  });
}

ReportFormat format_for(const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  if (ext == ".csv") return ReportFormat::kCsv;
  if (ext == ".json") return ReportFormat::kJson;
  throw Error(ErrorCode::kInvalidParams, "report path must end in .csv or .json: " + path.string());
}

std::string render_csv(const BenchReport& report) {
  std::string out = header(kBenchColumns);
  for (const auto& r : report.rows) {
    out += num(uint64_t{r.n}) + "," + num(r.setup_ms) + "," + num(r.prove_ms) + "," +
           num(r.verify_ms) + "," + num(r.peak_mem_setup) + "," + num(r.peak_mem_prove) + "," +
           num(r.constraints) + "," + num(r.wires) + "," + num(r.proof_bytes) + "," +
           num(r.vk_bytes) + "," + num(r.pk_bytes) + "," + num(r.private_input_count) + "," +
           num(r.public_output_count) + "," + num(r.constraints_per_sec) + "\n";
  }
  return out;
}

std::string render_csv(const OverheadReport& report) {
  std::string out = header(kOverheadColumns);
  for (const auto& r : report.rows) {
    out += r.model_profile + "," + num(uint64_t{r.n}) + "," + num(uint64_t{r.sessions}) + "," +
           num(r.comm_ms_baseline) + "," + num(r.comm_ms_with_audit) + "," +
           num(r.per_message_ms_baseline) + "," + num(r.per_message_ms_with_audit) + "," +
           num(r.prove_ms) + "," + num(r.verify_ms) + "," + num(r.overhead_pct) + "," +
           num(r.verify_share_pct) + "," + num(r.serial_overhead_pct) + "," +
           num(uint64_t{r.sessions_verified}) + "\n";
  }
  return out;
}

void emit_report(const BenchReport& report, ReportFormat format,
                 const std::filesystem::path& path) {
  write_file(path, format == ReportFormat::kCsv ? render_csv(report)
                                                : report.to_json().dump(2) + "\n");
}

void emit_report(const OverheadReport& report, ReportFormat format,
                 const std::filesystem::path& path) {
  write_file(path, format == ReportFormat::kCsv ? render_csv(report)
                                                : report.to_json().dump(2) + "\n");
}

}  // namespace zkmcp
