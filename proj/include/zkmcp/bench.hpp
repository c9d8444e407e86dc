#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "zkmcp/proof_system.hpp"
#include "zkmcp/protocol.hpp"
#include "zkmcp/transport.hpp"

namespace zkmcp {

// ---- circuit benchmark -----------------------------------------------------

struct BenchRow {
  size_t n = 0;
  double setup_ms = 0;
  double prove_ms = 0;
  double verify_ms = 0;
  uint64_t peak_mem_setup = 0;  // bytes of resident set
  uint64_t peak_mem_prove = 0;
  uint64_t constraints = 0;
  uint64_t wires = 0;
  uint64_t proof_bytes = 0;
  uint64_t vk_bytes = 0;
  uint64_t pk_bytes = 0;
  uint64_t private_input_count = 0;
  uint64_t public_output_count = 0;
  double constraints_per_sec = 0;

  friend bool operator==(const BenchRow&, const BenchRow&) = default;
};

struct SkippedRow {
  size_t n = 0;
  std::string reason;
  friend bool operator==(const SkippedRow&, const SkippedRow&) = default;
};

struct BenchReport {
  std::string backend;
  std::vector<BenchRow> rows;
  std::vector<SkippedRow> skipped;

  nlohmann::json to_json() const;
  // Checks the schema; throws Decode.
  static BenchReport from_json(const nlohmann::json& j);
  friend bool operator==(const BenchReport&, const BenchReport&) = default;
};

struct BenchOptions {
  // 0 means 80% of MemAvailable.
  uint64_t memory_budget_bytes = 0;
  Exec exec = Exec::kParallel;
  std::function<void(const BenchRow&)> on_row;
  std::function<void(const SkippedRow&)> on_skip;
};

// Fresh setup, one honest prove and one verify per n, rows in increasing n.
// Sizes whose estimated footprint exceeds the budget are skipped and listed.
// Throws InvalidParams for n = 0 or an unsorted list.
BenchReport bench_circuit(const std::vector<size_t>& n_list, Backend backend,
                          const BenchOptions& opts = {});

// Rough upper bound on resident bytes needed by setup for n messages.
uint64_t estimate_setup_bytes(size_t n);
uint64_t available_memory_bytes();
uint64_t current_rss_bytes();

// Samples resident set size on a background thread.
class PeakRssSampler {
 public:
  explicit PeakRssSampler(std::chrono::milliseconds period = std::chrono::milliseconds(50));
  ~PeakRssSampler();
  PeakRssSampler(const PeakRssSampler&) = delete;
  PeakRssSampler& operator=(const PeakRssSampler&) = delete;

  // Stops sampling and returns the largest sample.
  uint64_t stop();

 private:
  std::atomic<bool> stop_{false};
  std::atomic<uint64_t> peak_{0};
  std::thread thread_;
};

// ---- session simulation ----------------------------------------------------

// Per-message delay distribution: lognormal with the given mean and standard
// deviation, or constant when stddev is zero.
struct LatencyProfile {
  std::string name;
  double mean_ms = 200;
  double stddev_ms = 0;

  static LatencyProfile fixed(double ms);
  // deepseek-v3-like, gpt-4.1-mini-like, gpt-3.5-turbo-like, or fixed-<ms>.
  static LatencyProfile named(std::string_view name);
  static std::vector<std::string> names();
  double sample(std::mt19937_64& rng) const;
};

struct SimOptions {
  size_t sessions = 1;
  size_t n = 8;
  LatencyProfile latency = LatencyProfile::fixed(200);
  bool audit = true;
  bool concurrent = true;
  uint64_t seed = 1;
  std::shared_ptr<const CrsBundle> crs;
  // External ASP; when unset an in-process ASP is used.
  std::optional<Endpoint> asp;
  std::chrono::milliseconds drain_timeout = std::chrono::minutes(10);
};

struct SimSession {
  std::string s_id;
  std::vector<std::string> script;         // raw messages in order
  std::vector<uint64_t> expected_counts;   // plaintext count_types
  std::vector<double> message_ms;          // communication path per message
  double comm_ms = 0;                      // start to close, communication path only
  int64_t end_time = 0;
  int64_t prove_started_at = 0;
  int64_t prove_finished_at = 0;
  double verify_ms = 0;                    // Audit-Request round trip at the link
  std::string audit_status;                // agent view; empty with audit off
  std::optional<AuditRecord> record;       // ASP view
};

struct SimRun {
  bool audit = false;
  std::string profile;
  size_t n = 0;
  std::vector<SimSession> sessions;

  double comm_ms() const;         // mean per session
  double per_message_ms() const;  // mean over all messages
  double prove_ms() const;        // mean over sessions, 0 with audit off
  double verify_ms() const;
  size_t verified() const;
};

// Scripted agent pairs exchange opts.n messages each with injected latency.
// The message script and the latency draws depend only on the seed, so two
// runs differing only in `audit` are paired. Throws AspUnreachable,
// CrsMismatch.
SimRun simulate_sessions(const SimOptions& opts);

// Deterministic message script for session `index`.
std::vector<std::string> scripted_messages(size_t n, uint64_t seed, size_t index);

struct OverheadRow {
  std::string model_profile;
  size_t n = 0;
  size_t sessions = 0;
  double comm_ms_baseline = 0;
  double comm_ms_with_audit = 0;
  double per_message_ms_baseline = 0;
  double per_message_ms_with_audit = 0;
  double prove_ms = 0;
  double verify_ms = 0;
  // Communication path: (with_audit - baseline) / baseline * 100.
  double overhead_pct = 0;
  // Verification time as a share of the audited communication time.
  double verify_share_pct = 0;
  // Overhead if proving and verification ran inline after the last message.
  double serial_overhead_pct = 0;
  size_t sessions_verified = 0;

  friend bool operator==(const OverheadRow&, const OverheadRow&) = default;
};

struct OverheadReport {
  std::vector<OverheadRow> rows;

  nlohmann::json to_json() const;
  static OverheadReport from_json(const nlohmann::json& j);
  friend bool operator==(const OverheadReport&, const OverheadReport&) = default;
};

OverheadRow compare_runs(const SimRun& baseline, const SimRun& with_audit);

// ---- reports ----------------------------------------------------------------

enum class ReportFormat { kCsv, kJson };

// From the file extension; throws InvalidParams.
ReportFormat format_for(const std::filesystem::path& path);

extern const std::vector<std::string> kBenchColumns;
extern const std::vector<std::string> kOverheadColumns;

std::string render_csv(const BenchReport& report);
std::string render_csv(const OverheadReport& report);

// Throws IoFailure.
void emit_report(const BenchReport& report, ReportFormat format,
                 const std::filesystem::path& path);
void emit_report(const OverheadReport& report, ReportFormat format,
                 const std::filesystem::path& path);

// ---- fixtures -----------------------------------------------------------------

inline constexpr int64_t kFixtureClockMs = 1700000000000;

// Request/reply lines of a fixed session against an in-process ASP with the
// oracle backend and a frozen clock. Requests and replies alternate.
std::vector<std::string> reference_wire_trace();
// Writes wire_trace.ndjson into dir; returns the path.
std::filesystem::path write_fixtures(const std::filesystem::path& dir);

}  // namespace zkmcp
