#include <unistd.h>

#include <algorithm>
#include <fstream>
#include <random>

#include "zkmcp/bench.hpp"
#include "zkmcp/errors.hpp"

namespace zkmcp {

namespace {

double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<AuditMessage> bench_messages(size_t n) {
  const TypeTable table = TypeTable::defaults();
  std::mt19937_64 rng(n);
  std::vector<AuditMessage> msgs;
  for (size_t i = 0; i < n; ++i) msgs.push_back(AuditMessage::from_type(table[rng() % table.size()]));
  return msgs;
}

}  // namespace

uint64_t current_rss_bytes() {
  std::ifstream in("/proc/self/statm");
  uint64_t size = 0, resident = 0;
  in >> size >> resident;
  return resident * static_cast<uint64_t>(::sysconf(_SC_PAGESIZE));
}

uint64_t available_memory_bytes() {
  std::ifstream in("/proc/meminfo");
  std::string key;
  uint64_t value = 0;
  std::string unit;
  while (in >> key >> value >> unit) {
    if (key == "MemAvailable:") return value * 1024;
  }
  return uint64_t{4} << 30;
}

// Measured setup peaks grow by about 2.1 MiB per message over a 12 MiB
// base (n = 1..32); the estimate keeps a margin over both.
uint64_t estimate_setup_bytes(size_t n) {
  return (uint64_t{16} << 20) + static_cast<uint64_t>(n) * (uint64_t{3} << 20);
}

PeakRssSampler::PeakRssSampler(std::chrono::milliseconds period) {
  peak_ = current_rss_bytes();
  thread_ = std::thread([this, period] {
    while (!stop_) {
      const uint64_t rss = current_rss_bytes();
      uint64_t prev = peak_.load();
      while (rss > prev && !peak_.compare_exchange_weak(prev, rss)) {
      }
      std::this_thread::sleep_for(period);
    }
  });
}

PeakRssSampler::~PeakRssSampler() { stop(); }

uint64_t PeakRssSampler::stop() {
  stop_ = true;
  if (thread_.joinable()) thread_.join();
  const uint64_t rss = current_rss_bytes();
  return std::max(peak_.load(), rss);
}

BenchReport bench_circuit(const std::vector<size_t>& n_list, Backend backend,
                          const BenchOptions& opts) {
  for (size_t i = 0; i < n_list.size(); ++i) {
    if (n_list[i] == 0) throw Error(ErrorCode::kInvalidParams, "n must be at least 1");
    if (i > 0 && n_list[i] <= n_list[i - 1]) {
      throw Error(ErrorCode::kInvalidParams, "n list must be strictly increasing");
    }
  }
  const uint64_t budget =
      opts.memory_budget_bytes ? opts.memory_budget_bytes : available_memory_bytes() / 5 * 4;

  BenchReport report;
  report.backend = std::string(backend_id(backend));
  for (size_t n : n_list) {
    const uint64_t need = estimate_setup_bytes(n);
    if (backend == Backend::kGroth16 && need > budget) {
      SkippedRow skip{n, std::string(error_code_name(ErrorCode::kOutOfBudget)) + ": needs about " +
                             std::to_string(need >> 20) + " MiB, budget " +
                             std::to_string(budget >> 20) + " MiB"};
      if (opts.on_skip) opts.on_skip(skip);
      report.skipped.push_back(std::move(skip));
      continue;
    }
    CircuitParams params;
    params.n = n;
    BenchRow row;
    row.n = n;

    PeakRssSampler setup_mem;
    auto t0 = std::chrono::steady_clock::now();
    const CrsBundle crs = setup(params, TypeTable::defaults(), backend, opts.exec);
    row.setup_ms = ms_since(t0);
    row.peak_mem_setup = setup_mem.stop();

    const auto [w, x] = synthesize_witness(*crs.circuit, bench_messages(n));
    PeakRssSampler prove_mem;
    t0 = std::chrono::steady_clock::now();
    const ProofBundle proof = prove(crs, x, w, "bench", opts.exec);
    row.prove_ms = ms_since(t0);
    row.peak_mem_prove = prove_mem.stop();

    // Median of three; a single verify is a few milliseconds and noisy.
    std::vector<double> verify_times;
    for (int k = 0; k < 3; ++k) {
      t0 = std::chrono::steady_clock::now();
      if (!verify(crs, proof)) throw Error(ErrorCode::kProveFailure, "honest proof rejected");
      verify_times.push_back(ms_since(t0));
    }
    std::sort(verify_times.begin(), verify_times.end());
    row.verify_ms = verify_times[1];

    const ConstraintSystem& cs = *crs.circuit;
    row.constraints = cs.constraint_count();
    row.wires = cs.wire_count();
    row.proof_bytes = proof.proof.size();
    row.vk_bytes = crs.verification_key.size();
    row.pk_bytes = crs.proving_key.size();
    row.private_input_count = cs.private_input_count();
    row.public_output_count = cs.num_inputs;
    row.constraints_per_sec = row.constraints / (row.prove_ms / 1000.0);
    if (opts.on_row) opts.on_row(row);
    report.rows.push_back(row);
  }
  return report;
}

}  // namespace zkmcp
