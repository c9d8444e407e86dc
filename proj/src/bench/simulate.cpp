#include <arpa/inet.h>
#include <netdb.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cmath>
#include <map>
#include <mutex>
#include <numeric>

#include "zkmcp/bench.hpp"
#include "zkmcp/errors.hpp"

namespace zkmcp {

namespace {

struct NamedProfile {
  const char* name;
  double mean_ms;
  double stddev_ms;
};

// Invented stand-ins: only the shape (slow, heavy-tailed per-turn latency)
// matters for the overhead comparison.
constexpr NamedProfile kProfiles[] = {
    {"deepseek-v3-like", 900, 300},
    {"gpt-4.1-mini-like", 600, 200},
    {"gpt-3.5-turbo-like", 450, 150},
};

double mean(const std::vector<double>& v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / v.size();
}

// Records the round trip of every Audit-Request by s_id.
class TimingLink : public AspLink {
 public:
  explicit TimingLink(std::shared_ptr<AspLink> inner) : inner_(std::move(inner)) {}

  Reply send(const Event& e) override {
    const auto t0 = std::chrono::steady_clock::now();
    Reply r = inner_->send(e);
    if (kind_of(e) == EventKind::kAuditRequest) {
      const double ms =
          std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
      std::lock_guard lock(mu_);
      audit_ms_[s_id_of(e)] = ms;
    }
    return r;
  }

  double audit_ms(const std::string& s_id) const {
    std::lock_guard lock(mu_);
    auto it = audit_ms_.find(s_id);
    return it == audit_ms_.end() ? 0.0 : it->second;
  }

 private:
  std::shared_ptr<AspLink> inner_;
  mutable std::mutex mu_;
  std::map<std::string, double> audit_ms_;
};

void probe(const Endpoint& ep) {
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  if (::getaddrinfo(ep.host.c_str(), std::to_string(ep.port).c_str(), &hints, &res) != 0 || !res) {
    throw Error(ErrorCode::kAspUnreachable, "cannot resolve " + ep.str());
  }
  const int fd = ::socket(res->ai_family, res->ai_socktype | SOCK_CLOEXEC, res->ai_protocol);
  const bool ok = fd >= 0 && ::connect(fd, res->ai_addr, res->ai_addrlen) == 0;
  ::freeaddrinfo(res);
  if (fd >= 0) ::close(fd);
  if (!ok) throw Error(ErrorCode::kAspUnreachable, "no ASP at " + ep.str());
}

}  // namespace

LatencyProfile LatencyProfile::fixed(double ms) {
  char name[32];
  std::snprintf(name, sizeof name, "fixed-%g", ms);
  return {name, ms, 0};
}

LatencyProfile LatencyProfile::named(std::string_view name) {
  for (const auto& p : kProfiles) {
    if (name == p.name) return {p.name, p.mean_ms, p.stddev_ms};
  }
  if (name.starts_with("fixed-")) {
    try {
      size_t used = 0;
      const std::string tail(name.substr(6));
      const double ms = std::stod(tail, &used);
      if (used == tail.size() && ms >= 0) return fixed(ms);
    } catch (const std::exception&) {
    }
  }
  throw Error(ErrorCode::kInvalidParams, "unknown latency profile '" + std::string(name) + "'");
}

std::vector<std::string> LatencyProfile::names() {
  std::vector<std::string> out;
  for (const auto& p : kProfiles) out.emplace_back(p.name);
  out.emplace_back("fixed-<ms>");
  return out;
}

double LatencyProfile::sample(std::mt19937_64& rng) const {
  if (stddev_ms <= 0 || mean_ms <= 0) return mean_ms;
  const double s2 = std::log1p((stddev_ms * stddev_ms) / (mean_ms * mean_ms));
  std::lognormal_distribution<double> dist(std::log(mean_ms) - s2 / 2, std::sqrt(s2));
  return dist(rng);
}

std::vector<std::string> scripted_messages(size_t n, uint64_t seed, size_t index) {
  const TypeTable table = TypeTable::defaults();
  std::mt19937_64 rng(seed * 0x9e3779b97f4a7c15ULL + index);
  std::vector<std::string> out;
  for (size_t i = 0; i < n; ++i) {
    // Requests and responses dominate a tool-call exchange.
    const size_t pick = rng() % (table.size() + 4);
    out.push_back(canonicalize(table[pick < table.size() ? pick : pick % 2]));
  }
  return out;
}

double SimRun::comm_ms() const {
  std::vector<double> v;
  for (const auto& s : sessions) v.push_back(s.comm_ms);
  return mean(v);
}

double SimRun::per_message_ms() const {
  std::vector<double> v;
  for (const auto& s : sessions) v.insert(v.end(), s.message_ms.begin(), s.message_ms.end());
  return mean(v);
}

double SimRun::prove_ms() const {
  std::vector<double> v;
  for (const auto& s : sessions) {
    if (audit) v.push_back(static_cast<double>(s.prove_finished_at - s.prove_started_at));
  }
  return mean(v);
}

double SimRun::verify_ms() const {
  std::vector<double> v;
  for (const auto& s : sessions) {
    if (audit) v.push_back(s.verify_ms);
  }
  return mean(v);
}

size_t SimRun::verified() const {
  size_t k = 0;
  for (const auto& s : sessions) k += s.audit_status == "verified";
  return k;
}

SimRun simulate_sessions(const SimOptions& opts) {
  if (opts.sessions == 0 || opts.n == 0) {
    throw Error(ErrorCode::kInvalidParams, "sessions and n must be positive");
  }
  if (opts.audit) {
    if (!opts.crs) throw Error(ErrorCode::kInvalidParams, "audit on needs a crs");
    if (opts.crs->n() != opts.n) {
      throw Error(ErrorCode::kCrsMismatch, "crs is for n=" + std::to_string(opts.crs->n()) +
                                               ", simulation uses n=" + std::to_string(opts.n));
    }
  }

  SimRun run;
  run.audit = opts.audit;
  run.profile = opts.latency.name;
  run.n = opts.n;
  run.sessions.resize(opts.sessions);

  std::unique_ptr<Asp> embedded;
  if (opts.audit) {
    if (opts.asp) {
      probe(*opts.asp);
    } else {
      AspOptions ao;
      ao.allow_insecure = opts.crs->is_insecure();
      embedded = std::make_unique<Asp>(opts.crs, ao);
    }
  }

  std::vector<std::shared_ptr<TimingLink>> links(opts.sessions);
  std::vector<std::unique_ptr<Agent>> agents(opts.sessions);
  if (opts.audit) {
    for (size_t k = 0; k < opts.sessions; ++k) {
      std::shared_ptr<AspLink> inner;
      if (embedded) {
        inner = std::make_shared<InProcessLink>(*embedded);
      } else {
        inner = std::make_shared<TcpAspLink>(*opts.asp);
      }
      links[k] = std::make_shared<TimingLink>(inner);
      AgentOptions ao;
      ao.agent_id = "agent-" + std::to_string(k);
      ao.pad_with_filler = false;
      agents[k] = std::make_unique<Agent>(opts.crs, links[k], ao);
    }
  }

  auto run_one = [&](size_t k) {
    SimSession& s = run.sessions[k];
    s.script = scripted_messages(opts.n, opts.seed, k);
    std::mt19937_64 rng(opts.seed * 1000003 + k);
    std::vector<double> delays;
    for (size_t i = 0; i < opts.n; ++i) delays.push_back(opts.latency.sample(rng));

    Agent* agent = agents[k].get();
    const auto t_start = std::chrono::steady_clock::now();
    if (agent) s.s_id = agent->start_session("peer-" + std::to_string(k));
    for (size_t i = 0; i < opts.n; ++i) {
      const auto t0 = std::chrono::steady_clock::now();
      std::this_thread::sleep_until(t0 + std::chrono::duration<double, std::milli>(delays[i]));
      if (agent) {
        agent->record_message(s.s_id, s.script[i],
                              i % 2 == 0 ? Direction::kSent : Direction::kReceived);
      }
      s.message_ms.push_back(
          std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
              .count());
    }
    if (agent) agent->finish_session(s.s_id);
    s.comm_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                          t_start)
                    .count();
  };

  if (opts.concurrent && opts.sessions > 1) {
    std::vector<std::thread> threads;
    for (size_t k = 0; k < opts.sessions; ++k) threads.emplace_back(run_one, k);
    for (auto& t : threads) t.join();
  } else {
    for (size_t k = 0; k < opts.sessions; ++k) run_one(k);
  }

  const TypeTable table = TypeTable::defaults();
  std::vector<AuditRecord> records;
  for (size_t k = 0; k < opts.sessions; ++k) {
    SimSession& s = run.sessions[k];
    std::vector<AuditMessage> msgs;
    for (const auto& raw : s.script) msgs.push_back(AuditMessage::from_raw(raw));
    s.expected_counts = count_types(msgs, table);
    if (!opts.audit) continue;
    if (!agents[k]->wait_idle(opts.drain_timeout)) {
      throw Error(ErrorCode::kAspUnreachable, "audits for " + s.s_id + " not delivered");
    }
    const AgentSession info = agents[k]->session(s.s_id);
    s.end_time = info.end_time;
    s.prove_started_at = info.prove_started_at;
    s.prove_finished_at = info.prove_finished_at;
    s.audit_status = info.audit_status;
    s.verify_ms = links[k]->audit_ms(s.s_id);
  }
  if (embedded) {
    for (auto& r : embedded->audit_records()) {
      for (auto& s : run.sessions) {
        if (s.s_id == r.s_id) s.record = r;
      }
    }
  }
  return run;
}

OverheadRow compare_runs(const SimRun& baseline, const SimRun& with_audit) {
  if (baseline.n != with_audit.n || baseline.sessions.size() != with_audit.sessions.size() ||
      baseline.profile != with_audit.profile) {
    throw Error(ErrorCode::kInvalidParams, "runs are not paired");
  }
  OverheadRow row;
  row.model_profile = with_audit.profile;
  row.n = with_audit.n;
  row.sessions = with_audit.sessions.size();
  row.comm_ms_baseline = baseline.comm_ms();
  row.comm_ms_with_audit = with_audit.comm_ms();
  row.per_message_ms_baseline = baseline.per_message_ms();
  row.per_message_ms_with_audit = with_audit.per_message_ms();
  row.prove_ms = with_audit.prove_ms();
  row.verify_ms = with_audit.verify_ms();
  const double base = row.comm_ms_baseline > 0 ? row.comm_ms_baseline : 1.0;
  row.overhead_pct = (row.comm_ms_with_audit - row.comm_ms_baseline) / base * 100.0;
  row.verify_share_pct =
      row.comm_ms_with_audit > 0 ? row.verify_ms / row.comm_ms_with_audit * 100.0 : 0.0;
  row.serial_overhead_pct =
      (row.comm_ms_with_audit + row.prove_ms + row.verify_ms - row.comm_ms_baseline) / base * 100.0;
  row.sessions_verified = with_audit.verified();
  return row;
}

}  // namespace zkmcp
