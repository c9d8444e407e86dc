#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <functional>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <variant>
#include <vector>

#include <json.hpp>

#include "zkmcp/proof_system.hpp"

namespace zkmcp {

using Clock = std::function<int64_t()>;
int64_t system_clock_ms();

// ---- session state machine ----

enum class SessionState {
  kInit,
  kSessionActive,
  kAuditPending,
  kAuditVerified,
  kAuditRejected,
  kSessionClosed,
};
inline constexpr SessionState kAllStates[] = {
    SessionState::kInit,          SessionState::kSessionActive,  SessionState::kAuditPending,
    SessionState::kAuditVerified, SessionState::kAuditRejected, SessionState::kSessionClosed};

std::string_view state_name(SessionState s);
SessionState parse_state(std::string_view name);

enum class EventKind { kSessionStart, kAuditRequest, kSessionClose };
inline constexpr EventKind kAllEvents[] = {EventKind::kSessionStart, EventKind::kAuditRequest,
                                           EventKind::kSessionClose};
std::string_view event_name(EventKind e);

// State after an inbound event, or nullopt if the pair is illegal. An
// Audit-Request lands in AUDIT_PENDING; the verification outcome then moves
// it on with settle_audit.
std::optional<SessionState> next_state(SessionState from, EventKind event);
SessionState settle_audit(SessionState from, bool verified);  // throws IllegalTransition

// ---- events ----

struct SessionStart {
  std::string s_id;
  std::string initiator;
  std::string peer;
  std::string submitter;
};

struct AuditRequest {
  std::string s_id;
  std::string submitter;
  ProofBundle proof;
  size_t filler_count = 0;
};

struct SessionClose {
  std::string s_id;
  std::string submitter;
  size_t msg_count = 0;
};

using Event = std::variant<SessionStart, AuditRequest, SessionClose>;

EventKind kind_of(const Event& e);
const std::string& s_id_of(const Event& e);
const std::string& submitter_of(const Event& e);

// Wire bodies. Throws Decode on missing or mistyped fields.
nlohmann::json event_body(const Event& e);
Event event_from_body(EventKind kind, const std::string& s_id, const nlohmann::json& body);
// SHA-256 of the canonical body; identifies retransmissions.
std::string event_digest(const Event& e);

// kind is "ack" or "audit_result".
struct Reply {
  std::string kind;
  std::string s_id;
  nlohmann::json body;
};

// ---- ASP records ----

enum class AuditStatus { kNone, kPending, kVerified, kRejected };
std::string_view audit_status_name(AuditStatus s);

struct SessionRecord {
  std::string s_id;
  std::string submitter;
  std::string initiator;
  std::string peer;
  SessionState state = SessionState::kInit;
  AuditStatus audit_status = AuditStatus::kNone;
  int64_t start_time = 0;
  int64_t end_time = 0;
  size_t msg_count = 0;
  size_t filler_count = 0;
  std::string start_digest;
  std::string audit_digest;
  std::string close_digest;

  int64_t duration_ms() const { return end_time > start_time ? end_time - start_time : 0; }
  nlohmann::json to_json() const;
  static SessionRecord from_json(const nlohmann::json& j);
  friend bool operator==(const SessionRecord&, const SessionRecord&) = default;
};

struct AuditRecord {
  std::string s_id;
  std::string submitter;
  std::vector<uint64_t> counts;
  std::vector<std::string> hashes;
  int64_t verified_at = 0;
  size_t filler_count = 0;
  std::string request_digest;
  uint64_t seq = 0;  // shared decision order across both logs

  nlohmann::json to_json() const;
  static AuditRecord from_json(const nlohmann::json& j);
};

inline constexpr std::string_view kInvalidProofReason = "Invalid proof";

struct Violation {
  std::string s_id;
  std::string submitter;
  int64_t flagged_at = 0;
  std::string reason;
  std::string detail;
  std::string request_digest;
  uint64_t seq = 0;

  nlohmann::json to_json() const;
  static Violation from_json(const nlohmann::json& j);
};

// Latest audit decision per (s_id, submitter).
struct Decision {
  bool verified = false;
  std::vector<uint64_t> counts;  // empty when rejected
  friend bool operator==(const Decision&, const Decision&) = default;
};
using SessionKey = std::pair<std::string, std::string>;
using DecisionMap = std::map<SessionKey, Decision>;

// Latest decision per key, ordered by seq.
DecisionMap fold_decisions(std::span<const AuditRecord> audits,
                           std::span<const Violation> violations);
// Rebuilds decisions from audit_db.jsonl and violations.jsonl alone, in
// append order. Throws IoFailure on unreadable or corrupt lines.
DecisionMap replay_audit_logs(const std::filesystem::path& dir);

struct AspOptions {
  std::filesystem::path data_dir;  // empty: in-memory only
  bool allow_insecure = false;
  Clock clock = system_clock_ms;
};

// Audit service. Events for distinct (s_id, submitter) run concurrently;
// events for one key are serialized.
class Asp {
 public:
  // Replays data_dir if it holds earlier logs. Refuses the oracle backend
  // unless allow_insecure is set (BackendUnavailable).
  Asp(std::shared_ptr<const CrsBundle> crs, AspOptions opts = {});

  // Throws UnknownSession, IllegalTransition, ShapeMismatch.
  Reply handle(const Event& e);

  std::optional<SessionRecord> session(const std::string& s_id,
                                       const std::string& submitter) const;
  std::vector<SessionRecord> sessions() const;
  std::vector<AuditRecord> audit_records() const;
  std::vector<Violation> violations() const;
  DecisionMap decisions() const;
  const CrsBundle& crs() const { return *crs_; }

 private:
  struct Slot {
    std::mutex mu;
    SessionRecord rec;
  };

  Slot* find_slot(const SessionKey& key) const;
  Slot& slot_for_start(const SessionKey& key);
  Reply on_start(const SessionStart& e);
  Reply on_audit(const AuditRequest& e);
  Reply on_close(const SessionClose& e);
  void persist(const SessionRecord& rec);
  void append(const std::string& file, const nlohmann::json& line);
  void replay();

  std::shared_ptr<const CrsBundle> crs_;
  AspOptions opts_;
  mutable std::shared_mutex map_mu_;
  std::map<SessionKey, std::unique_ptr<Slot>> slots_;
  mutable std::mutex log_mu_;
  std::vector<AuditRecord> audits_;
  std::vector<Violation> violations_;
  uint64_t next_seq_ = 0;
};

// ---- agent ----

// Channel to the ASP. Throws AspUnreachable, ConnectionRefused, or Timeout
// on transport failure (retried) and any other Error for a refused event.
class AspLink {
 public:
  virtual ~AspLink() = default;
  virtual Reply send(const Event& e) = 0;
};

class InProcessLink : public AspLink {
 public:
  explicit InProcessLink(Asp& asp) : asp_(asp) {}
  Reply send(const Event& e) override;
  // Simulated outage: every send fails with AspUnreachable while set.
  void set_down(bool down) { down_ = down; }

 private:
  Asp& asp_;
  std::atomic<bool> down_{false};
};

enum class Direction { kSent, kReceived };

struct AgentOptions {
  std::string agent_id = "agent";
  bool prove = true;            // false: sessions close without an audit
  bool pad_with_filler = true;  // top short sessions up with "ping" messages
  std::string filler_type = "ping";
  std::chrono::milliseconds retry_base{20};
  std::chrono::milliseconds retry_cap{1000};
  Clock clock = system_clock_ms;
};

struct AgentSession {
  std::string s_id;
  std::string peer;
  SessionState state = SessionState::kSessionActive;
  int64_t start_time = 0;
  int64_t end_time = 0;
  int64_t last_message_time = 0;
  int64_t prove_started_at = 0;
  int64_t prove_finished_at = 0;
  size_t msg_count = 0;
  size_t filler_count = 0;
  size_t sent = 0;
  size_t received = 0;
  std::string audit_status;  // from the ASP reply, empty until it arrives
  std::vector<int64_t> record_times;  // timestamp of each record_message call
  std::string delivery_error;
};

class Agent {
 public:
  Agent(std::shared_ptr<const CrsBundle> crs, std::shared_ptr<AspLink> link,
        AgentOptions opts = {});
  ~Agent();
  Agent(const Agent&) = delete;
  Agent& operator=(const Agent&) = delete;

  // initiator|peer|ms timestamp|64-bit hex suffix; Session-Start is queued.
  std::string start_session(const std::string& peer);

  // Constant-time buffer append; no proving, no network I/O. Throws
  // SessionNotActive, MalformedEnvelope, TooLong, UnknownType.
  void record_message(const std::string& s_id, std::string_view raw, Direction dir);

  // Ends communication, then proves on the background worker and queues
  // Audit-Request and Session-Close. Short sessions are padded first when
  // enabled. The future throws WrongMessageCount or ProveFailure.
  std::future<ProofBundle> finish_session(const std::string& s_id);

  // Synchronous audit of a finished or active session; no padding.
  // Throws WrongMessageCount, ProveFailure.
  ProofBundle generate_audit(const std::string& s_id);

  AgentSession session(const std::string& s_id) const;
  std::vector<std::string> active_sessions() const;
  size_t buffered(const std::string& s_id) const;
  size_t outbox_size() const;
  // Waits until no proof job or outbox entry is pending.
  bool wait_idle(std::chrono::milliseconds timeout);

 private:
  struct Session {
    mutable std::mutex mu;
    AgentSession info;
    std::vector<AuditMessage> messages;
  };
  struct Outgoing {
    Event event;
    int attempts = 0;
  };

  Session& get(const std::string& s_id) const;
  void enqueue(Event e);
  void outbox_loop();
  void prover_loop();
  void on_reply(const Event& sent, const Reply& reply);
  void set_state(const std::string& s_id, SessionState s);
  ProofBundle run_audit(Session& s);

  std::shared_ptr<const CrsBundle> crs_;
  std::shared_ptr<AspLink> link_;
  AgentOptions opts_;
  size_t max_json_ = 0;
  std::vector<std::string> table_;

  mutable std::shared_mutex sessions_mu_;
  std::map<std::string, std::unique_ptr<Session>> sessions_;

  mutable std::mutex out_mu_;
  std::condition_variable out_cv_;
  std::deque<Outgoing> outbox_;
  bool in_flight_ = false;

  std::mutex job_mu_;
  std::condition_variable job_cv_;
  std::deque<std::packaged_task<ProofBundle()>> jobs_;
  size_t jobs_running_ = 0;

  std::atomic<bool> stopping_{false};
  std::thread outbox_thread_;
  std::thread prover_thread_;
};

}  // namespace zkmcp
