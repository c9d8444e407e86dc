#include "jsonl.hpp"
#include "zkmcp/errors.hpp"
#include "zkmcp/proof/encoding.hpp"
#include "zkmcp/protocol.hpp"

namespace zkmcp {

using nlohmann::json;

int64_t system_clock_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

std::string_view state_name(SessionState s) {
  switch (s) {
    case SessionState::kInit: return "INIT";
    case SessionState::kSessionActive: return "SESSION_ACTIVE";
    case SessionState::kAuditPending: return "AUDIT_PENDING";
    case SessionState::kAuditVerified: return "AUDIT_VERIFIED";
    case SessionState::kAuditRejected: return "AUDIT_REJECTED";
    case SessionState::kSessionClosed: return "SESSION_CLOSED";
  }
  return "?";
}

SessionState parse_state(std::string_view name) {
  for (SessionState s : kAllStates) {
    if (state_name(s) == name) return s;
  }
  throw Error(ErrorCode::kDecode, "unknown session state '" + std::string(name) + "'");
}

std::string_view event_name(EventKind e) {
  switch (e) {
    case EventKind::kSessionStart: return "session_start";
    case EventKind::kAuditRequest: return "audit_request";
    case EventKind::kSessionClose: return "session_close";
  }
  return "?";
}

std::optional<SessionState> next_state(SessionState from, EventKind event) {
  using S = SessionState;
  switch (event) {
    case EventKind::kSessionStart:
      if (from == S::kInit || from == S::kSessionClosed) return S::kSessionActive;
      break;
    case EventKind::kAuditRequest:
      if (from == S::kSessionActive || from == S::kSessionClosed) return S::kAuditPending;
      break;
    case EventKind::kSessionClose:
      if (from == S::kSessionActive || from == S::kAuditVerified || from == S::kAuditRejected) {
        return S::kSessionClosed;
      }
      break;
  }
  return std::nullopt;
}

SessionState settle_audit(SessionState from, bool verified) {
  if (from != SessionState::kAuditPending) {
    throw Error(ErrorCode::kIllegalTransition,
                "audit outcome in state " + std::string(state_name(from)));
  }
  return verified ? SessionState::kAuditVerified : SessionState::kAuditRejected;
}

EventKind kind_of(const Event& e) {
  return static_cast<EventKind>(e.index());
}

const std::string& s_id_of(const Event& e) {
  return std::visit([](const auto& v) -> const std::string& { return v.s_id; }, e);
}

const std::string& submitter_of(const Event& e) {
  return std::visit([](const auto& v) -> const std::string& { return v.submitter; }, e);
}

json event_body(const Event& e) {
  struct Visitor {
    json operator()(const SessionStart& v) const {
      return {{"initiator", v.initiator}, {"peer", v.peer}, {"submitter", v.submitter}};
    }
    json operator()(const AuditRequest& v) const {
      return {{"statement", v.proof.statement.to_json()},
              {"proof", v.proof.proof_json()},
              {"submitter", v.submitter},
              {"filler_count", v.filler_count}};
    }
    json operator()(const SessionClose& v) const {
      return {{"submitter", v.submitter}, {"msg_count", v.msg_count}};
    }
  };
  return std::visit(Visitor{}, e);
}

Event event_from_body(EventKind kind, const std::string& s_id, const json& body) {
  try {
    switch (kind) {
      case EventKind::kSessionStart: {
        SessionStart v;
        v.s_id = s_id;
        v.initiator = body.at("initiator").get<std::string>();
        v.peer = body.at("peer").get<std::string>();
        v.submitter = body.at("submitter").get<std::string>();
        return v;
      }
      case EventKind::kAuditRequest: {
        AuditRequest v;
        v.s_id = s_id;
        v.submitter = body.at("submitter").get<std::string>();
        v.filler_count = body.at("filler_count").get<size_t>();
        v.proof = ProofBundle::from_proof_json(body.at("proof"),
                                               PublicStatement::from_json(body.at("statement")));
        v.proof.s_id = s_id;
        return v;
      }
      case EventKind::kSessionClose: {
        SessionClose v;
        v.s_id = s_id;
        v.submitter = body.at("submitter").get<std::string>();
        v.msg_count = body.at("msg_count").get<size_t>();
        return v;
      }
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kDecode, std::string(event_name(kind)) + " body: " + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kBadFieldElement) throw Error(ErrorCode::kDecode, e.what());
    throw;
  }
  throw Error(ErrorCode::kDecode, "unknown event kind");
}

std::string event_digest(const Event& e) {
  return sha256_hex(std::string(event_name(kind_of(e))) + "\n" + s_id_of(e) + "\n" +
                    event_body(e).dump());
}

std::string_view audit_status_name(AuditStatus s) {
  switch (s) {
    case AuditStatus::kNone: return "none";
    case AuditStatus::kPending: return "pending";
    case AuditStatus::kVerified: return "verified";
    case AuditStatus::kRejected: return "rejected";
  }
  return "?";
}

namespace {

AuditStatus parse_audit_status(std::string_view name) {
  for (auto s : {AuditStatus::kNone, AuditStatus::kPending, AuditStatus::kVerified,
                 AuditStatus::kRejected}) {
    if (audit_status_name(s) == name) return s;
  }
  throw Error(ErrorCode::kDecode, "unknown audit status '" + std::string(name) + "'");
}

template <class F>
auto decode_line(const char* what, F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kDecode, std::string(what) + ": " + e.what());
  }
}

}  // namespace

json SessionRecord::to_json() const {
  return {{"s_id", s_id},
          {"submitter", submitter},
          {"initiator", initiator},
          {"peer", peer},
          {"state", state_name(state)},
          {"audit_status", audit_status_name(audit_status)},
          {"start_time", start_time},
          {"end_time", end_time},
          {"duration_ms", duration_ms()},
          {"msg_count", msg_count},
          {"filler_count", filler_count},
          {"start_digest", start_digest},
          {"audit_digest", audit_digest},
          {"close_digest", close_digest}};
}

SessionRecord SessionRecord::from_json(const json& j) {
  return decode_line("session record", [&] {
    SessionRecord r;
    r.s_id = j.at("s_id").get<std::string>();
    r.submitter = j.at("submitter").get<std::string>();
    r.initiator = j.at("initiator").get<std::string>();
    r.peer = j.at("peer").get<std::string>();
    r.state = parse_state(j.at("state").get<std::string>());
    r.audit_status = parse_audit_status(j.at("audit_status").get<std::string>());
    r.start_time = j.at("start_time").get<int64_t>();
    r.end_time = j.at("end_time").get<int64_t>();
    r.msg_count = j.at("msg_count").get<size_t>();
    r.filler_count = j.at("filler_count").get<size_t>();
    r.start_digest = j.at("start_digest").get<std::string>();
    r.audit_digest = j.at("audit_digest").get<std::string>();
    r.close_digest = j.at("close_digest").get<std::string>();
    return r;
  });
}

json AuditRecord::to_json() const {
  return {{"s_id", s_id},
          {"submitter", submitter},
          {"counts", counts},
          {"hashes", hashes},
          {"verified_at", verified_at},
          {"filler_count", filler_count},
          {"request_digest", request_digest},
          {"seq", seq}};
}

AuditRecord AuditRecord::from_json(const json& j) {
  return decode_line("audit record", [&] {
    AuditRecord r;
    r.s_id = j.at("s_id").get<std::string>();
    r.submitter = j.at("submitter").get<std::string>();
    r.counts = j.at("counts").get<std::vector<uint64_t>>();
    r.hashes = j.at("hashes").get<std::vector<std::string>>();
    r.verified_at = j.at("verified_at").get<int64_t>();
    r.filler_count = j.at("filler_count").get<size_t>();
    r.request_digest = j.at("request_digest").get<std::string>();
    r.seq = j.at("seq").get<uint64_t>();
    return r;
  });
}

json Violation::to_json() const {
  return {{"s_id", s_id},         {"submitter", submitter}, {"flagged_at", flagged_at},
          {"reason", reason},     {"detail", detail},       {"request_digest", request_digest}, {"seq", seq}};
}

Violation Violation::from_json(const json& j) {
  return decode_line("violation", [&] {
    Violation v;
    v.s_id = j.at("s_id").get<std::string>();
    v.submitter = j.at("submitter").get<std::string>();
    v.flagged_at = j.at("flagged_at").get<int64_t>();
    v.reason = j.at("reason").get<std::string>();
    v.detail = j.at("detail").get<std::string>();
    v.request_digest = j.at("request_digest").get<std::string>();
    v.seq = j.at("seq").get<uint64_t>();
    return v;
  });
}

DecisionMap fold_decisions(std::span<const AuditRecord> audits,
                           std::span<const Violation> violations) {
  struct Entry {
    uint64_t seq;
    SessionKey key;
    Decision d;
  };
  std::vector<Entry> entries;
  for (const auto& r : audits) entries.push_back({r.seq, {r.s_id, r.submitter}, {true, r.counts}});
  for (const auto& v : violations) entries.push_back({v.seq, {v.s_id, v.submitter}, {false, {}}});
  std::stable_sort(entries.begin(), entries.end(),
                   [](const Entry& a, const Entry& b) { return a.seq < b.seq; });
  DecisionMap out;
  for (auto& e : entries) out[e.key] = std::move(e.d);
  return out;
}

DecisionMap replay_audit_logs(const std::filesystem::path& dir) {
  std::vector<AuditRecord> audits;
  std::vector<Violation> violations;
  jsonl::for_each_line(dir / "audit_db.jsonl",
                       [&](const json& j) { audits.push_back(AuditRecord::from_json(j)); });
  jsonl::for_each_line(dir / "violations.jsonl",
                       [&](const json& j) { violations.push_back(Violation::from_json(j)); });
  return fold_decisions(audits, violations);
}

}  // namespace zkmcp
