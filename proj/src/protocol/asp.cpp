#include "jsonl.hpp"
#include "zkmcp/errors.hpp"
#include "zkmcp/protocol.hpp"

namespace zkmcp {

using nlohmann::json;

namespace {

constexpr const char* kSessionsFile = "sessions.jsonl";
constexpr const char* kAuditFile = "audit_db.jsonl";
constexpr const char* kViolationsFile = "violations.jsonl";

[[noreturn]] void illegal(const SessionRecord& rec, EventKind event) {
  throw Error(ErrorCode::kIllegalTransition, std::string(event_name(event)) + " for " +
                                                 rec.s_id + " in state " +
                                                 std::string(state_name(rec.state)));
}

uint64_t small_count(const Fr& f) {
  const U256 v = f.to_canonical();
  return v.limb[0];
}

Reply ack(const SessionRecord& rec, bool replay) {
  json body = {{"state", state_name(rec.state)}, {"replay", replay}};
  if (rec.state == SessionState::kSessionClosed) {
    body["stats"] = {{"duration_ms", rec.duration_ms()},
                     {"msg_count", rec.msg_count},
                     {"audit_status", audit_status_name(rec.audit_status)}};
  }
  return {"ack", rec.s_id, std::move(body)};
}

Reply audit_result(const SessionRecord& rec, bool replay) {
  const bool ok = rec.audit_status == AuditStatus::kVerified;
  json body = {{"status", ok ? "verified" : "rejected"}, {"replay", replay}};
  if (!ok) body["reason"] = kInvalidProofReason;
  return {"audit_result", rec.s_id, std::move(body)};
}

}  // namespace

Asp::Asp(std::shared_ptr<const CrsBundle> crs, AspOptions opts)
    : crs_(std::move(crs)), opts_(std::move(opts)) {
  if (crs_->is_insecure() && !opts_.allow_insecure) {
    throw Error(ErrorCode::kBackendUnavailable,
                "refusing the insecure oracle backend without the insecure flag");
  }
  if (!crs_->pvk && !crs_->is_insecure()) {
    throw Error(ErrorCode::kCorruptCrs, "crs has no verification key");
  }
  if (!opts_.data_dir.empty()) {
    std::filesystem::create_directories(opts_.data_dir);
    replay();
  }
}

void Asp::replay() {
  jsonl::for_each_line(opts_.data_dir / kSessionsFile, [&](const json& j) {
    auto rec = SessionRecord::from_json(j);
    auto& slot = slots_[{rec.s_id, rec.submitter}];
    if (!slot) slot = std::make_unique<Slot>();
    slot->rec = std::move(rec);
  });
  jsonl::for_each_line(opts_.data_dir / kAuditFile, [&](const json& j) {
    audits_.push_back(AuditRecord::from_json(j));
    next_seq_ = std::max(next_seq_, audits_.back().seq + 1);
  });
  jsonl::for_each_line(opts_.data_dir / kViolationsFile, [&](const json& j) {
    violations_.push_back(Violation::from_json(j));
    next_seq_ = std::max(next_seq_, violations_.back().seq + 1);
  });
}

void Asp::persist(const SessionRecord& rec) {
  if (opts_.data_dir.empty()) return;
  std::lock_guard lock(log_mu_);
  jsonl::append_line(opts_.data_dir / kSessionsFile, rec.to_json());
}

void Asp::append(const std::string& file, const json& line) {
  if (opts_.data_dir.empty()) return;
  jsonl::append_line(opts_.data_dir / file, line);
}

Asp::Slot* Asp::find_slot(const SessionKey& key) const {
  std::shared_lock lock(map_mu_);
  auto it = slots_.find(key);
  return it == slots_.end() ? nullptr : it->second.get();
}

Asp::Slot& Asp::slot_for_start(const SessionKey& key) {
  std::unique_lock lock(map_mu_);
  auto& slot = slots_[key];
  if (!slot) {
    slot = std::make_unique<Slot>();
    slot->rec.s_id = key.first;
    slot->rec.submitter = key.second;
  }
  return *slot;
}

Reply Asp::handle(const Event& e) {
  if (s_id_of(e).empty() || submitter_of(e).empty()) {
    throw Error(ErrorCode::kDecode, "event without s_id or submitter");
  }
  switch (kind_of(e)) {
    case EventKind::kSessionStart: return on_start(std::get<SessionStart>(e));
    case EventKind::kAuditRequest: return on_audit(std::get<AuditRequest>(e));
    case EventKind::kSessionClose: return on_close(std::get<SessionClose>(e));
  }
  throw Error(ErrorCode::kDecode, "unknown event");
}

Reply Asp::on_start(const SessionStart& e) {
  Slot& slot = slot_for_start({e.s_id, e.submitter});
  std::lock_guard lock(slot.mu);
  SessionRecord& rec = slot.rec;
  const std::string digest = event_digest(e);
  if (rec.state == SessionState::kSessionActive && rec.start_digest == digest) {
    return ack(rec, true);
  }
  const auto next = next_state(rec.state, EventKind::kSessionStart);
  if (!next) illegal(rec, EventKind::kSessionStart);
  rec.initiator = e.initiator;
  rec.peer = e.peer;
  rec.state = *next;
  rec.audit_status = AuditStatus::kPending;
  rec.start_time = opts_.clock();
  rec.end_time = 0;
  rec.msg_count = 0;
  rec.filler_count = 0;
  rec.start_digest = digest;
  rec.audit_digest.clear();
  rec.close_digest.clear();
  persist(rec);
  return ack(rec, false);
}

Reply Asp::on_audit(const AuditRequest& e) {
  Slot* slot = find_slot({e.s_id, e.submitter});
  if (!slot) throw Error(ErrorCode::kUnknownSession, "no session " + e.s_id);
  std::lock_guard lock(slot->mu);
  SessionRecord& rec = slot->rec;
  const std::string digest = event_digest(e);
  if (rec.audit_digest == digest && (rec.audit_status == AuditStatus::kVerified ||
                                     rec.audit_status == AuditStatus::kRejected)) {
    return audit_result(rec, true);
  }
  const auto pending = next_state(rec.state, EventKind::kAuditRequest);
  if (!pending) illegal(rec, EventKind::kAuditRequest);
  const PublicStatement& x = e.proof.statement;
  if (x.counts.size() != crs_->num_types() || x.hashes.size() != crs_->n()) {
    throw Error(ErrorCode::kShapeMismatch, "statement shape does not match crs n=" +
                                               std::to_string(crs_->n()));
  }

  bool ok = false;
  std::string detail;
  try {
    ok = verify(*crs_, e.proof);
    if (!ok) detail = "verification equation failed";
  } catch (const Error& err) {
    if (err.code() != ErrorCode::kMalformedProof && err.code() != ErrorCode::kCrsMismatch) {
      throw;
    }
    detail = err.what();
  }
  rec.state = settle_audit(*pending, ok);
  rec.audit_status = ok ? AuditStatus::kVerified : AuditStatus::kRejected;
  rec.audit_digest = digest;
  rec.filler_count = e.filler_count;
  {
    std::lock_guard log_lock(log_mu_);
    if (ok) {
      AuditRecord r;
      r.s_id = e.s_id;
      r.submitter = e.submitter;
      for (const Fr& c : x.counts) r.counts.push_back(small_count(c));
      for (const Fr& h : x.hashes) r.hashes.push_back(h.to_decimal());
      r.verified_at = opts_.clock();
      r.filler_count = e.filler_count;
      r.request_digest = digest;
      r.seq = next_seq_++;
      append(kAuditFile, r.to_json());
      audits_.push_back(std::move(r));
    } else {
      Violation v;
      v.s_id = e.s_id;
      v.submitter = e.submitter;
      v.flagged_at = opts_.clock();
      v.reason = kInvalidProofReason;
      v.detail = detail;
      v.request_digest = digest;
      v.seq = next_seq_++;
      append(kViolationsFile, v.to_json());
      violations_.push_back(std::move(v));
    }
  }
  persist(rec);
  return audit_result(rec, false);
}

Reply Asp::on_close(const SessionClose& e) {
  Slot* slot = find_slot({e.s_id, e.submitter});
  if (!slot) throw Error(ErrorCode::kUnknownSession, "no session " + e.s_id);
  std::lock_guard lock(slot->mu);
  SessionRecord& rec = slot->rec;
  const std::string digest = event_digest(e);
  if (rec.state == SessionState::kSessionClosed && rec.close_digest == digest) {
    return ack(rec, true);
  }
  const auto next = next_state(rec.state, EventKind::kSessionClose);
  if (!next) illegal(rec, EventKind::kSessionClose);
  rec.state = *next;
  rec.end_time = std::max(opts_.clock(), rec.start_time);
  rec.msg_count = e.msg_count;
  rec.close_digest = digest;
  persist(rec);
  return ack(rec, false);
}

std::optional<SessionRecord> Asp::session(const std::string& s_id,
                                          const std::string& submitter) const {
  Slot* slot = find_slot({s_id, submitter});
  if (!slot) return std::nullopt;
  std::lock_guard lock(slot->mu);
  return slot->rec;
}

std::vector<SessionRecord> Asp::sessions() const {
  std::shared_lock lock(map_mu_);
  std::vector<SessionRecord> out;
  for (const auto& [key, slot] : slots_) {
    std::lock_guard slot_lock(slot->mu);
    out.push_back(slot->rec);
  }
  return out;
}

std::vector<AuditRecord> Asp::audit_records() const {
  std::lock_guard lock(log_mu_);
  return audits_;
}

std::vector<Violation> Asp::violations() const {
  std::lock_guard lock(log_mu_);
  return violations_;
}

DecisionMap Asp::decisions() const {
  std::lock_guard lock(log_mu_);
  return fold_decisions(audits_, violations_);
}

Reply InProcessLink::send(const Event& e) {
  if (down_) throw Error(ErrorCode::kAspUnreachable, "in-process ASP marked down");
  return asp_.handle(e);
}

}  // namespace zkmcp
