#include <openssl/rand.h>

#include <algorithm>
#include <cstdio>

#include "zkmcp/errors.hpp"
#include "zkmcp/protocol.hpp"

namespace zkmcp {

namespace {

bool retryable(ErrorCode c) {
  return c == ErrorCode::kAspUnreachable || c == ErrorCode::kConnectionRefused ||
         c == ErrorCode::kTimeout;
}

std::string random_suffix() {
  uint8_t buf[8];
  if (RAND_bytes(buf, sizeof buf) != 1) throw Error(ErrorCode::kIoFailure, "RAND_bytes failed");
  char hex[17];
  for (size_t i = 0; i < 8; ++i) std::snprintf(hex + 2 * i, 3, "%02x", buf[i]);
  return hex;
}

}  // namespace

Agent::Agent(std::shared_ptr<const CrsBundle> crs, std::shared_ptr<AspLink> link,
             AgentOptions opts)
    : crs_(std::move(crs)), link_(std::move(link)), opts_(std::move(opts)) {
  max_json_ = crs_->circuit_meta.at("max_json").get<size_t>();
  table_ = crs_->circuit_meta.at("type_table").get<std::vector<std::string>>();
  if (opts_.prove && !crs_->circuit) {
    throw Error(ErrorCode::kBackendUnavailable, "agent crs was loaded without a proving key");
  }
  outbox_thread_ = std::thread([this] { outbox_loop(); });
  prover_thread_ = std::thread([this] { prover_loop(); });
}

Agent::~Agent() {
  {
    std::lock_guard lock(job_mu_);
    stopping_ = true;
  }
  job_cv_.notify_all();
  {
    std::lock_guard lock(out_mu_);
  }
  out_cv_.notify_all();
  prover_thread_.join();
  outbox_thread_.join();
}

std::string Agent::start_session(const std::string& peer) {
  const int64_t now = opts_.clock();
  const std::string s_id =
      opts_.agent_id + "|" + peer + "|" + std::to_string(now) + "|" + random_suffix();
  auto s = std::make_unique<Session>();
  s->info.s_id = s_id;
  s->info.peer = peer;
  s->info.start_time = now;
  {
    std::unique_lock lock(sessions_mu_);
    sessions_.emplace(s_id, std::move(s));
  }
  enqueue(SessionStart{s_id, opts_.agent_id, peer, opts_.agent_id});
  return s_id;
}

Agent::Session& Agent::get(const std::string& s_id) const {
  std::shared_lock lock(sessions_mu_);
  auto it = sessions_.find(s_id);
  if (it == sessions_.end()) throw Error(ErrorCode::kUnknownSession, "no session " + s_id);
  return *it->second;
}

void Agent::record_message(const std::string& s_id, std::string_view raw, Direction dir) {
  const int64_t now = opts_.clock();
  Session& s = get(s_id);
  std::lock_guard lock(s.mu);
  if (s.info.state != SessionState::kSessionActive) {
    throw Error(ErrorCode::kSessionNotActive,
                s_id + " is " + std::string(state_name(s.info.state)));
  }
  AuditMessage m = AuditMessage::from_raw(raw, now);
  if (m.total_len > max_json_) {
    throw Error(ErrorCode::kTooLong, "message of " + std::to_string(m.total_len) + " bytes");
  }
  if (std::find(table_.begin(), table_.end(), m.type_string) == table_.end()) {
    throw Error(ErrorCode::kUnknownType, "type '" + m.type_string + "' not in the table");
  }
  s.messages.push_back(std::move(m));
  s.info.msg_count = s.messages.size();
  s.info.last_message_time = now;
  s.info.record_times.push_back(now);
  (dir == Direction::kSent ? s.info.sent : s.info.received) += 1;
}

std::future<ProofBundle> Agent::finish_session(const std::string& s_id) {
  Session& s = get(s_id);
  {
    std::lock_guard lock(s.mu);
    if (s.info.state != SessionState::kSessionActive) {
      throw Error(ErrorCode::kSessionNotActive,
                  s_id + " is " + std::string(state_name(s.info.state)));
    }
    const size_t n = crs_->n();
    if (opts_.pad_with_filler) {
      while (s.messages.size() < n) {
        s.messages.push_back(AuditMessage::from_type(opts_.filler_type, opts_.clock()));
        ++s.info.filler_count;
      }
      s.info.msg_count = s.messages.size();
    }
    s.info.end_time = opts_.clock();
    if (!opts_.prove) {
      s.info.state = SessionState::kSessionClosed;
      s.messages.clear();
      enqueue(SessionClose{s_id, opts_.agent_id, s.info.msg_count});
      std::promise<ProofBundle> none;
      none.set_value({});
      return none.get_future();
    }
    s.info.state = SessionState::kAuditPending;
  }
  std::packaged_task<ProofBundle()> task([this, &s] { return run_audit(s); });
  auto fut = task.get_future();
  {
    std::lock_guard lock(job_mu_);
    jobs_.push_back(std::move(task));
  }
  job_cv_.notify_one();
  return fut;
}

ProofBundle Agent::generate_audit(const std::string& s_id) {
  Session& s = get(s_id);
  {
    std::lock_guard lock(s.mu);
    if (s.info.state == SessionState::kSessionActive) {
      s.info.end_time = opts_.clock();
      s.info.state = SessionState::kAuditPending;
    }
  }
  return run_audit(s);
}

// Proves from a snapshot of the buffer so the session lock is not held
// while proving.
ProofBundle Agent::run_audit(Session& s) {
  std::vector<AuditMessage> msgs;
  std::string s_id;
  {
    std::lock_guard lock(s.mu);
    if (s.info.state != SessionState::kAuditPending) {
      throw Error(ErrorCode::kSessionNotActive, s.info.s_id + " has no audit pending");
    }
    if (s.messages.size() != crs_->n()) {
      throw Error(ErrorCode::kWrongMessageCount,
                  std::to_string(s.messages.size()) + " buffered messages, circuit n = " +
                      std::to_string(crs_->n()));
    }
    msgs = s.messages;
    s_id = s.info.s_id;
    s.info.prove_started_at = opts_.clock();
  }
  ProofBundle bundle;
  try {
    const auto [w, x] = synthesize_witness(*crs_->circuit, msgs);
    bundle = prove(*crs_, x, w, s_id);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kWrongMessageCount) throw;
    throw Error(ErrorCode::kProveFailure, e.what());
  }
  std::lock_guard lock(s.mu);
  s.info.prove_finished_at = opts_.clock();
  enqueue(AuditRequest{s_id, opts_.agent_id, bundle, s.info.filler_count});
  enqueue(SessionClose{s_id, opts_.agent_id, s.info.msg_count});
  s.messages.clear();
  s.messages.shrink_to_fit();
  return bundle;
}

void Agent::prover_loop() {
  std::unique_lock lock(job_mu_);
  while (true) {
    job_cv_.wait(lock, [&] { return stopping_ || !jobs_.empty(); });
    if (jobs_.empty()) return;
    auto task = std::move(jobs_.front());
    jobs_.pop_front();
    ++jobs_running_;
    lock.unlock();
    task();
    lock.lock();
    --jobs_running_;
  }
}

void Agent::enqueue(Event e) {
  {
    std::lock_guard lock(out_mu_);
    outbox_.push_back({std::move(e), 0});
  }
  out_cv_.notify_one();
}

void Agent::outbox_loop() {
  std::unique_lock lock(out_mu_);
  while (true) {
    out_cv_.wait(lock, [&] { return stopping_ || !outbox_.empty(); });
    if (stopping_) return;
    const Event event = outbox_.front().event;
    in_flight_ = true;
    lock.unlock();

    std::optional<Reply> reply;
    std::optional<Error> error;
    try {
      reply = link_->send(event);
    } catch (const Error& e) {
      error = e;
    } catch (const std::exception& e) {
      error = Error(ErrorCode::kAspUnreachable, e.what());
    }
    if (reply) on_reply(event, *reply);
    if (error && !retryable(error->code())) {
      std::lock_guard slock(get(s_id_of(event)).mu);
      get(s_id_of(event)).info.delivery_error = error->what();
    }

    lock.lock();
    in_flight_ = false;
    if (error && retryable(error->code())) {
      const int attempts = ++outbox_.front().attempts;
      std::chrono::milliseconds delay = opts_.retry_base * (int64_t{1} << std::min(attempts - 1, 20));
      delay = std::min(delay, opts_.retry_cap);
      out_cv_.wait_for(lock, delay, [&] { return stopping_.load(); });
      continue;
    }
    outbox_.pop_front();
  }
}

void Agent::on_reply(const Event& sent, const Reply& reply) {
  Session& s = get(s_id_of(sent));
  std::lock_guard lock(s.mu);
  if (reply.s_id != s.info.s_id) {
    s.info.delivery_error = "reply for " + reply.s_id + " to a request for " + s.info.s_id;
    return;
  }
  if (reply.kind == "audit_result") {
    const std::string status = reply.body.value("status", "");
    s.info.audit_status = status;
    s.info.state = status == "verified" ? SessionState::kAuditVerified
                                        : SessionState::kAuditRejected;
  } else if (kind_of(sent) == EventKind::kSessionClose) {
    s.info.state = SessionState::kSessionClosed;
  }
}

AgentSession Agent::session(const std::string& s_id) const {
  Session& s = get(s_id);
  std::lock_guard lock(s.mu);
  return s.info;
}

std::vector<std::string> Agent::active_sessions() const {
  std::shared_lock lock(sessions_mu_);
  std::vector<std::string> out;
  for (const auto& [id, s] : sessions_) {
    std::lock_guard slock(s->mu);
    if (s->info.state == SessionState::kSessionActive) out.push_back(id);
  }
  return out;
}

size_t Agent::buffered(const std::string& s_id) const {
  Session& s = get(s_id);
  std::lock_guard lock(s.mu);
  return s.messages.size();
}

size_t Agent::outbox_size() const {
  std::lock_guard lock(out_mu_);
  return outbox_.size();
}

bool Agent::wait_idle(std::chrono::milliseconds timeout) {
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  while (std::chrono::steady_clock::now() < deadline) {
    bool idle;
    {
      std::lock_guard a(job_mu_);
      std::lock_guard b(out_mu_);
      idle = jobs_.empty() && jobs_running_ == 0 && outbox_.empty() && !in_flight_;
    }
    if (idle) return true;
    std::this_thread::sleep_for(std::chrono::milliseconds(2));
  }
  return false;
}

}  // namespace zkmcp
