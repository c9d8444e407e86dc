#pragma once

#include <atomic>
#include <condition_variable>
#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <set>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include <json.hpp>

#include "zkmcp/errors.hpp"
#include "zkmcp/protocol.hpp"

namespace zkmcp {

namespace net {
class LineReader;
}  // namespace net

inline constexpr std::string_view kProtocolVersion = "zkmcp/1";
inline constexpr size_t kMaxLineBytes = size_t{1} << 20;

// One newline-delimited JSON object per message.
struct WireEnvelope {
  std::string protocol_version{kProtocolVersion};
  std::string kind;  // session_start | audit_request | session_close | ack | audit_result | error
  std::string s_id;
  nlohmann::json body = nlohmann::json::object();

  // Compact JSON with sorted keys and no trailing newline.
  std::string encode() const;
  // Throws Decode (not an envelope, unknown kind, over-long) or Version.
  static WireEnvelope decode(std::string_view line);
  friend bool operator==(const WireEnvelope&, const WireEnvelope&) = default;
};

WireEnvelope to_envelope(const Event& e);
Event event_from_envelope(const WireEnvelope& w);  // throws Decode
WireEnvelope to_envelope(const Reply& r);
WireEnvelope error_envelope(const std::string& s_id, ErrorCode code, const std::string& message);

// decode, version, shape, illegal_transition, unknown_session, ...
std::string wire_error_code(ErrorCode code);
ErrorCode error_from_wire(std::string_view code);

// Decodes one request line, dispatches it to the ASP and returns the encoded
// reply. Decode and version failures are passed to `log`.
std::string handle_wire_line(Asp& asp, std::string_view line,
                             const std::function<void(const std::string&)>& log = {});

struct Endpoint {
  std::string host = "127.0.0.1";
  uint16_t port = 0;

  // "HOST:PORT"; throws InvalidParams.
  static Endpoint parse(std::string_view s);
  std::string str() const { return host + ":" + std::to_string(port); }
};

// Observer of raw lines on a connection; direction is "in" or "out".
using LineTap = std::function<void(std::string_view direction, std::string_view line)>;

struct ServerOptions {
  Endpoint listen;
  size_t max_workers = 32;
  std::function<void(const std::string&)> log;
  LineTap tap;
};

// NDJSON front end for an Asp. Each connection is served in request order
// on its own worker; at most max_workers connections are served at once.
class AspServer {
 public:
  // Binds immediately; port 0 picks a free port. Throws BindFailure.
  AspServer(Asp& asp, ServerOptions opts);
  ~AspServer();
  AspServer(const AspServer&) = delete;
  AspServer& operator=(const AspServer&) = delete;

  uint16_t port() const { return port_; }
  void start();
  void stop();
  // Handles one decoded line; exposed for tests.
  std::string handle_line(std::string_view line);

 private:
  void accept_loop();
  void serve(int fd);
  void log(const std::string& msg) const;

  Asp& asp_;
  ServerOptions opts_;
  int listen_fd_ = -1;
  uint16_t port_ = 0;
  std::atomic<bool> stopping_{false};
  std::thread accept_thread_;
  std::mutex conn_mu_;
  std::condition_variable conn_cv_;
  std::set<int> conns_;
  size_t active_ = 0;
};

// Client side of the wire protocol over one persistent connection,
// reconnecting after failures.
class TcpAspLink : public AspLink {
 public:
  explicit TcpAspLink(Endpoint asp, std::chrono::milliseconds timeout = std::chrono::seconds(30));
  ~TcpAspLink() override;

  // Throws ConnectionRefused, Timeout, ProtocolError (reply for another
  // s_id, or unparseable reply), or the error the server returned.
  Reply send(const Event& e) override;
  WireEnvelope roundtrip(const WireEnvelope& request);
  // Sends a raw line and returns the raw reply line.
  std::string roundtrip_line(std::string_view line);

  void set_tap(LineTap tap) { tap_ = std::move(tap); }

 private:
  void connect_locked();
  void close_locked();

  Endpoint asp_;
  std::chrono::milliseconds timeout_;
  std::mutex mu_;
  int fd_ = -1;
  std::unique_ptr<net::LineReader> reader_;
  LineTap tap_;
};

}  // namespace zkmcp
