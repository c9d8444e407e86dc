#include <arpa/inet.h>
#include <fcntl.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>

#include "net.hpp"
#include "zkmcp/transport.hpp"

namespace zkmcp {

TcpAspLink::TcpAspLink(Endpoint asp, std::chrono::milliseconds timeout)
    : asp_(std::move(asp)), timeout_(timeout) {}

TcpAspLink::~TcpAspLink() {
  std::lock_guard lock(mu_);
  close_locked();
}

void TcpAspLink::close_locked() {
  if (fd_ >= 0) ::close(fd_);
  fd_ = -1;
  reader_.reset();
}

void TcpAspLink::connect_locked() {
  if (fd_ >= 0) return;
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  const std::string port = std::to_string(asp_.port);
  if (::getaddrinfo(asp_.host.c_str(), port.c_str(), &hints, &res) != 0 || !res) {
    throw Error(ErrorCode::kConnectionRefused, "cannot resolve " + asp_.str());
  }
  const int fd = ::socket(res->ai_family, res->ai_socktype | SOCK_CLOEXEC, res->ai_protocol);
  if (fd < 0) {
    ::freeaddrinfo(res);
    throw Error(ErrorCode::kConnectionRefused, std::strerror(errno));
  }
  // Non-blocking connect bounded by the timeout.
  ::fcntl(fd, F_SETFL, ::fcntl(fd, F_GETFL) | O_NONBLOCK);
  int rc = ::connect(fd, res->ai_addr, res->ai_addrlen);
  ::freeaddrinfo(res);
  if (rc != 0 && errno == EINPROGRESS) {
    pollfd p{fd, POLLOUT, 0};
    rc = ::poll(&p, 1, static_cast<int>(timeout_.count()));
    if (rc == 0) {
      ::close(fd);
      throw Error(ErrorCode::kTimeout, "connect to " + asp_.str() + " timed out");
    }
    int err = 0;
    socklen_t len = sizeof err;
    ::getsockopt(fd, SOL_SOCKET, SO_ERROR, &err, &len);
    errno = err;
    rc = err == 0 ? 0 : -1;
  }
  if (rc != 0) {
    const std::string why = std::strerror(errno);
    ::close(fd);
    throw Error(ErrorCode::kConnectionRefused, asp_.str() + ": " + why);
  }
  ::fcntl(fd, F_SETFL, ::fcntl(fd, F_GETFL) & ~O_NONBLOCK);
  const int one = 1;
  ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
  fd_ = fd;
  reader_ = std::make_unique<net::LineReader>(kMaxLineBytes);
}

std::string TcpAspLink::roundtrip_line(std::string_view line) {
  std::lock_guard lock(mu_);
  // One reconnect if a kept-alive connection turned out to be dead.
  for (int attempt = 0;; ++attempt) {
    const bool fresh = fd_ < 0;
    connect_locked();
    std::string out(line);
    out += '\n';
    if (tap_) tap_("out", line);
    if (!net::write_all(fd_, out)) {
      close_locked();
      if (!fresh && attempt == 0) continue;
      throw Error(ErrorCode::kAspUnreachable, "write to " + asp_.str() + " failed");
    }
    std::string reply;
    switch (reader_->next(fd_, reply, static_cast<int>(timeout_.count()))) {
      case net::ReadStatus::kLine:
        if (tap_) tap_("in", reply);
        return reply;
      case net::ReadStatus::kTimeout:
        close_locked();
        throw Error(ErrorCode::kTimeout, "no reply from " + asp_.str());
      case net::ReadStatus::kTooLong:
        close_locked();
        throw Error(ErrorCode::kProtocolError, "over-long reply from " + asp_.str());
      case net::ReadStatus::kClosed:
        close_locked();
        if (!fresh && attempt == 0) continue;
        throw Error(ErrorCode::kAspUnreachable, asp_.str() + " closed the connection");
    }
  }
}

WireEnvelope TcpAspLink::roundtrip(const WireEnvelope& request) {
  const std::string reply = roundtrip_line(request.encode());
  try {
    return WireEnvelope::decode(reply);
  } catch (const Error& e) {
    throw Error(ErrorCode::kProtocolError, std::string("bad reply: ") + e.what());
  }
}

Reply TcpAspLink::send(const Event& e) {
  const WireEnvelope reply = roundtrip(to_envelope(e));
  if (reply.kind == "error") {
    const std::string code = reply.body.value("code", "");
    throw Error(error_from_wire(code), reply.body.value("message", code));
  }
  if (reply.s_id != s_id_of(e)) {
    throw Error(ErrorCode::kProtocolError,
                "reply for '" + reply.s_id + "' to a request for '" + s_id_of(e) + "'");
  }
  if (reply.kind != "ack" && reply.kind != "audit_result") {
    throw Error(ErrorCode::kProtocolError, "unexpected reply kind '" + reply.kind + "'");
  }
  return {reply.kind, reply.s_id, reply.body};
}

}  // namespace zkmcp
