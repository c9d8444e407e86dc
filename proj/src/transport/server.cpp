#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>

#include "net.hpp"
#include "zkmcp/transport.hpp"

namespace zkmcp {

AspServer::AspServer(Asp& asp, ServerOptions opts) : asp_(asp), opts_(std::move(opts)) {
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  hints.ai_flags = AI_PASSIVE;
  addrinfo* res = nullptr;
  const std::string port = std::to_string(opts_.listen.port);
  if (::getaddrinfo(opts_.listen.host.c_str(), port.c_str(), &hints, &res) != 0 || !res) {
    throw Error(ErrorCode::kBindFailure, "cannot resolve " + opts_.listen.str());
  }
  listen_fd_ = ::socket(res->ai_family, res->ai_socktype | SOCK_CLOEXEC, res->ai_protocol);
  const int one = 1;
  ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  const bool ok = listen_fd_ >= 0 && ::bind(listen_fd_, res->ai_addr, res->ai_addrlen) == 0 &&
                  ::listen(listen_fd_, 128) == 0;
  ::freeaddrinfo(res);
  if (!ok) {
    const std::string why = std::strerror(errno);
    if (listen_fd_ >= 0) ::close(listen_fd_);
    throw Error(ErrorCode::kBindFailure, opts_.listen.str() + ": " + why);
  }
  sockaddr_in addr{};
  socklen_t len = sizeof addr;
  ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
}

AspServer::~AspServer() {
  stop();
  if (listen_fd_ >= 0) ::close(listen_fd_);
}

void AspServer::start() {
  accept_thread_ = std::thread([this] { accept_loop(); });
}

void AspServer::stop() {
  if (stopping_.exchange(true)) return;
  if (accept_thread_.joinable()) accept_thread_.join();
  std::unique_lock lock(conn_mu_);
  for (int fd : conns_) ::shutdown(fd, SHUT_RDWR);
  conn_cv_.wait(lock, [&] { return active_ == 0; });
}

void AspServer::log(const std::string& msg) const {
  if (opts_.log) opts_.log(msg);
}

void AspServer::accept_loop() {
  while (!stopping_) {
    pollfd p{listen_fd_, POLLIN, 0};
    if (::poll(&p, 1, 100) <= 0) continue;
    const int fd = ::accept4(listen_fd_, nullptr, nullptr, SOCK_CLOEXEC);
    if (fd < 0) continue;
    const int one = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
    std::unique_lock lock(conn_mu_);
    conn_cv_.wait(lock, [&] { return active_ < opts_.max_workers || stopping_; });
    if (stopping_) {
      ::close(fd);
      break;
    }
    ++active_;
    conns_.insert(fd);
    std::thread([this, fd] { serve(fd); }).detach();
  }
}

std::string handle_wire_line(Asp& asp, std::string_view line,
                             const std::function<void(const std::string&)>& log) {
  WireEnvelope reply;
  std::string s_id;
  try {
    const WireEnvelope req = WireEnvelope::decode(line);
    s_id = req.s_id;
    reply = to_envelope(asp.handle(event_from_envelope(req)));
  } catch (const Error& e) {
    if (log && (e.code() == ErrorCode::kDecode || e.code() == ErrorCode::kVersion)) {
      log("rejected line: " + std::string(e.what()));
    }
    reply = error_envelope(s_id, e.code(), e.what());
  } catch (const std::exception& e) {
    if (log) log(std::string("handler failure: ") + e.what());
    reply = error_envelope(s_id, ErrorCode::kProtocolError, e.what());
  }
  return reply.encode();
}

std::string AspServer::handle_line(std::string_view line) {
  return handle_wire_line(asp_, line, opts_.log);
}

void AspServer::serve(int fd) {
  net::LineReader reader(kMaxLineBytes);
  std::string line;
  while (!stopping_) {
    const auto status = reader.next(fd, line, 200);
    if (status == net::ReadStatus::kTimeout) continue;
    if (status == net::ReadStatus::kClosed) break;
    std::string out;
    if (status == net::ReadStatus::kTooLong) {
      log("rejected over-long line");
      out = error_envelope("", ErrorCode::kDecode, "line exceeds 1 MiB").encode();
    } else {
      if (opts_.tap) opts_.tap("in", line);
      out = handle_line(line);
    }
    if (opts_.tap) opts_.tap("out", out);
    out += '\n';
    if (!net::write_all(fd, out)) break;
  }
  ::close(fd);
  std::lock_guard lock(conn_mu_);
  conns_.erase(fd);
  --active_;
  conn_cv_.notify_all();
}

}  // namespace zkmcp
