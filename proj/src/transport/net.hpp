#pragma once

#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <optional>
#include <string>
#include <string_view>

#include "zkmcp/errors.hpp"

namespace zkmcp::net {

enum class ReadStatus { kLine, kClosed, kTimeout, kTooLong };

// Splits a byte stream into '\n'-terminated lines. An over-long line is
// reported once as kTooLong and its remaining bytes are skipped.
class LineReader {
 public:
  explicit LineReader(size_t max_bytes) : max_(max_bytes) {}

  // A negative timeout waits forever.
  ReadStatus next(int fd, std::string& line, int timeout_ms) {
    while (true) {
      const auto nl = buf_.find('\n');
      if (skipping_) {
        if (nl != std::string::npos) {
          buf_.erase(0, nl + 1);
          skipping_ = false;
          continue;
        }
        buf_.clear();
      } else if (nl != std::string::npos) {
        if (nl > max_) {
          buf_.erase(0, nl + 1);
          return ReadStatus::kTooLong;
        }
        line.assign(buf_, 0, nl);
        buf_.erase(0, nl + 1);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return ReadStatus::kLine;
      } else if (buf_.size() > max_) {
        buf_.clear();
        skipping_ = true;
        return ReadStatus::kTooLong;
      }
      pollfd p{fd, POLLIN, 0};
      const int r = ::poll(&p, 1, timeout_ms);
      if (r == 0) return ReadStatus::kTimeout;
      if (r < 0) {
        if (errno == EINTR) continue;
        return ReadStatus::kClosed;
      }
      char chunk[65536];
      const ssize_t n = ::recv(fd, chunk, sizeof chunk, 0);
      if (n < 0 && errno == EINTR) continue;
      if (n <= 0) return ReadStatus::kClosed;
      buf_.append(chunk, static_cast<size_t>(n));
    }
  }

  void reset() {
    buf_.clear();
    skipping_ = false;
  }

 private:
  size_t max_;
  std::string buf_;
  bool skipping_ = false;
};

inline bool write_all(int fd, std::string_view data) {
  while (!data.empty()) {
    const ssize_t n = ::send(fd, data.data(), data.size(), MSG_NOSIGNAL);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) return false;
    data.remove_prefix(static_cast<size_t>(n));
  }
  return true;
}

}  // namespace zkmcp::net
