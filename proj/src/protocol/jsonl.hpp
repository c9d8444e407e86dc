#pragma once

#include <fcntl.h>
#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "zkmcp/errors.hpp"

namespace zkmcp::jsonl {

// Calls f on each parsed line; a missing file reads as empty.
template <class F>
void for_each_line(const std::filesystem::path& path, F&& f) {
  if (!std::filesystem::exists(path)) return;
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoFailure, "cannot read " + path.string());
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      f(nlohmann::json::parse(line));
    } catch (const std::exception& e) {
      throw Error(ErrorCode::kIoFailure,
                  path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
}

// One write(2) per line with O_APPEND, so concurrent appenders never
// interleave within a line.
inline void append_line(const std::filesystem::path& path, const nlohmann::json& j) {
  const std::string line = j.dump() + "\n";
  const int fd = ::open(path.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
  if (fd < 0) throw Error(ErrorCode::kIoFailure, "cannot open " + path.string());
  const ssize_t n = ::write(fd, line.data(), line.size());
  ::close(fd);
  if (n != static_cast<ssize_t>(line.size())) {
    throw Error(ErrorCode::kIoFailure, "short write to " + path.string());
  }
}

}  // namespace zkmcp::jsonl
