#include <fstream>

#include "zkmcp/bench.hpp"
#include "zkmcp/errors.hpp"

namespace zkmcp {

std::vector<std::string> reference_wire_trace() {
  CircuitParams params;
  params.n = 2;
  const auto crs = std::make_shared<const CrsBundle>(
      setup(params, TypeTable::defaults(), Backend::kInsecureOracle));
  AspOptions opts;
  opts.allow_insecure = true;
  opts.clock = [] { return kFixtureClockMs; };
  Asp asp(crs, opts);

  const std::string s_id = "agent-a|agent-b|1700000000000|00000000000000aa";
  const std::vector<AuditMessage> msgs = {AuditMessage::from_type("request"),
                                          AuditMessage::from_type("response")};
  const auto [w, x] = synthesize_witness(*crs->circuit, msgs);
  const AuditRequest audit{s_id, "agent-a", prove(*crs, x, w, s_id), 0};
  AuditRequest short_audit = audit;
  short_audit.proof.statement.hashes.pop_back();

  std::vector<std::string> requests = {
      to_envelope(SessionStart{s_id, "agent-a", "agent-b", "agent-a"}).encode(),
      to_envelope(audit).encode(),
      to_envelope(SessionClose{s_id, "agent-a", 2}).encode(),
      to_envelope(audit).encode(),  // replay of a decided audit
      to_envelope(short_audit).encode(),
      to_envelope(SessionClose{"agent-c|agent-d|1700000000000|00000000000000bb", "agent-c", 2})
          .encode(),
      "{",
  };
  WireEnvelope old_version = to_envelope(SessionStart{s_id, "agent-a", "agent-b", "agent-a"});
  old_version.protocol_version = "zkmcp/0";
  requests.push_back(old_version.encode());

  std::vector<std::string> lines;
  for (const auto& req : requests) {
    lines.push_back(req);
    lines.push_back(handle_wire_line(asp, req));
  }
  return lines;
}

std::filesystem::path write_fixtures(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  const auto path = dir / "wire_trace.ndjson";
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  for (const auto& line : reference_wire_trace()) out << line << '\n';
  out.close();
  if (!out) throw Error(ErrorCode::kIoFailure, "cannot write " + path.string());
  return path;
}

}  // namespace zkmcp
