#include <charconv>

#include "zkmcp/transport.hpp"

namespace zkmcp {

using nlohmann::json;

namespace {

constexpr std::string_view kKinds[] = {"session_start", "audit_request", "session_close",
                                       "ack",           "audit_result",  "error"};

std::optional<EventKind> event_kind(std::string_view kind) {
  for (EventKind e : kAllEvents) {
    if (event_name(e) == kind) return e;
  }
  return std::nullopt;
}

}  // namespace

std::string WireEnvelope::encode() const {
  const json j = {{"protocol_version", protocol_version}, {"kind", kind}, {"s_id", s_id},
                  {"body", body}};
  std::string out;
  try {
    out = j.dump();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kDecode, std::string("envelope is not valid UTF-8: ") + e.what());
  }
  if (out.size() > kMaxLineBytes) {
    throw Error(ErrorCode::kDecode, "envelope exceeds " + std::to_string(kMaxLineBytes) + " bytes");
  }
  return out;
}

WireEnvelope WireEnvelope::decode(std::string_view line) {
  if (line.size() > kMaxLineBytes) {
    throw Error(ErrorCode::kDecode, "line exceeds " + std::to_string(kMaxLineBytes) + " bytes");
  }
  json j;
  try {
    j = json::parse(line);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kDecode, e.what());
  }
  if (!j.is_object()) throw Error(ErrorCode::kDecode, "envelope is not an object");
  auto field = [&](const char* name) -> std::string {
    auto it = j.find(name);
    if (it == j.end() || !it->is_string()) {
      throw Error(ErrorCode::kDecode, std::string("missing string field '") + name + "'");
    }
    return it->get<std::string>();
  };
  WireEnvelope w;
  w.protocol_version = field("protocol_version");
  w.s_id = j.contains("s_id") && j["s_id"].is_string() ? j["s_id"].get<std::string>() : "";
  if (w.protocol_version != kProtocolVersion) {
    throw Error(ErrorCode::kVersion, "unsupported protocol version '" + w.protocol_version + "'");
  }
  w.kind = field("kind");
  w.s_id = field("s_id");
  if (std::find(std::begin(kKinds), std::end(kKinds), w.kind) == std::end(kKinds)) {
    throw Error(ErrorCode::kDecode, "unknown kind '" + w.kind + "'");
  }
  auto body = j.find("body");
  if (body == j.end() || !body->is_object()) {
    throw Error(ErrorCode::kDecode, "missing object field 'body'");
  }
  w.body = *body;
  return w;
}

WireEnvelope to_envelope(const Event& e) {
  WireEnvelope w;
  w.kind = std::string(event_name(kind_of(e)));
  w.s_id = s_id_of(e);
  w.body = event_body(e);
  return w;
}

Event event_from_envelope(const WireEnvelope& w) {
  const auto kind = event_kind(w.kind);
  if (!kind) throw Error(ErrorCode::kDecode, "'" + w.kind + "' is not a request kind");
  return event_from_body(*kind, w.s_id, w.body);
}

WireEnvelope to_envelope(const Reply& r) {
  WireEnvelope w;
  w.kind = r.kind;
  w.s_id = r.s_id;
  w.body = r.body;
  return w;
}

WireEnvelope error_envelope(const std::string& s_id, ErrorCode code, const std::string& message) {
  WireEnvelope w;
  w.kind = "error";
  w.s_id = s_id;
  w.body = {{"code", wire_error_code(code)}, {"message", message}};
  return w;
}

std::string wire_error_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDecode: return "decode";
    case ErrorCode::kVersion: return "version";
    case ErrorCode::kShapeMismatch: return "shape";
    case ErrorCode::kIllegalTransition: return "illegal_transition";
    case ErrorCode::kUnknownSession: return "unknown_session";
    default: break;
  }
  // CamelCase name to snake_case.
  std::string out;
  for (char c : error_code_name(code)) {
    if (std::isupper(static_cast<unsigned char>(c))) {
      if (!out.empty()) out += '_';
      out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    } else {
      out += c;
    }
  }
  return out;
}

ErrorCode error_from_wire(std::string_view code) {
  for (int i = 0; i <= static_cast<int>(ErrorCode::kOutOfBudget); ++i) {
    const auto c = static_cast<ErrorCode>(i);
    if (wire_error_code(c) == code) return c;
  }
  return ErrorCode::kProtocolError;
}

Endpoint Endpoint::parse(std::string_view s) {
  const auto colon = s.rfind(':');
  if (colon == std::string_view::npos || colon == 0) {
    throw Error(ErrorCode::kInvalidParams, "expected HOST:PORT, got '" + std::string(s) + "'");
  }
  unsigned port = 0;
  const auto digits = s.substr(colon + 1);
  const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), port);
  if (ec != std::errc() || ptr != digits.data() + digits.size() || port > 65535) {
    throw Error(ErrorCode::kInvalidParams, "bad port in '" + std::string(s) + "'");
  }
  return {std::string(s.substr(0, colon)), static_cast<uint16_t>(port)};
}

}  // namespace zkmcp
