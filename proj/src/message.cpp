#include "zkmcp/message.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "zkmcp/errors.hpp"

namespace zkmcp {

namespace {

// Poseidon arity caps packed limbs at 3, i.e. 93 bytes.
constexpr size_t kMaxJsonLimit = 93;

void check_type_string(std::string_view t, size_t max_type) {
  if (t.empty()) throw Error(ErrorCode::kTypeTooLong, "empty type string");
  if (t.size() > max_type) {
    throw Error(ErrorCode::kTypeTooLong,
                "type of " + std::to_string(t.size()) + " bytes exceeds " +
                    std::to_string(max_type));
  }
  for (char c : t) {
    if (!is_legal_type_byte(static_cast<uint8_t>(c))) {
      char buf[16];
      std::snprintf(buf, sizeof buf, "byte 0x%02x", static_cast<uint8_t>(c));
      throw Error(ErrorCode::kIllegalByte, std::string(buf) + " in type");
    }
  }
}

}  // namespace

void CircuitParams::validate() const {
  if (n < 1) throw Error(ErrorCode::kInvalidParams, "n must be at least 1");
  if (max_type < 1) throw Error(ErrorCode::kInvalidParams, "max_type must be positive");
  if (num_types < 1) throw Error(ErrorCode::kInvalidParams, "num_types must be positive");
  if (kEnvelopeOverhead + max_type > max_json) {
    throw Error(ErrorCode::kInvalidParams, "12 + max_type exceeds max_json");
  }
  if (max_json > kMaxJsonLimit) {
    throw Error(ErrorCode::kInvalidParams, "max_json above 93 bytes is unsupported");
  }
}

bool is_legal_type_byte(uint8_t c) {
  return c >= 0x20 && c <= 0x7e && c != '"' && c != '}';
}

TypeTable::TypeTable(std::vector<std::string> entries, size_t max_type)
    : entries_(std::move(entries)) {
  std::set<std::string_view> seen;
  for (const auto& e : entries_) {
    try {
      check_type_string(e, max_type);
    } catch (const Error& err) {
      throw Error(ErrorCode::kInvalidTypeTable, err.what());
    }
    if (!seen.insert(e).second) {
      throw Error(ErrorCode::kInvalidTypeTable, "duplicate entry '" + e + "'");
    }
  }
}

TypeTable TypeTable::defaults() {
  return TypeTable({"request", "response", "notification", "error", "ping",
                    "progress", "cancelled", "result"});
}

TypeTable TypeTable::from_json(std::string_view text, size_t expected) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidTypeTable, e.what());
  }
  if (!doc.is_object() || !doc.contains("types") || !doc["types"].is_array()) {
    throw Error(ErrorCode::kInvalidTypeTable, "expected {\"types\": [...]}");
  }
  std::vector<std::string> entries;
  for (const auto& v : doc["types"]) {
    if (!v.is_string()) throw Error(ErrorCode::kInvalidTypeTable, "non-string entry");
    entries.push_back(v.get<std::string>());
  }
  if (entries.size() != expected) {
    throw Error(ErrorCode::kInvalidTypeTable,
                "expected " + std::to_string(expected) + " types, got " +
                    std::to_string(entries.size()));
  }
  return TypeTable(std::move(entries));
}

TypeTable TypeTable::load(const std::filesystem::path& path, size_t expected) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoFailure, "cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str(), expected);
}

std::string TypeTable::to_json() const {
  return nlohmann::json{{"types", entries_}}.dump();
}

std::optional<size_t> TypeTable::index_of(std::string_view type) const {
  for (size_t j = 0; j < entries_.size(); ++j) {
    if (entries_[j] == type) return j;
  }
  return std::nullopt;
}

AuditMessage AuditMessage::from_type(std::string_view type, int64_t timestamp_ms) {
  AuditMessage m;
  m.raw = canonicalize(type);
  m.type_string = std::string(type);
  m.type_len = type.size();
  m.total_len = m.raw.size();
  m.timestamp_ms = timestamp_ms;
  return m;
}

AuditMessage AuditMessage::from_raw(std::string_view raw, int64_t timestamp_ms) {
  AuditMessage m;
  m.type_string = extract_type(raw);
  m.raw = std::string(raw);
  m.type_len = m.type_string.size();
  m.total_len = raw.size();
  m.timestamp_ms = timestamp_ms;
  return m;
}

std::string canonicalize(std::string_view type_string, size_t max_type) {
  check_type_string(type_string, max_type);
  std::string out;
  out.reserve(type_string.size() + kEnvelopeOverhead);
  out.append(kEnvelopePrefix);
  out.append(type_string);
  out.append(kEnvelopeSuffix);
  return out;
}

std::string extract_type(std::string_view raw, size_t max_json) {
  if (raw.size() > max_json) {
    throw Error(ErrorCode::kMalformedEnvelope,
                "envelope of " + std::to_string(raw.size()) + " bytes");
  }
  if (raw.size() <= kEnvelopeOverhead || !raw.starts_with(kEnvelopePrefix) ||
      !raw.ends_with(kEnvelopeSuffix)) {
    throw Error(ErrorCode::kMalformedEnvelope, "not a canonical envelope");
  }
  const std::string_view inner =
      raw.substr(kEnvelopePrefix.size(), raw.size() - kEnvelopeOverhead);
  for (char c : inner) {
    if (!is_legal_type_byte(static_cast<uint8_t>(c))) {
      throw Error(ErrorCode::kMalformedEnvelope, "illegal byte inside type");
    }
  }
  if (inner.size() > max_json - kEnvelopeOverhead) {
    throw Error(ErrorCode::kMalformedEnvelope, "type too long");
  }
  return std::string(inner);
}

std::vector<uint8_t> pad_message(std::string_view raw, size_t length) {
  if (raw.size() > length) {
    throw Error(ErrorCode::kTooLong, std::to_string(raw.size()) + " bytes exceeds " +
                                         std::to_string(length));
  }
  std::vector<uint8_t> out(length, 0);
  std::copy(raw.begin(), raw.end(), out.begin());
  return out;
}

std::vector<uint64_t> count_types(std::span<const AuditMessage> messages,
                                  const TypeTable& table) {
  std::vector<uint64_t> counts(table.size(), 0);
  for (const auto& m : messages) {
    const auto j = table.index_of(m.type_string);
    if (!j) throw Error(ErrorCode::kUnknownType, "'" + m.type_string + "'");
    ++counts[*j];
  }
  return counts;
}

}  // namespace zkmcp
