#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace zkmcp {

// Canonical envelope: {"type": "<type>"}
inline constexpr std::string_view kEnvelopePrefix = "{\"type\": \"";
inline constexpr std::string_view kEnvelopeSuffix = "\"}";
inline constexpr size_t kEnvelopeOverhead = 12;

struct CircuitParams {
  size_t n = 1;
  size_t max_json = 64;
  size_t max_type = 20;
  size_t num_types = 8;

  // Throws InvalidParams.
  void validate() const;
};

// Printable ASCII except '"' and '}'.
bool is_legal_type_byte(uint8_t c);

class TypeTable {
 public:
  // Throws InvalidTypeTable on empty, over-long, illegal or repeated entries.
  explicit TypeTable(std::vector<std::string> entries, size_t max_type = 20);

  static TypeTable defaults();
  // {"types": [...]} with exactly `expected` entries.
  static TypeTable from_json(std::string_view text, size_t expected = 8);
  static TypeTable load(const std::filesystem::path& path, size_t expected = 8);
  std::string to_json() const;

  size_t size() const { return entries_.size(); }
  const std::string& operator[](size_t j) const { return entries_[j]; }
  const std::vector<std::string>& entries() const { return entries_; }
  std::optional<size_t> index_of(std::string_view type) const;

  friend bool operator==(const TypeTable&, const TypeTable&) = default;

 private:
  std::vector<std::string> entries_;
};

struct AuditMessage {
  std::string raw;
  std::string type_string;
  size_t total_len = 0;
  size_t type_len = 0;
  int64_t timestamp_ms = 0;

  static AuditMessage from_type(std::string_view type, int64_t timestamp_ms = 0);
  // Parses and checks a canonical envelope.
  static AuditMessage from_raw(std::string_view raw, int64_t timestamp_ms = 0);
};

std::string canonicalize(std::string_view type_string, size_t max_type = 20);
std::string extract_type(std::string_view raw, size_t max_json = 64);
std::vector<uint8_t> pad_message(std::string_view raw, size_t length = 64);

// Plaintext per-type counts in table order. Throws UnknownType.
std::vector<uint64_t> count_types(std::span<const AuditMessage> messages,
                                  const TypeTable& table);

}  // namespace zkmcp
