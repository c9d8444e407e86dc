#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace zkmcp {

using u128 = unsigned __int128;

// 256-bit unsigned integer, little-endian 64-bit limbs.
struct U256 {
  std::array<uint64_t, 4> limb{};

  constexpr U256() = default;
  constexpr explicit U256(uint64_t v) : limb{v, 0, 0, 0} {}
  constexpr U256(uint64_t l0, uint64_t l1, uint64_t l2, uint64_t l3)
      : limb{l0, l1, l2, l3} {}

  constexpr bool is_zero() const {
    return (limb[0] | limb[1] | limb[2] | limb[3]) == 0;
  }
  constexpr bool bit(size_t i) const {
    return i < 256 && ((limb[i / 64] >> (i % 64)) & 1) != 0;
  }
  size_t num_bits() const;

  // Extracts `width` (<= 64) bits starting at bit `pos`.
  uint64_t bits(size_t pos, size_t width) const;

  friend constexpr bool operator==(const U256&, const U256&) = default;
  friend constexpr std::strong_ordering operator<=>(const U256& a,
                                                    const U256& b) {
    for (int i = 3; i >= 0; --i) {
      if (a.limb[i] != b.limb[i]) return a.limb[i] <=> b.limb[i];
    }
    return std::strong_ordering::equal;
  }

  // Returns the carry/borrow out.
  static uint64_t add(U256& out, const U256& a, const U256& b);
  static uint64_t sub(U256& out, const U256& a, const U256& b);

  U256 shr(size_t n) const;
  U256 shl(size_t n) const;

  // Decimal parsing rejects empty strings, signs, and values >= 2^256.
  static bool parse_decimal(std::string_view s, U256& out);
  static bool parse_hex(std::string_view s, U256& out);
  std::string to_decimal() const;
  std::string to_hex() const;

  static U256 from_be_bytes(std::span<const uint8_t, 32> in);
  void to_be_bytes(std::span<uint8_t, 32> out) const;
};

}  // namespace zkmcp
