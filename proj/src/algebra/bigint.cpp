#include "zkmcp/algebra/bigint.hpp"

#include <algorithm>

namespace zkmcp {

size_t U256::num_bits() const {
  for (int i = 3; i >= 0; --i) {
    if (limb[i] != 0) return 64 * i + (64 - __builtin_clzll(limb[i]));
  }
  return 0;
}

uint64_t U256::bits(size_t pos, size_t width) const {
  if (pos >= 256 || width == 0) return 0;
  const size_t idx = pos / 64;
  const size_t off = pos % 64;
  uint64_t v = limb[idx] >> off;
  if (off != 0 && idx + 1 < 4) v |= limb[idx + 1] << (64 - off);
  if (width < 64) v &= (uint64_t{1} << width) - 1;
  return v;
}

uint64_t U256::add(U256& out, const U256& a, const U256& b) {
  u128 c = 0;
  for (int i = 0; i < 4; ++i) {
    c += static_cast<u128>(a.limb[i]) + b.limb[i];
    out.limb[i] = static_cast<uint64_t>(c);
    c >>= 64;
  }
  return static_cast<uint64_t>(c);
}

uint64_t U256::sub(U256& out, const U256& a, const U256& b) {
  uint64_t borrow = 0;
  for (int i = 0; i < 4; ++i) {
    const u128 d = static_cast<u128>(a.limb[i]) - b.limb[i] - borrow;
    out.limb[i] = static_cast<uint64_t>(d);
    borrow = static_cast<uint64_t>(d >> 64) & 1;
  }
  return borrow;
}

U256 U256::shr(size_t n) const {
  U256 r;
  if (n >= 256) return r;
  const size_t w = n / 64, b = n % 64;
  for (size_t i = 0; i + w < 4; ++i) {
    uint64_t v = limb[i + w] >> b;
    if (b != 0 && i + w + 1 < 4) v |= limb[i + w + 1] << (64 - b);
    r.limb[i] = v;
  }
  return r;
}

U256 U256::shl(size_t n) const {
  U256 r;
  if (n >= 256) return r;
  const size_t w = n / 64, b = n % 64;
  for (size_t i = w; i < 4; ++i) {
    uint64_t v = limb[i - w] << b;
    if (b != 0 && i > w) v |= limb[i - w - 1] >> (64 - b);
    r.limb[i] = v;
  }
  return r;
}

namespace {

// out = a * m + add; returns overflow limb.
uint64_t mul_small_add(U256& a, uint64_t m, uint64_t add) {
  u128 c = add;
  for (int i = 0; i < 4; ++i) {
    c += static_cast<u128>(a.limb[i]) * m;
    a.limb[i] = static_cast<uint64_t>(c);
    c >>= 64;
  }
  return static_cast<uint64_t>(c);
}

int hex_digit(char ch) {
  if (ch >= '0' && ch <= '9') return ch - '0';
  if (ch >= 'a' && ch <= 'f') return ch - 'a' + 10;
  if (ch >= 'A' && ch <= 'F') return ch - 'A' + 10;
  return -1;
}

}  // namespace

bool U256::parse_decimal(std::string_view s, U256& out) {
  if (s.empty() || s.size() > 78) return false;
  U256 acc;
  for (char ch : s) {
    if (ch < '0' || ch > '9') return false;
    if (mul_small_add(acc, 10, static_cast<uint64_t>(ch - '0')) != 0) {
      return false;
    }
  }
  out = acc;
  return true;
}

bool U256::parse_hex(std::string_view s, U256& out) {
  if (s.starts_with("0x") || s.starts_with("0X")) s.remove_prefix(2);
  if (s.empty() || s.size() > 64) return false;
  U256 acc;
  for (char ch : s) {
    const int d = hex_digit(ch);
    if (d < 0) return false;
    acc = acc.shl(4);
    acc.limb[0] |= static_cast<uint64_t>(d);
  }
  out = acc;
  return true;
}

std::string U256::to_decimal() const {
  if (is_zero()) return "0";
  U256 v = *this;
  std::string digits;
  constexpr uint64_t kChunk = 10000000000000000000ULL;  // 10^19
  while (!v.is_zero()) {
    u128 rem = 0;
    for (int i = 3; i >= 0; --i) {
      const u128 cur = (rem << 64) | v.limb[i];
      v.limb[i] = static_cast<uint64_t>(cur / kChunk);
      rem = cur % kChunk;
    }
    uint64_t r = static_cast<uint64_t>(rem);
    for (int k = 0; k < 19; ++k) {
      digits.push_back(static_cast<char>('0' + r % 10));
      r /= 10;
    }
  }
  while (digits.size() > 1 && digits.back() == '0') digits.pop_back();
  std::reverse(digits.begin(), digits.end());
  return digits;
}

std::string U256::to_hex() const {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string s;
  bool leading = true;
  for (int i = 63; i >= 0; --i) {
    const uint64_t nib = (limb[i / 16] >> (4 * (i % 16))) & 0xf;
    if (leading && nib == 0 && i != 0) continue;
    leading = false;
    s.push_back(kDigits[nib]);
  }
  return "0x" + s;
}

U256 U256::from_be_bytes(std::span<const uint8_t, 32> in) {
  U256 r;
  for (size_t i = 0; i < 32; ++i) {
    r.limb[3 - i / 8] |= static_cast<uint64_t>(in[i]) << (8 * (7 - i % 8));
  }
  return r;
}

void U256::to_be_bytes(std::span<uint8_t, 32> out) const {
  for (size_t i = 0; i < 32; ++i) {
    out[i] = static_cast<uint8_t>(limb[3 - i / 8] >> (8 * (7 - i % 8)));
  }
}

}  // namespace zkmcp
