#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "zkmcp/algebra/bigint.hpp"

namespace zkmcp {

// Prime field in Montgomery form over a modulus below 2^255.
//
// Cfg supplies:
//   kModulus  - the prime p
//   kR2       - 2^512 mod p
//   kInv      - -p^{-1} mod 2^64
template <class Cfg>
class Fp {
 public:
  static constexpr U256 kModulus = Cfg::kModulus;

  constexpr Fp() = default;

  static constexpr Fp zero() { return Fp(); }
  static Fp one() {
    static const Fp kOne = from_u64(1);
    return kOne;
  }
  static Fp from_u64(uint64_t v) { return from_canonical_unchecked(U256(v)); }

  // Requires v < p.
  static std::optional<Fp> from_canonical(const U256& v) {
    if (!(v < kModulus)) return std::nullopt;
    return from_canonical_unchecked(v);
  }

  // Reduces an arbitrary 256-bit value mod p.
  static Fp from_u256_reduce(U256 v) {
    while (!(v < kModulus)) U256::sub(v, v, kModulus);
    return from_canonical_unchecked(v);
  }

  static std::optional<Fp> from_decimal(std::string_view s) {
    U256 v;
    if (!U256::parse_decimal(s, v)) return std::nullopt;
    return from_canonical(v);
  }

  U256 to_canonical() const {
    Fp t;
    mont_mul(t.v_, v_, U256(1));
    return t.v_;
  }
  std::string to_decimal() const { return to_canonical().to_decimal(); }

  const U256& montgomery_repr() const { return v_; }

  bool is_zero() const { return v_.is_zero(); }
  bool is_one() const { return *this == one(); }

  friend bool operator==(const Fp& a, const Fp& b) { return a.v_ == b.v_; }

  Fp operator+(const Fp& o) const {
    Fp r = *this;
    add_in_place(r.v_, o.v_);  // no overflow: p < 2^254
    if (!(r.v_ < kModulus)) sub_in_place(r.v_, kModulus);
    return r;
  }
  Fp operator-(const Fp& o) const {
    Fp r = *this;
    if (sub_in_place(r.v_, o.v_)) add_in_place(r.v_, kModulus);
    return r;
  }
  Fp operator-() const {
    if (is_zero()) return *this;
    Fp r;
    r.v_ = kModulus;
    sub_in_place(r.v_, v_);
    return r;
  }
  Fp operator*(const Fp& o) const {
    Fp r;
    mont_mul(r.v_, v_, o.v_);
    return r;
  }
  Fp& operator+=(const Fp& o) { return *this = *this + o; }
  Fp& operator-=(const Fp& o) { return *this = *this - o; }
  Fp& operator*=(const Fp& o) { return *this = *this * o; }

  Fp dbl() const { return *this + *this; }
  Fp square() const { return *this * *this; }

  Fp pow(const U256& e) const {
    Fp r = one();
    for (size_t i = e.num_bits(); i-- > 0;) {
      r = r.square();
      if (e.bit(i)) r *= *this;
    }
    return r;
  }

  // Inverse of zero is zero.
  Fp inverse() const {
    U256 e;
    U256::sub(e, kModulus, U256(2));
    return pow(e);
  }

  // Legendre-based square root via Tonelli-Shanks.
  std::optional<Fp> sqrt() const {
    if (is_zero()) return *this;
    U256 pm1;
    U256::sub(pm1, kModulus, U256(1));
    if (!pow(pm1.shr(1)).is_one()) return std::nullopt;
    size_t s = 0;
    U256 q = pm1;
    while (!q.bit(0)) {
      q = q.shr(1);
      ++s;
    }
    Fp z = from_u64(2);
    while (z.pow(pm1.shr(1)).is_one()) z += one();
    Fp c = z.pow(q);
    U256 q1;
    U256::add(q1, q, U256(1));
    Fp x = pow(q1.shr(1));
    Fp t = pow(q);
    size_t m = s;
    while (!t.is_one()) {
      size_t i = 0;
      Fp tt = t;
      while (!tt.is_one()) {
        tt = tt.square();
        ++i;
      }
      Fp b = c;
      for (size_t k = 0; k + i + 1 < m; ++k) b = b.square();
      x *= b;
      c = b.square();
      t *= c;
      m = i;
    }
    return x;
  }

 private:
  static Fp from_canonical_unchecked(const U256& v) {
    Fp r;
    mont_mul(r.v_, v, Cfg::kR2);
    return r;
  }

  // CIOS Montgomery multiplication; inputs < p, output < p. Both BN254
  // moduli leave the top bit of the last limb clear, which bounds the
  // intermediate value by 2p and removes the extra carry words.
  static void mont_mul(U256& out, const U256& a, const U256& b) {
    static_assert(Cfg::kModulus.limb[3] < (uint64_t{1} << 62));
    const auto& p = kModulus.limb;
    uint64_t t[4] = {0, 0, 0, 0};
    for (int i = 0; i < 4; ++i) {
      const uint64_t bi = b.limb[i];
      u128 acc = static_cast<u128>(a.limb[0]) * bi + t[0];
      uint64_t carry_a = static_cast<uint64_t>(acc >> 64);
      const uint64_t lo = static_cast<uint64_t>(acc);
      const uint64_t m = lo * Cfg::kInv;
      u128 red = static_cast<u128>(m) * p[0] + lo;
      uint64_t carry_m = static_cast<uint64_t>(red >> 64);
      for (int j = 1; j < 4; ++j) {
        acc = static_cast<u128>(a.limb[j]) * bi + t[j] + carry_a;
        carry_a = static_cast<uint64_t>(acc >> 64);
        red = static_cast<u128>(m) * p[j] + static_cast<uint64_t>(acc) + carry_m;
        carry_m = static_cast<uint64_t>(red >> 64);
        t[j - 1] = static_cast<uint64_t>(red);
      }
      t[3] = carry_a + carry_m;
    }
    U256 r(t[0], t[1], t[2], t[3]);
    if (!(r < kModulus)) sub_in_place(r, kModulus);
    out = r;
  }

  static void add_in_place(U256& r, const U256& b) {
    u128 c = 0;
    for (int i = 0; i < 4; ++i) {
      c += static_cast<u128>(r.limb[i]) + b.limb[i];
      r.limb[i] = static_cast<uint64_t>(c);
      c >>= 64;
    }
  }
  // Returns the borrow.
  static bool sub_in_place(U256& r, const U256& b) {
    uint64_t borrow = 0;
    for (int i = 0; i < 4; ++i) {
      const u128 d = static_cast<u128>(r.limb[i]) - b.limb[i] - borrow;
      r.limb[i] = static_cast<uint64_t>(d);
      borrow = static_cast<uint64_t>(d >> 64) & 1;
    }
    return borrow != 0;
  }

  U256 v_;
};

}  // namespace zkmcp
