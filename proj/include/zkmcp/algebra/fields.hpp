#pragma once

// BN254 (alt_bn128) base field Fq, scalar field Fr, and the
// Fq2 -> Fq6 -> Fq12 extension tower used by the pairing.

#include <cstddef>

#include "zkmcp/algebra/fp.hpp"

namespace zkmcp {

struct FqConfig {
  static constexpr U256 kModulus{0x3c208c16d87cfd47ULL, 0x97816a916871ca8dULL,
                                 0xb85045b68181585dULL, 0x30644e72e131a029ULL};
  static constexpr U256 kR2{0xf32cfc5b538afa89ULL, 0xb5e71911d44501fbULL,
                            0x47ab1eff0a417ff6ULL, 0x06d89f71cab8351fULL};
  static constexpr uint64_t kInv = 0x87d20782e4866389ULL;
};

struct FrConfig {
  static constexpr U256 kModulus{0x43e1f593f0000001ULL, 0x2833e84879b97091ULL,
                                 0xb85045b68181585dULL, 0x30644e72e131a029ULL};
  static constexpr U256 kR2{0x1bb8e645ae216da7ULL, 0x53fe3ab1e35c59e3ULL,
                            0x8c49833d53bb8085ULL, 0x0216d0b17f4e44a5ULL};
  static constexpr uint64_t kInv = 0xc2e1f593efffffffULL;
};

using Fq = Fp<FqConfig>;
using Fr = Fp<FrConfig>;

inline constexpr size_t kFrTwoAdicity = 28;
inline constexpr uint64_t kFrMultiplicativeGenerator = 5;

// Primitive 2^log_n-th root of unity in Fr; log_n <= kFrTwoAdicity.
Fr fr_root_of_unity(size_t log_n);

// Fq2 = Fq[u] / (u^2 + 1)
class Fq2 {
 public:
  Fq c0, c1;

  Fq2() = default;
  Fq2(const Fq& a, const Fq& b) : c0(a), c1(b) {}

  static Fq2 zero() { return {}; }
  static Fq2 one() { return {Fq::one(), Fq::zero()}; }

  bool is_zero() const { return c0.is_zero() && c1.is_zero(); }
  friend bool operator==(const Fq2& a, const Fq2& b) {
    return a.c0 == b.c0 && a.c1 == b.c1;
  }

  Fq2 operator+(const Fq2& o) const { return {c0 + o.c0, c1 + o.c1}; }
  Fq2 operator-(const Fq2& o) const { return {c0 - o.c0, c1 - o.c1}; }
  Fq2 operator-() const { return {-c0, -c1}; }
  Fq2 operator*(const Fq2& o) const {
    const Fq aa = c0 * o.c0;
    const Fq bb = c1 * o.c1;
    return {aa - bb, (c0 + c1) * (o.c0 + o.c1) - aa - bb};
  }
  Fq2 operator*(const Fq& s) const { return {c0 * s, c1 * s}; }
  Fq2& operator+=(const Fq2& o) { return *this = *this + o; }
  Fq2& operator-=(const Fq2& o) { return *this = *this - o; }
  Fq2& operator*=(const Fq2& o) { return *this = *this * o; }

  Fq2 dbl() const { return {c0.dbl(), c1.dbl()}; }
  Fq2 square() const {
    const Fq ab = c0 * c1;
    return {(c0 + c1) * (c0 - c1), ab.dbl()};
  }
  Fq2 conjugate() const { return {c0, -c1}; }
  Fq2 inverse() const {
    const Fq t = (c0.square() + c1.square()).inverse();
    return {c0 * t, -(c1 * t)};
  }
  // Multiplication by the non-residue xi = 9 + u.
  Fq2 mul_by_xi() const {
    const Fq nine_c0 = c0.dbl().dbl().dbl() + c0;
    const Fq nine_c1 = c1.dbl().dbl().dbl() + c1;
    return {nine_c0 - c1, c0 + nine_c1};
  }
  Fq2 frobenius() const { return conjugate(); }
  Fq2 pow(const U256& e) const;
};

// Fq6 = Fq2[v] / (v^3 - xi)
class Fq6 {
 public:
  Fq2 c0, c1, c2;

  Fq6() = default;
  Fq6(const Fq2& a, const Fq2& b, const Fq2& c) : c0(a), c1(b), c2(c) {}

  static Fq6 zero() { return {}; }
  static Fq6 one() { return {Fq2::one(), Fq2::zero(), Fq2::zero()}; }

  bool is_zero() const { return c0.is_zero() && c1.is_zero() && c2.is_zero(); }
  friend bool operator==(const Fq6& a, const Fq6& b) {
    return a.c0 == b.c0 && a.c1 == b.c1 && a.c2 == b.c2;
  }

  Fq6 operator+(const Fq6& o) const { return {c0 + o.c0, c1 + o.c1, c2 + o.c2}; }
  Fq6 operator-(const Fq6& o) const { return {c0 - o.c0, c1 - o.c1, c2 - o.c2}; }
  Fq6 operator-() const { return {-c0, -c1, -c2}; }
  Fq6 operator*(const Fq6& o) const;
  Fq6 operator*(const Fq2& s) const { return {c0 * s, c1 * s, c2 * s}; }
  Fq6& operator+=(const Fq6& o) { return *this = *this + o; }
  Fq6& operator-=(const Fq6& o) { return *this = *this - o; }
  Fq6& operator*=(const Fq6& o) { return *this = *this * o; }

  Fq6 square() const { return *this * *this; }
  Fq6 inverse() const;
  Fq6 mul_by_v() const { return {c2.mul_by_xi(), c0, c1}; }
  Fq6 frobenius() const;
};

// Fq12 = Fq6[w] / (w^2 - v)
class Fq12 {
 public:
  Fq6 c0, c1;

  Fq12() = default;
  Fq12(const Fq6& a, const Fq6& b) : c0(a), c1(b) {}

  static Fq12 one() { return {Fq6::one(), Fq6::zero()}; }

  bool is_one() const { return *this == one(); }
  friend bool operator==(const Fq12& a, const Fq12& b) {
    return a.c0 == b.c0 && a.c1 == b.c1;
  }

  Fq12 operator*(const Fq12& o) const;
  Fq12& operator*=(const Fq12& o) { return *this = *this * o; }
  Fq12 square() const;
  Fq12 inverse() const;
  Fq12 conjugate() const { return {c0, -c1}; }
  Fq12 frobenius() const;

  // Multiplies by the sparse element l0 + l1*w + l3*w^3 (l_i in Fq2).
  Fq12 mul_by_line(const Fq2& l0, const Fq2& l1, const Fq2& l3) const;

  // Exponent given as little-endian 64-bit limbs.
  Fq12 pow_limbs(const uint64_t* limbs, size_t count) const;
};

}  // namespace zkmcp
