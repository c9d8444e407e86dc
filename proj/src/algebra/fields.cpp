#include "zkmcp/algebra/fields.hpp"

#include <stdexcept>

namespace zkmcp {

namespace {

U256 div_small(const U256& a, uint64_t d) {
  U256 q;
  u128 rem = 0;
  for (int i = 3; i >= 0; --i) {
    const u128 cur = (rem << 64) | a.limb[i];
    q.limb[i] = static_cast<uint64_t>(cur / d);
    rem = cur % d;
  }
  return q;
}

struct FrobeniusCoeffs {
  Fq2 gamma_v;   // xi^((q-1)/3)
  Fq2 gamma_v2;  // xi^(2(q-1)/3)
  Fq2 gamma_w;   // xi^((q-1)/6)
};

const FrobeniusCoeffs& frobenius_coeffs() {
  static const FrobeniusCoeffs kCoeffs = [] {
    const Fq2 xi(Fq::from_u64(9), Fq::one());
    U256 qm1;
    U256::sub(qm1, Fq::kModulus, U256(1));
    FrobeniusCoeffs c;
    c.gamma_v = xi.pow(div_small(qm1, 3));
    c.gamma_v2 = c.gamma_v.square();
    c.gamma_w = xi.pow(div_small(qm1, 6));
    return c;
  }();
  return kCoeffs;
}

// (x0 + x1 v + x2 v^2) * (b0 + b1 v)
Fq6 mul_by_01(const Fq6& x, const Fq2& b0, const Fq2& b1) {
  const Fq2 t0 = x.c0 * b0;
  const Fq2 t1 = x.c1 * b1;
  return {(x.c2 * b1).mul_by_xi() + t0,
          (x.c0 + x.c1) * (b0 + b1) - t0 - t1,
          x.c2 * b0 + t1};
}

}  // namespace

Fr fr_root_of_unity(size_t log_n) {
  if (log_n > kFrTwoAdicity) {
    throw std::invalid_argument("domain exceeds Fr two-adicity");
  }
  static const Fr kMaxRoot = [] {
    U256 rm1;
    U256::sub(rm1, Fr::kModulus, U256(1));
    return Fr::from_u64(kFrMultiplicativeGenerator).pow(rm1.shr(kFrTwoAdicity));
  }();
  Fr root = kMaxRoot;
  for (size_t i = log_n; i < kFrTwoAdicity; ++i) root = root.square();
  return root;
}

Fq2 Fq2::pow(const U256& e) const {
  Fq2 r = one();
  for (size_t i = e.num_bits(); i-- > 0;) {
    r = r.square();
    if (e.bit(i)) r *= *this;
  }
  return r;
}

Fq6 Fq6::operator*(const Fq6& o) const {
  const Fq2 t0 = c0 * o.c0;
  const Fq2 t1 = c1 * o.c1;
  const Fq2 t2 = c2 * o.c2;
  return {((c1 + c2) * (o.c1 + o.c2) - t1 - t2).mul_by_xi() + t0,
          (c0 + c1) * (o.c0 + o.c1) - t0 - t1 + t2.mul_by_xi(),
          (c0 + c2) * (o.c0 + o.c2) - t0 - t2 + t1};
}

Fq6 Fq6::inverse() const {
  const Fq2 t0 = c0.square() - (c1 * c2).mul_by_xi();
  const Fq2 t1 = c2.square().mul_by_xi() - c0 * c1;
  const Fq2 t2 = c1.square() - c0 * c2;
  const Fq2 det = c0 * t0 + (c2 * t1 + c1 * t2).mul_by_xi();
  const Fq2 inv = det.inverse();
  return {t0 * inv, t1 * inv, t2 * inv};
}

Fq6 Fq6::frobenius() const {
  const auto& k = frobenius_coeffs();
  return {c0.conjugate(), c1.conjugate() * k.gamma_v,
          c2.conjugate() * k.gamma_v2};
}

Fq12 Fq12::operator*(const Fq12& o) const {
  const Fq6 t0 = c0 * o.c0;
  const Fq6 t1 = c1 * o.c1;
  return {t0 + t1.mul_by_v(), (c0 + c1) * (o.c0 + o.c1) - t0 - t1};
}

Fq12 Fq12::square() const {
  const Fq6 ab = c0 * c1;
  const Fq6 t = (c0 + c1) * (c0 + c1.mul_by_v());
  return {t - ab - ab.mul_by_v(), ab + ab};
}

Fq12 Fq12::inverse() const {
  const Fq6 t = (c0.square() - c1.square().mul_by_v()).inverse();
  return {c0 * t, -(c1 * t)};
}

Fq12 Fq12::frobenius() const {
  const auto& k = frobenius_coeffs();
  return {c0.frobenius(), c1.frobenius() * k.gamma_w};
}

Fq12 Fq12::mul_by_line(const Fq2& l0, const Fq2& l1, const Fq2& l3) const {
  // (a0 + a1 w)(b0 + b1 w) with b0 = l0, b1 = l1 + l3 v.
  const Fq6 t0 = c0 * l0;
  const Fq6 t1 = mul_by_01(c1, l1, l3);
  const Fq6 cross = mul_by_01(c0 + c1, l0 + l1, l3);
  return {t0 + t1.mul_by_v(), cross - t0 - t1};
}

Fq12 Fq12::pow_limbs(const uint64_t* limbs, size_t count) const {
  Fq12 r = one();
  for (size_t i = count * 64; i-- > 0;) {
    r = r.square();
    if ((limbs[i / 64] >> (i % 64)) & 1) r *= *this;
  }
  return r;
}

}  // namespace zkmcp
