#include "zkmcp/algebra/pairing.hpp"

namespace zkmcp {

namespace {

// 6x + 2 for x = 4965661367192848881.
constexpr U256 kAteLoopCount(0x9d797039be763ba8ULL, 0x1ULL, 0, 0);

// (q^4 - q^2 + 1) / r
constexpr uint64_t kHardExponent[12] = {
    0xe81bb482ccdf42b1ULL, 0x5abf5cc4f49c36d4ULL, 0xf1154e7e1da014fdULL,
    0xdcc7b44c87cdbacfULL, 0xaaa441e3954bcf8aULL, 0x6b887d56d5095f23ULL,
    0x79581e16f3fd90c6ULL, 0x3b1b1355d189227dULL, 0x4e529a5861876f6bULL,
    0x6c0eb522d5b12278ULL, 0x331ec15183177fafULL, 0x01baaa710b0759adULL};

// Homogeneous projective point on the twist: x = X/Z, y = Y/Z.
struct TwistPoint {
  Fq2 X, Y, Z;
};

const Fq& two_inv() {
  static const Fq kTwoInv = Fq::from_u64(2).inverse();
  return kTwoInv;
}

LineCoeffs doubling_step(TwistPoint& t) {
  const Fq2 a = (t.X * t.Y) * two_inv();
  const Fq2 b = t.Y.square();
  const Fq2 c = t.Z.square();
  const Fq2 e = G2Config::b() * (c.dbl() + c);
  const Fq2 f = e.dbl() + e;
  const Fq2 g = (b + f) * two_inv();
  const Fq2 h = (t.Y + t.Z).square() - (b + c);
  const Fq2 i = e - b;
  const Fq2 j = t.X.square();
  const Fq2 e2 = e.square();
  t.X = a * (b - f);
  t.Y = g.square() - (e2.dbl() + e2);
  t.Z = b * h;
  return {-h, j.dbl() + j, i};
}

LineCoeffs addition_step(TwistPoint& t, const G2Affine& q) {
  const Fq2 d = t.X - q.x * t.Z;
  const Fq2 e = t.Y - q.y * t.Z;
  const Fq2 f = d.square();
  const Fq2 g = e.square();
  const Fq2 h = d * f;
  const Fq2 i = t.X * f;
  const Fq2 j = h + t.Z * g - i.dbl();
  const Fq2 y_new = e * (i - j) - h * t.Y;
  t.X = d * j;
  t.Y = y_new;
  t.Z = t.Z * h;
  return {d, -e, e * q.x - d * q.y};
}

// Untwist-Frobenius-twist endomorphism on E'(Fq2).
G2Affine frobenius_twist(const G2Affine& q) {
  static const std::pair<Fq2, Fq2> kCoeffs = [] {
    const Fq2 xi(Fq::from_u64(9), Fq::one());
    U256 qm1;
    U256::sub(qm1, Fq::kModulus, U256(1));
    // (q-1)/3 and (q-1)/2
    U256 third, half = qm1.shr(1);
    {
      u128 rem = 0;
      for (int k = 3; k >= 0; --k) {
        const u128 cur = (rem << 64) | qm1.limb[k];
        third.limb[k] = static_cast<uint64_t>(cur / 3);
        rem = cur % 3;
      }
    }
    return std::make_pair(xi.pow(third), xi.pow(half));
  }();
  return {q.x.conjugate() * kCoeffs.first, q.y.conjugate() * kCoeffs.second};
}

}  // namespace

G2Prepared G2Prepared::from(const G2Affine& q) {
  G2Prepared out;
  if (q.infinity) return out;
  out.infinity = false;
  TwistPoint t{q.x, q.y, Fq2::one()};
  const size_t bits = kAteLoopCount.num_bits();
  out.lines.reserve(bits * 2);
  for (size_t i = bits - 1; i-- > 0;) {
    out.lines.push_back(doubling_step(t));
    if (kAteLoopCount.bit(i)) out.lines.push_back(addition_step(t, q));
  }
  const G2Affine q1 = frobenius_twist(q);
  const G2Affine q2 = -frobenius_twist(q1);
  out.lines.push_back(addition_step(t, q1));
  out.lines.push_back(addition_step(t, q2));
  return out;
}

Fq12 miller_loop(std::span<const PairingInput> pairs) {
  Fq12 f = Fq12::one();
  std::vector<size_t> active;
  for (size_t k = 0; k < pairs.size(); ++k) {
    if (!pairs[k].first.infinity && !pairs[k].second->infinity) {
      active.push_back(k);
    }
  }
  auto apply = [&](size_t idx) {
    for (size_t k : active) {
      const auto& [p, prep] = pairs[k];
      const LineCoeffs& l = prep->lines[idx];
      f = f.mul_by_line(l.l0 * p.y, l.l1 * p.x, l.l3);
    }
  };
  const size_t bits = kAteLoopCount.num_bits();
  size_t idx = 0;
  for (size_t i = bits - 1; i-- > 0;) {
    f = f.square();
    apply(idx++);
    if (kAteLoopCount.bit(i)) apply(idx++);
  }
  apply(idx++);
  apply(idx++);
  return f;
}

Fq12 final_exponentiation(const Fq12& f) {
  // Easy part: f^((q^6 - 1)(q^2 + 1)).
  const Fq12 f1 = f.conjugate() * f.inverse();
  const Fq12 f2 = f1.frobenius().frobenius() * f1;
  // Hard part: (q^4 - q^2 + 1) / r.
  return f2.pow_limbs(kHardExponent, 12);
}

Fq12 pairing(const G1Affine& p, const G2Affine& q) {
  const G2Prepared prep = G2Prepared::from(q);
  const PairingInput in{p, &prep};
  return final_exponentiation(miller_loop({&in, 1}));
}

bool pairing_product_is_one(std::span<const PairingInput> pairs) {
  return final_exponentiation(miller_loop(pairs)).is_one();
}

}  // namespace zkmcp
