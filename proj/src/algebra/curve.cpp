#include "zkmcp/algebra/curve.hpp"

namespace zkmcp {

namespace {

Fq fq_dec(const char* s) { return *Fq::from_decimal(s); }

}  // namespace

const Fq& G1Config::b() {
  static const Fq kB = Fq::from_u64(3);
  return kB;
}

AffinePoint<Fq, G1Config> G1Config::generator() {
  static const AffinePoint<Fq, G1Config> kGen(Fq::from_u64(1), Fq::from_u64(2));
  return kGen;
}

const Fq2& G2Config::b() {
  static const Fq2 kB =
      Fq2(Fq::from_u64(3), Fq::zero()) * Fq2(Fq::from_u64(9), Fq::one()).inverse();
  return kB;
}

AffinePoint<Fq2, G2Config> G2Config::generator() {
  static const AffinePoint<Fq2, G2Config> kGen(
      Fq2(fq_dec("10857046999023057135944570762232829481370756359578518086990519993285655852781"),
          fq_dec("11559732032986387107991004021392285783925812861821192530917403151452391805634")),
      Fq2(fq_dec("8495653923123431417604973247489272438418190587263600148770280649306958101930"),
          fq_dec("4082367875863433681332203403145435568316851327593401208105741076214120093531")));
  return kGen;
}

bool g2_in_subgroup(const G2Affine& p) {
  return G2(p).mul(Fr::kModulus).is_identity();
}

}  // namespace zkmcp
