#include <random>

#include <gtest/gtest.h>

#include "test_util.hpp"
#include "zkmcp/algebra/curve.hpp"
#include "zkmcp/algebra/pairing.hpp"

namespace zkmcp {
namespace {

using testing::random_element;

TEST(BigIntTest, DecimalRoundTrip) {
  U256 v;
  ASSERT_TRUE(U256::parse_decimal(
      "21888242871839275222246405745257275088548364400416034343698204186575808495617", v));
  EXPECT_EQ(v, Fr::kModulus);
  EXPECT_EQ(v.to_decimal(),
            "21888242871839275222246405745257275088548364400416034343698204186575808495617");
  EXPECT_FALSE(U256::parse_decimal("", v));
  EXPECT_FALSE(U256::parse_decimal("-1", v));
  EXPECT_FALSE(U256::parse_decimal(std::string(80, '9'), v));
  EXPECT_EQ(U256(0).to_decimal(), "0");
}

TEST(BigIntTest, BytesAndShifts) {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 100; ++i) {
    U256 v(rng(), rng(), rng(), rng());
    std::array<uint8_t, 32> buf{};
    v.to_be_bytes(buf);
    EXPECT_EQ(U256::from_be_bytes(buf), v);
    EXPECT_EQ(v.shl(37).shr(37), U256(v.limb[0], v.limb[1], v.limb[2],
                                      v.limb[3] & ((1ULL << 27) - 1)));
  }
}

template <class F>
void check_field_axioms(uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (int i = 0; i < 200; ++i) {
    const F a = random_element<F>(rng);
    const F b = random_element<F>(rng);
    const F c = random_element<F>(rng);
    EXPECT_EQ(a + b, b + a);
    EXPECT_EQ(a * b, b * a);
    EXPECT_EQ((a + b) * c, a * c + b * c);
    EXPECT_EQ((a * b) * c, a * (b * c));
    EXPECT_EQ(a - a, F::zero());
    EXPECT_EQ(a + (-a), F::zero());
    if (!a.is_zero()) EXPECT_EQ(a * a.inverse(), F::one());
    EXPECT_EQ(*F::from_decimal(a.to_decimal()), a);
  }
}

TEST(FieldTest, FqAxioms) { check_field_axioms<Fq>(2); }
TEST(FieldTest, FrAxioms) { check_field_axioms<Fr>(3); }

TEST(FieldTest, SmallArithmetic) {
  EXPECT_EQ(Fr::from_u64(6) * Fr::from_u64(7), Fr::from_u64(42));
  EXPECT_EQ((Fr::zero() - Fr::one()).to_decimal(),
            "21888242871839275222246405745257275088548364400416034343698204186575808495616");
  EXPECT_FALSE(Fr::from_canonical(Fr::kModulus).has_value());
}

TEST(FieldTest, SquareRoot) {
  std::mt19937_64 rng(4);
  for (int i = 0; i < 20; ++i) {
    const Fq a = random_element<Fq>(rng);
    const auto r = a.square().sqrt();
    ASSERT_TRUE(r.has_value());
    EXPECT_EQ(r->square(), a.square());
  }
}

TEST(FieldTest, RootOfUnityOrder) {
  const Fr w = fr_root_of_unity(kFrTwoAdicity);
  Fr x = w;
  for (size_t i = 1; i < kFrTwoAdicity; ++i) x = x.square();
  EXPECT_EQ(x, -Fr::one());
  EXPECT_EQ(x.square(), Fr::one());
  EXPECT_EQ(fr_root_of_unity(1), -Fr::one());
  EXPECT_EQ(fr_root_of_unity(0), Fr::one());
}

TEST(ExtensionFieldTest, TowerInverseAndFrobenius) {
  std::mt19937_64 rng(5);
  auto rq2 = [&] { return Fq2(random_element<Fq>(rng), random_element<Fq>(rng)); };
  auto rq6 = [&] { return Fq6(rq2(), rq2(), rq2()); };
  for (int i = 0; i < 10; ++i) {
    const Fq12 a(rq6(), rq6());
    const Fq12 b(rq6(), rq6());
    EXPECT_EQ(a * a.inverse(), Fq12::one());
    EXPECT_EQ(a.square(), a * a);
    EXPECT_EQ(a * b, b * a);
    // Frobenius is the q-power map.
    EXPECT_EQ(a.frobenius(), a.pow_limbs(Fq::kModulus.limb.data(), 4));
    // Sparse line multiplication agrees with the generic product.
    const Fq2 l0 = rq2(), l1 = rq2(), l3 = rq2();
    const Fq12 line(Fq6(l0, Fq2::zero(), Fq2::zero()), Fq6(l1, l3, Fq2::zero()));
    EXPECT_EQ(a.mul_by_line(l0, l1, l3), a * line);
  }
}

TEST(CurveTest, GeneratorsAndOrder) {
  EXPECT_TRUE(G1Affine::generator().is_on_curve());
  EXPECT_TRUE(G2Affine::generator().is_on_curve());
  EXPECT_TRUE(G1::generator().mul(Fr::kModulus).is_identity());
  EXPECT_TRUE(g2_in_subgroup(G2Affine::generator()));
}

TEST(CurveTest, ScalarMultiplicationIsLinear) {
  std::mt19937_64 rng(6);
  for (int i = 0; i < 10; ++i) {
    const Fr a = random_element<Fr>(rng);
    const Fr b = random_element<Fr>(rng);
    EXPECT_EQ(G1::generator().mul(a + b),
              G1::generator().mul(a) + G1::generator().mul(b));
    EXPECT_EQ(G2::generator().mul(a * b), G2::generator().mul(a).mul(b));
    const G1 p = G1::generator().mul(a);
    EXPECT_EQ(G1(p.to_affine()), p);
    EXPECT_EQ(p.add_mixed(G1Affine::generator()), p + G1::generator());
    EXPECT_EQ(p + p, p.dbl());
    EXPECT_TRUE((p - p).is_identity());
    EXPECT_TRUE(p.to_affine().is_on_curve());
  }
}

TEST(CurveTest, BatchToAffineMatchesSingle) {
  std::mt19937_64 rng(7);
  std::vector<G1> pts;
  for (int i = 0; i < 17; ++i) pts.push_back(G1::generator().mul(random_element<Fr>(rng)));
  pts.push_back(G1::identity());
  const auto aff = batch_to_affine<Fq, G1Config>(pts);
  for (size_t i = 0; i < pts.size(); ++i) EXPECT_EQ(aff[i], pts[i].to_affine());
}

// Reduced pairing e(G1, G2) re-expressed in this tower by
// tests/oracles/bn254_ref.py (py_ecc optimized_bn128).
constexpr const char* kPairingG1G2[12] = {
    "8493334370784016972005089913588211327688223499729897951716206968320726508021",
    "3758435817766288188804561253838670030762970764366672594784247447067868088068",
    "6565798094314091391201231504228224566495939541538094766881371862976727043038",
    "14656606573936501743457633041048024656612227301473084805627390748872617280984",
    "634997487638609332803583491743335852620873788902390365055086820718589720118",
    "19455424343576886430889849773367397946457449073528455097210946839000147698372",
    "20049218015652006197026173611347504489508678646783216776320737476707192559881",
    "18059168546148152671857026372711724379319778306792011146784665080987064164612",
    "12145052038566888241256672223106590273978429515702193755778990643425246950730",
    "17918828665069491344039743589118342552553375221610735811112289083834142789347",
    "6223602427219597392892794664899549544171383137467762280768257680446283161705",
    "7484542354754424633621663080190936924481536615300815203692506276894207018007",
};

Fq12 fq12_from_decimals(const char* const (&s)[12]) {
  auto f2 = [&](int i) { return Fq2(*Fq::from_decimal(s[i]), *Fq::from_decimal(s[i + 1])); };
  return {Fq6(f2(0), f2(2), f2(4)), Fq6(f2(6), f2(8), f2(10))};
}

TEST(PairingTest, MatchesReferenceValue) {
  const Fq12 e = pairing(G1Affine::generator(), G2Affine::generator());
  EXPECT_EQ(e, fq12_from_decimals(kPairingG1G2));
}

TEST(PairingTest, Bilinearity) {
  std::mt19937_64 rng(8);
  const Fq12 base = pairing(G1Affine::generator(), G2Affine::generator());
  EXPECT_FALSE(base.is_one());
  for (int i = 0; i < 3; ++i) {
    const Fr a = random_element<Fr>(rng);
    const Fr b = random_element<Fr>(rng);
    const G1Affine p = G1::generator().mul(a).to_affine();
    const G2Affine q = G2::generator().mul(b).to_affine();
    const U256 ab = (a * b).to_canonical();
    EXPECT_EQ(pairing(p, q), base.pow_limbs(ab.limb.data(), 4));
  }
}

TEST(PairingTest, ProductCheck) {
  std::mt19937_64 rng(9);
  const Fr a = random_element<Fr>(rng);
  const G1Affine p = G1::generator().mul(a).to_affine();
  const G2Prepared g2 = G2Prepared::from(G2Affine::generator());
  const G2Prepared aq = G2Prepared::from(G2::generator().mul(a).to_affine());
  // e(aP, Q) * e(-P, aQ) == 1
  const PairingInput good[] = {{p, &g2}, {-G1Affine::generator(), &aq}};
  EXPECT_TRUE(pairing_product_is_one(good));
  const PairingInput bad[] = {{p, &g2}, {G1Affine::generator(), &aq}};
  EXPECT_FALSE(pairing_product_is_one(bad));
  const PairingInput with_identity[] = {{G1Affine::identity(), &g2}};
  EXPECT_TRUE(pairing_product_is_one(with_identity));
}

}  // namespace
}  // namespace zkmcp
