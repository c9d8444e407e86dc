#include <random>

#include <gtest/gtest.h>

#include "test_util.hpp"
#include "zkmcp/errors.hpp"
#include "zkmcp/kernels/fft.hpp"
#include "zkmcp/kernels/msm.hpp"
#include "zkmcp/kernels/sparse.hpp"

namespace zkmcp {
namespace {

using testing::random_element;

std::vector<Fr> random_vector(size_t n, std::mt19937_64& rng) {
  std::vector<Fr> v(n);
  for (auto& x : v) x = random_element<Fr>(rng);
  return v;
}

class FftTest : public ::testing::TestWithParam<size_t> {};

TEST_P(FftTest, SerialAndParallelMatchNaiveDft) {
  std::mt19937_64 rng(GetParam());
  const Domain d(size_t{1} << GetParam());
  const auto input = random_vector(d.size(), rng);
  const auto expected = dft_naive(input, d.omega());
  auto serial = input;
  auto parallel = input;
  d.fft(serial, Exec::kSerial);
  d.fft(parallel, Exec::kParallel);
  EXPECT_EQ(serial, expected);
  EXPECT_EQ(parallel, expected);
  d.ifft(parallel, Exec::kParallel);
  EXPECT_EQ(parallel, input);
}

TEST_P(FftTest, CosetRoundTrip) {
  std::mt19937_64 rng(100 + GetParam());
  const Domain d(size_t{1} << GetParam());
  const auto input = random_vector(d.size(), rng);
  auto v = input;
  d.coset_fft(v, Exec::kSerial);
  // Evaluation at g * omega^1 of the polynomial with coefficients `input`.
  if (d.size() > 1) {
    const Fr x = Domain::coset_shift() * d.omega();
    Fr acc, p = Fr::one();
    for (const Fr& c : input) {
      acc += c * p;
      p *= x;
    }
    EXPECT_EQ(v[1], acc);
  }
  d.coset_ifft(v, Exec::kParallel);
  EXPECT_EQ(v, input);
}

INSTANTIATE_TEST_SUITE_P(Sizes, FftTest, ::testing::Values(0, 1, 2, 3, 5, 8));

TEST(DomainTest, RoundsUpAndRejectsBadSizes) {
  EXPECT_EQ(Domain(5).size(), 8u);
  EXPECT_EQ(Domain(1).size(), 1u);
  std::vector<Fr> v(6);
  EXPECT_THROW(fft_serial(v, Fr::one()), Error);
}

TEST(DomainTest, LagrangeBasisInterpolates) {
  std::mt19937_64 rng(11);
  const Domain d(16);
  const Fr tau = random_element<Fr>(rng);
  const auto l = d.lagrange_at(tau);
  // sum_i L_i(tau) * p(omega^i) == p(tau) for a random polynomial p.
  auto coeffs = random_vector(d.size(), rng);
  auto evals = coeffs;
  d.fft(evals, Exec::kSerial);
  Fr lhs, rhs, p = Fr::one();
  for (size_t i = 0; i < d.size(); ++i) {
    lhs += l[i] * evals[i];
    rhs += coeffs[i] * p;
    p *= tau;
  }
  EXPECT_EQ(lhs, rhs);
  EXPECT_THROW(d.lagrange_at(d.omega()), Error);
}

template <class Point>
void check_msm(size_t n, uint64_t seed) {
  using Affine = typename Point::Affine;
  std::mt19937_64 rng(seed);
  std::vector<Point> jac;
  for (size_t i = 0; i < n; ++i) jac.push_back(Point::generator().mul(random_element<Fr>(rng)));
  std::vector<Affine> pts(n);
  for (size_t i = 0; i < n; ++i) pts[i] = jac[i].to_affine();
  if (n > 2) pts[1] = Affine::identity();
  std::vector<U256> scalars(n);
  for (size_t i = 0; i < n; ++i) {
    switch (i % 4) {
      case 0: scalars[i] = random_element<Fr>(rng).to_canonical(); break;
      case 1: scalars[i] = U256(0); break;
      case 2: scalars[i] = U256(1); break;
      default: scalars[i] = U256(rng() & 0xffff); break;
    }
  }
  const std::span<const Affine> ps(pts);
  const std::span<const U256> ss(scalars);
  const Point expected = msm_naive(ps, ss);
  EXPECT_EQ(msm_serial(ps, ss), expected);
  EXPECT_EQ(msm_parallel(ps, ss), expected);
}

TEST(MsmTest, G1MatchesNaive) {
  for (size_t n : {0, 1, 3, 31, 40, 130}) check_msm<G1>(n, 20 + n);
}

TEST(MsmTest, G2MatchesNaive) {
  for (size_t n : {1, 7, 33}) check_msm<G2>(n, 40 + n);
}

TEST(MsmTest, LengthMismatchThrows) {
  std::vector<G1Affine> p(2);
  std::vector<U256> s(3);
  EXPECT_THROW((msm_serial<Fq, G1Config>(p, s)), Error);
}

TEST(FixedBaseTest, BatchMulMatchesScalarMul) {
  std::mt19937_64 rng(50);
  const G1Table t1(G1Affine::generator());
  const G2Table t2(G2Affine::generator());
  auto scalars = random_vector(20, rng);
  scalars[0] = Fr::zero();
  scalars[1] = -Fr::one();
  const auto s1 = t1.batch_mul(scalars, Exec::kSerial);
  const auto p1 = t1.batch_mul(scalars, Exec::kParallel);
  const auto p2 = t2.batch_mul(scalars, Exec::kParallel);
  for (size_t i = 0; i < scalars.size(); ++i) {
    EXPECT_EQ(s1[i], G1::generator().mul(scalars[i]).to_affine());
    EXPECT_EQ(p1[i], s1[i]);
    EXPECT_EQ(p2[i], G2::generator().mul(scalars[i]).to_affine());
  }
}

TEST(SparseTest, SpmvMatchesDense) {
  std::mt19937_64 rng(60);
  const size_t rows = 50, cols = 30;
  SparseMatrix m;
  m.cols = cols;
  std::vector<std::vector<Fr>> dense(rows, std::vector<Fr>(cols));
  for (size_t r = 0; r < rows; ++r) {
    for (size_t c = 0; c < cols; ++c) {
      if (rng() % 5 == 0) {
        dense[r][c] = random_element<Fr>(rng);
        m.col_index.push_back(static_cast<uint32_t>(c));
        m.values.push_back(dense[r][c]);
      }
    }
    m.row_start.push_back(static_cast<uint32_t>(m.values.size()));
  }
  const auto z = random_vector(cols, rng);
  std::vector<Fr> a(rows), b(rows);
  spmv_serial(m, z, a);
  spmv_parallel(m, z, b);
  for (size_t r = 0; r < rows; ++r) {
    Fr acc;
    for (size_t c = 0; c < cols; ++c) acc += dense[r][c] * z[c];
    EXPECT_EQ(a[r], acc);
    EXPECT_EQ(b[r], acc);
  }
}

}  // namespace
}  // namespace zkmcp
