#include "zkmcp/proof/groth16.hpp"

#include <openssl/rand.h>

#include "zkmcp/errors.hpp"
#include "zkmcp/kernels/fft.hpp"
#include "zkmcp/kernels/msm.hpp"
#include "zkmcp/proof/encoding.hpp"

namespace zkmcp::groth16 {

namespace {

constexpr uint32_t kPkMagic = 0x5a4b504b;  // "ZKPK"
constexpr uint32_t kVkMagic = 0x5a4b564b;  // "ZKVK"
constexpr uint32_t kFormatVersion = 1;
constexpr size_t kMaxVector = size_t{1} << 28;

// Accumulates coefficient * lagrange[row] into out[var] for every entry.
void accumulate_columns(const SparseMatrix& m, std::span<const Fr> lagrange,
                        std::vector<Fr>& out) {
  for (size_t r = 0; r < m.rows(); ++r) {
    for (uint32_t k = m.row_start[r]; k < m.row_start[r + 1]; ++k) {
      out[m.col_index[k]] += m.values[k] * lagrange[r];
    }
  }
}

template <class F, class Cfg>
JacobianPoint<F, Cfg> msm_fr(std::span<const AffinePoint<F, Cfg>> points,
                             std::span<const Fr> scalars, Exec exec) {
  const auto s = to_canonical_scalars(scalars);
  return msm<F, Cfg>(points, s, exec);
}

}  // namespace

Fr random_scalar() {
  while (true) {
    std::array<uint8_t, 32> buf;
    if (RAND_bytes(buf.data(), static_cast<int>(buf.size())) != 1) {
      throw Error(ErrorCode::kBackendUnavailable, "system randomness unavailable");
    }
    buf[0] &= 0x3f;  // 254 bits, then rejection sampling
    if (auto v = Fr::from_canonical(U256::from_be_bytes(buf)); v && !v->is_zero()) return *v;
  }
}

size_t qap_domain_size(const ConstraintSystem& cs) {
  return Domain(cs.constraint_count() + cs.num_inputs + 1).size();
}

Keypair generate(const ConstraintSystem& cs, Exec exec) {
  const size_t m = cs.constraint_count();
  const size_t nvars = cs.num_variables;
  const size_t ninputs = cs.num_inputs;
  const Domain domain(m + ninputs + 1);

  Fr tau, alpha = random_scalar(), beta = random_scalar();
  Fr gamma = random_scalar(), delta = random_scalar();
  do {
    tau = random_scalar();
  } while (domain.vanishing_at(tau).is_zero());

  const auto lagrange = domain.lagrange_at(tau);
  std::vector<Fr> u(nvars), v(nvars), w(nvars);
  accumulate_columns(cs.a, lagrange, u);
  accumulate_columns(cs.b, lagrange, v);
  accumulate_columns(cs.c, lagrange, w);
  for (size_t k = 0; k <= ninputs; ++k) u[k] += lagrange[m + k];

  const Fr gamma_inv = gamma.inverse();
  const Fr delta_inv = delta.inverse();
  std::vector<Fr> ic_scalars(ninputs + 1), l_scalars(nvars - ninputs - 1);
  for (size_t j = 0; j < nvars; ++j) {
    const Fr t = beta * u[j] + alpha * v[j] + w[j];
    if (j <= ninputs) {
      ic_scalars[j] = t * gamma_inv;
    } else {
      l_scalars[j - ninputs - 1] = t * delta_inv;
    }
  }
  const size_t h_len = domain.size() - 1;
  std::vector<Fr> h_scalars(h_len);
  Fr tau_i = domain.vanishing_at(tau) * delta_inv;
  for (size_t i = 0; i < h_len; ++i) {
    h_scalars[i] = tau_i;
    tau_i *= tau;
  }

  const G1Table g1(G1Affine::generator());
  const G2Table g2(G2Affine::generator());
  Keypair kp;
  ProvingKey& pk = kp.pk;
  pk.num_inputs = ninputs;
  pk.num_variables = nvars;
  pk.domain_size = domain.size();
  const std::vector<Fr> singles{alpha, beta, delta};
  const auto s1 = g1.batch_mul(singles, exec);
  const auto s2 = g2.batch_mul(std::vector<Fr>{beta, delta, gamma}, exec);
  pk.alpha_g1 = s1[0];
  pk.beta_g1 = s1[1];
  pk.delta_g1 = s1[2];
  pk.beta_g2 = s2[0];
  pk.delta_g2 = s2[1];
  pk.a_query = g1.batch_mul(u, exec);
  pk.b_g1_query = g1.batch_mul(v, exec);
  pk.b_g2_query = g2.batch_mul(v, exec);
  pk.l_query = g1.batch_mul(l_scalars, exec);
  pk.h_query = g1.batch_mul(h_scalars, exec);

  VerifyingKey& vk = kp.vk;
  vk.alpha_g1 = pk.alpha_g1;
  vk.beta_g2 = pk.beta_g2;
  vk.gamma_g2 = s2[2];
  vk.delta_g2 = pk.delta_g2;
  vk.ic = g1.batch_mul(ic_scalars, exec);

  // Best-effort erasure of the trapdoor.
  tau = alpha = beta = gamma = delta = Fr::zero();
  return kp;
}

Proof prove(const ConstraintSystem& cs, const ProvingKey& pk, std::span<const Fr> z,
            Exec exec) {
  if (z.size() != pk.num_variables || pk.num_variables != cs.num_variables ||
      pk.num_inputs != cs.num_inputs) {
    throw Error(ErrorCode::kShapeMismatch, "assignment does not match the proving key");
  }
  const size_t m = cs.constraint_count();
  const Domain domain(pk.domain_size);
  if (domain.size() != pk.domain_size || m + cs.num_inputs + 1 > domain.size()) {
    throw Error(ErrorCode::kShapeMismatch, "proving key domain does not fit the circuit");
  }
  std::vector<Fr> a(domain.size()), b(domain.size()), c(domain.size());
  spmv(cs.a, z, std::span<Fr>(a).first(m), exec);
  spmv(cs.b, z, std::span<Fr>(b).first(m), exec);
  spmv(cs.c, z, std::span<Fr>(c).first(m), exec);
  for (size_t k = 0; k <= cs.num_inputs; ++k) a[m + k] = z[k];

  // h = (a*b - c) / Z, computed on the coset g*H where Z is the constant g^n - 1.
  for (auto* poly : {&a, &b, &c}) {
    domain.ifft(*poly, exec);
    domain.coset_fft(*poly, exec);
  }
  const Fr z_inv = domain.vanishing_at(Domain::coset_shift()).inverse();
  const auto n = static_cast<long long>(domain.size());
#pragma omp parallel for schedule(static) if (exec == Exec::kParallel)
  for (long long i = 0; i < n; ++i) {
    const auto k = static_cast<size_t>(i);
    a[k] = (a[k] * b[k] - c[k]) * z_inv;
  }
  domain.coset_ifft(a, exec);
  if (!a.back().is_zero()) {
    throw Error(ErrorCode::kRelationUnsatisfied, "quotient has full degree");
  }
  const std::span<const Fr> h(a.data(), domain.size() - 1);
  const std::span<const Fr> aux = z.subspan(cs.num_inputs + 1);

  const Fr r = random_scalar();
  const Fr s = random_scalar();
  const G1 a_sum = msm_fr<Fq, G1Config>(pk.a_query, z, exec);
  const G1 b1_sum = msm_fr<Fq, G1Config>(pk.b_g1_query, z, exec);
  const G2 b2_sum = msm_fr<Fq2, G2Config>(pk.b_g2_query, z, exec);
  const G1 l_sum = msm_fr<Fq, G1Config>(pk.l_query, aux, exec);
  const G1 h_sum = msm_fr<Fq, G1Config>(pk.h_query, h, exec);

  const G1 delta1(pk.delta_g1);
  const G1 proof_a = G1(pk.alpha_g1) + a_sum + delta1.mul(r);
  const G2 proof_b = G2(pk.beta_g2) + b2_sum + G2(pk.delta_g2).mul(s);
  const G1 b1 = G1(pk.beta_g1) + b1_sum + delta1.mul(s);
  const G1 proof_c = l_sum + h_sum + proof_a.mul(s) + b1.mul(r) - delta1.mul(r * s);
  return {proof_a.to_affine(), proof_b.to_affine(), proof_c.to_affine()};
}

PreparedVerifyingKey::PreparedVerifyingKey(VerifyingKey key)
    : vk(std::move(key)),
      beta(G2Prepared::from(vk.beta_g2)),
      gamma(G2Prepared::from(vk.gamma_g2)),
      delta(G2Prepared::from(vk.delta_g2)) {}

bool verify(const PreparedVerifyingKey& pvk, std::span<const Fr> inputs, const Proof& proof) {
  if (inputs.size() != pvk.vk.num_inputs()) {
    throw Error(ErrorCode::kShapeMismatch, "expected " + std::to_string(pvk.vk.num_inputs()) +
                                               " public inputs, got " +
                                               std::to_string(inputs.size()));
  }
  const auto ic = std::span<const G1Affine>(pvk.vk.ic);
  const G1 vk_x = G1(ic[0]) + msm_fr<Fq, G1Config>(ic.subspan(1), inputs, Exec::kSerial);
  const G2Prepared b = G2Prepared::from(proof.b);
  // e(-A, B) e(alpha, beta) e(vk_x, gamma) e(C, delta) == 1
  const PairingInput terms[] = {
      {-proof.a, &b},
      {pvk.vk.alpha_g1, &pvk.beta},
      {vk_x.to_affine(), &pvk.gamma},
      {proof.c, &pvk.delta},
  };
  return pairing_product_is_one(terms);
}

std::vector<uint8_t> Proof::serialize() const {
  ByteWriter w;
  w.g1(a);
  w.g2(b);
  w.g1(c);
  return std::move(w.data());
}

Proof Proof::deserialize(std::span<const uint8_t> in) {
  if (in.size() != kBytes) {
    throw Error(ErrorCode::kMalformedProof,
                "proof must be " + std::to_string(kBytes) + " bytes, got " +
                    std::to_string(in.size()));
  }
  ByteReader r(in, ErrorCode::kMalformedProof);
  Proof p;
  p.a = r.g1();
  p.b = r.g2();
  p.c = r.g1();
  r.expect_end();
  return p;
}

std::vector<uint8_t> ProvingKey::serialize() const {
  ByteWriter w;
  w.u32(kPkMagic);
  w.u32(kFormatVersion);
  w.u64(num_inputs);
  w.u64(num_variables);
  w.u64(domain_size);
  w.g1(alpha_g1);
  w.g1(beta_g1);
  w.g1(delta_g1);
  w.g2(beta_g2);
  w.g2(delta_g2);
  w.g1_vec(a_query);
  w.g1_vec(b_g1_query);
  w.g2_vec(b_g2_query);
  w.g1_vec(l_query);
  w.g1_vec(h_query);
  return std::move(w.data());
}

ProvingKey ProvingKey::deserialize(std::span<const uint8_t> in) {
  ByteReader r(in, ErrorCode::kCorruptCrs);
  if (r.u32() != kPkMagic) throw Error(ErrorCode::kCorruptCrs, "not a proving key");
  if (r.u32() != kFormatVersion) throw Error(ErrorCode::kCorruptCrs, "unknown key version");
  ProvingKey pk;
  pk.num_inputs = r.u64();
  pk.num_variables = r.u64();
  pk.domain_size = r.u64();
  pk.alpha_g1 = r.g1();
  pk.beta_g1 = r.g1();
  pk.delta_g1 = r.g1();
  pk.beta_g2 = r.g2();
  pk.delta_g2 = r.g2();
  pk.a_query = r.g1_vec(kMaxVector);
  pk.b_g1_query = r.g1_vec(kMaxVector);
  // The proving key is the prover's own local state; subgroup checks on
  // every query point would dominate load time. Curve checks still run.
  pk.b_g2_query = r.g2_vec(kMaxVector, false);
  pk.l_query = r.g1_vec(kMaxVector);
  pk.h_query = r.g1_vec(kMaxVector);
  r.expect_end();
  const bool consistent = pk.a_query.size() == pk.num_variables &&
                          pk.b_g1_query.size() == pk.num_variables &&
                          pk.b_g2_query.size() == pk.num_variables &&
                          pk.l_query.size() + pk.num_inputs + 1 == pk.num_variables &&
                          pk.h_query.size() + 1 == pk.domain_size;
  if (!consistent) throw Error(ErrorCode::kCorruptCrs, "proving key vector sizes disagree");
  return pk;
}

std::vector<uint8_t> VerifyingKey::serialize() const {
  ByteWriter w;
  w.u32(kVkMagic);
  w.u32(kFormatVersion);
  w.g1(alpha_g1);
  w.g2(beta_g2);
  w.g2(gamma_g2);
  w.g2(delta_g2);
  w.g1_vec(ic);
  return std::move(w.data());
}

VerifyingKey VerifyingKey::deserialize(std::span<const uint8_t> in) {
  ByteReader r(in, ErrorCode::kCorruptCrs);
  if (r.u32() != kVkMagic) throw Error(ErrorCode::kCorruptCrs, "not a verification key");
  if (r.u32() != kFormatVersion) throw Error(ErrorCode::kCorruptCrs, "unknown key version");
  VerifyingKey vk;
  vk.alpha_g1 = r.g1();
  vk.beta_g2 = r.g2();
  vk.gamma_g2 = r.g2();
  vk.delta_g2 = r.g2();
  vk.ic = r.g1_vec(kMaxVector);
  r.expect_end();
  if (vk.ic.empty()) throw Error(ErrorCode::kCorruptCrs, "empty input commitment vector");
  return vk;
}

}  // namespace zkmcp::groth16
