#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "zkmcp/algebra/pairing.hpp"
#include "zkmcp/circuit.hpp"
#include "zkmcp/kernels/exec.hpp"

// Groth16 over BN254. The R1CS is mapped to a QAP on a radix-2 domain with
// one extra row per public input (A[row] = z_k), which makes the input
// polynomials linearly independent.
namespace zkmcp::groth16 {

struct ProvingKey {
  size_t num_inputs = 0;  // public inputs, excluding the constant one
  size_t num_variables = 0;
  size_t domain_size = 0;
  G1Affine alpha_g1, beta_g1, delta_g1;
  G2Affine beta_g2, delta_g2;
  std::vector<G1Affine> a_query;   // u_j(tau), all variables
  std::vector<G1Affine> b_g1_query;
  std::vector<G2Affine> b_g2_query;
  std::vector<G1Affine> l_query;   // (beta u_j + alpha v_j + w_j) / delta, auxiliary j
  std::vector<G1Affine> h_query;   // tau^i Z(tau) / delta, i < domain_size - 1

  std::vector<uint8_t> serialize() const;
  static ProvingKey deserialize(std::span<const uint8_t> in);
};

struct VerifyingKey {
  G1Affine alpha_g1;
  G2Affine beta_g2, gamma_g2, delta_g2;
  std::vector<G1Affine> ic;  // (beta u_j + alpha v_j + w_j) / gamma, j <= num_inputs

  size_t num_inputs() const { return ic.empty() ? 0 : ic.size() - 1; }
  std::vector<uint8_t> serialize() const;
  static VerifyingKey deserialize(std::span<const uint8_t> in);
};

// Verifying key with Miller-loop lines for its fixed G2 elements.
struct PreparedVerifyingKey {
  VerifyingKey vk;
  G2Prepared beta, gamma, delta;

  explicit PreparedVerifyingKey(VerifyingKey key);
};

struct Proof {
  G1Affine a;
  G2Affine b;
  G1Affine c;

  static constexpr size_t kBytes = 256;
  std::vector<uint8_t> serialize() const;
  // Throws MalformedProof.
  static Proof deserialize(std::span<const uint8_t> in);
};

struct Keypair {
  ProvingKey pk;
  VerifyingKey vk;
};

size_t qap_domain_size(const ConstraintSystem& cs);

Keypair generate(const ConstraintSystem& cs, Exec exec = Exec::kParallel);

// z is the full assignment [1, inputs..., aux...]; it must satisfy cs.
Proof prove(const ConstraintSystem& cs, const ProvingKey& pk, std::span<const Fr> z,
            Exec exec = Exec::kParallel);

bool verify(const PreparedVerifyingKey& pvk, std::span<const Fr> inputs, const Proof& proof);

// Uniform scalar from the OS CSPRNG.
Fr random_scalar();

}  // namespace zkmcp::groth16
