#pragma once

#include <array>
#include <span>
#include <string_view>
#include <vector>

#include "zkmcp/algebra/fields.hpp"
#include "zkmcp/message.hpp"

namespace zkmcp {

// Poseidon over the BN254 scalar field with x^5 S-boxes, 8 full rounds,
// and round constants / Cauchy MDS drawn from the Grain LFSR. Digests agree
// with circomlib's poseidon for arities 1..4.
inline constexpr std::string_view kHashParamsId = "poseidon-bn254-x5-grain-circomlib";

struct PoseidonParams {
  size_t width = 0;  // t = arity + 1
  size_t full_rounds = 0;
  size_t partial_rounds = 0;
  std::vector<Fr> round_constants;  // (full + partial) * width
  std::vector<std::vector<Fr>> mds;

  bool is_full_round(size_t r) const {
    return r < full_rounds / 2 || r >= full_rounds / 2 + partial_rounds;
  }
  const Fr& constant(size_t round, size_t i) const {
    return round_constants[round * width + i];
  }
};

// Throws UnsupportedArity outside 1..4.
const PoseidonParams& poseidon_params(size_t arity);

Fr poseidon(std::span<const Fr> inputs);

inline constexpr size_t kLimbBytes = 31;

// Big-endian limbs of 31 bytes each, the last one holding the remainder:
// 64 bytes -> [0..31), [31..62), [62..64). Throws WrongLength when
// padded.size() != length.
std::vector<Fr> pack_bytes(std::span<const uint8_t> padded, size_t length = 64);

// poseidon(limbs..., total_len) over the zero-padded envelope.
Fr message_digest(const AuditMessage& msg, size_t max_json = 64);

}  // namespace zkmcp
