#include "zkmcp/hashing.hpp"

#include <bitset>
#include <mutex>
#include <set>

#include "zkmcp/errors.hpp"

namespace zkmcp {

namespace {

constexpr size_t kFullRounds = 8;
constexpr size_t kFieldBits = 254;
constexpr size_t kPartialRounds[] = {0, 0, 56, 57, 56, 60};

// 80-bit Grain LFSR seeded with the parameter description.
class Grain {
 public:
  Grain(size_t width, size_t full, size_t partial) {
    size_t pos = 0;
    auto put = [&](uint64_t v, size_t nbits) {
      for (size_t i = nbits; i-- > 0;) state_[pos++] = (v >> i) & 1;
    };
    put(1, 2);  // prime field
    put(0, 4);  // x^alpha S-box
    put(kFieldBits, 12);
    put(width, 12);
    put(full, 10);
    put(partial, 10);
    put((uint64_t{1} << 30) - 1, 30);
    for (int i = 0; i < 160; ++i) step();
  }

  U256 next_u254() {
    U256 v;
    for (size_t i = 0; i < kFieldBits; ++i) {
      v = v.shl(1);
      v.limb[0] |= next_bit();
    }
    return v;
  }

 private:
  bool step() {
    const bool b = state_[62] ^ state_[51] ^ state_[38] ^ state_[23] ^
                   state_[13] ^ state_[0];
    for (size_t i = 0; i + 1 < 80; ++i) state_[i] = state_[i + 1];
    state_[79] = b;
    return b;
  }
  uint64_t next_bit() {
    while (true) {
      const bool a = step();
      const bool b = step();
      if (a) return b ? 1 : 0;
    }
  }

  std::bitset<80> state_;
};

PoseidonParams generate(size_t width) {
  PoseidonParams p;
  p.width = width;
  p.full_rounds = kFullRounds;
  p.partial_rounds = kPartialRounds[width];
  Grain g(width, p.full_rounds, p.partial_rounds);
  const size_t count = (p.full_rounds + p.partial_rounds) * width;
  while (p.round_constants.size() < count) {
    if (auto v = Fr::from_canonical(g.next_u254())) p.round_constants.push_back(*v);
  }
  while (true) {
    std::vector<Fr> vals;
    for (size_t i = 0; i < 2 * width; ++i) vals.push_back(Fr::from_u256_reduce(g.next_u254()));
    std::set<U256> distinct;
    for (const Fr& v : vals) distinct.insert(v.to_canonical());
    if (distinct.size() != vals.size()) continue;
    bool ok = true;
    for (size_t i = 0; i < width && ok; ++i) {
      for (size_t j = 0; j < width && ok; ++j) ok = !(vals[i] + vals[width + j]).is_zero();
    }
    if (!ok) continue;
    p.mds.assign(width, std::vector<Fr>(width));
    for (size_t i = 0; i < width; ++i) {
      for (size_t j = 0; j < width; ++j) p.mds[i][j] = (vals[i] + vals[width + j]).inverse();
    }
    return p;
  }
}

Fr pow5(const Fr& x) {
  const Fr x2 = x.square();
  return x2.square() * x;
}

}  // namespace

const PoseidonParams& poseidon_params(size_t arity) {
  if (arity < 1 || arity > 4) {
    throw Error(ErrorCode::kUnsupportedArity, "arity " + std::to_string(arity));
  }
  static std::once_flag once[4];
  static PoseidonParams params[4];
  std::call_once(once[arity - 1], [arity] { params[arity - 1] = generate(arity + 1); });
  return params[arity - 1];
}

Fr poseidon(std::span<const Fr> inputs) {
  const PoseidonParams& p = poseidon_params(inputs.size());
  const size_t t = p.width;
  std::vector<Fr> state(t), next(t);
  std::copy(inputs.begin(), inputs.end(), state.begin() + 1);
  for (size_t r = 0; r < p.full_rounds + p.partial_rounds; ++r) {
    for (size_t i = 0; i < t; ++i) state[i] += p.constant(r, i);
    if (p.is_full_round(r)) {
      for (Fr& s : state) s = pow5(s);
    } else {
      state[0] = pow5(state[0]);
    }
    for (size_t i = 0; i < t; ++i) {
      Fr acc;
      for (size_t j = 0; j < t; ++j) acc += p.mds[i][j] * state[j];
      next[i] = acc;
    }
    state.swap(next);
  }
  return state[0];
}

std::vector<Fr> pack_bytes(std::span<const uint8_t> padded, size_t length) {
  if (padded.size() != length) {
    throw Error(ErrorCode::kWrongLength, "expected " + std::to_string(length) +
                                             " bytes, got " +
                                             std::to_string(padded.size()));
  }
  std::vector<Fr> limbs;
  for (size_t start = 0; start < padded.size(); start += kLimbBytes) {
    const size_t len = std::min(kLimbBytes, padded.size() - start);
    std::array<uint8_t, 32> buf{};
    std::copy_n(padded.begin() + static_cast<long>(start), len,
                buf.begin() + static_cast<long>(32 - len));
    limbs.push_back(*Fr::from_canonical(U256::from_be_bytes(buf)));
  }
  return limbs;
}

Fr message_digest(const AuditMessage& msg, size_t max_json) {
  const auto padded = pad_message(msg.raw, max_json);
  std::vector<Fr> in = pack_bytes(padded, max_json);
  in.push_back(Fr::from_u64(msg.total_len));
  return poseidon(in);
}

}  // namespace zkmcp
