#include "zkmcp/circuit.hpp"

#include "circuit/builder.hpp"
#include "zkmcp/errors.hpp"
#include "zkmcp/hashing.hpp"

namespace zkmcp {

namespace {

using detail::ShapeBuilder;
using detail::WitnessBuilder;

// The packed type value carries type_len * 256^max_type, so max_type bytes
// plus one length byte must fit below p.
constexpr size_t kMaxTypeLimit = 30;
constexpr uint64_t kQuote = '"';
constexpr uint64_t kBrace = '}';

struct Context {
  CircuitParams params;
  std::vector<Fr> packed_entries;  // per table entry, same packing as T
  const PoseidonParams* poseidon = nullptr;
  size_t limbs = 0;
};

Fr pow256(size_t k) { return Fr::from_u64(256).pow(U256(k)); }

Fr pack_type(std::string_view type, size_t max_type) {
  Fr acc;
  for (size_t k = 0; k < type.size(); ++k) {
    acc += Fr::from_u64(static_cast<uint8_t>(type[k])) * pow256(k);
  }
  return acc + Fr::from_u64(type.size()) * pow256(max_type);
}

Context make_context(const CircuitParams& params, const TypeTable& table) {
  Context ctx;
  ctx.params = params;
  for (const auto& e : table.entries()) ctx.packed_entries.push_back(pack_type(e, params.max_type));
  ctx.limbs = (params.max_json + kLimbBytes - 1) / kLimbBytes;
  ctx.poseidon = &poseidon_params(ctx.limbs + 1);
  return ctx;
}

template <class B>
typename B::Lc sbox(B& b, const typename B::Lc& x) {
  const Fr xv = B::value(x);
  const auto x2 = b.alloc(xv.square());
  b.enforce(x, x, x2);
  const auto x4 = b.alloc(B::value(x2).square());
  b.enforce(x2, x2, x4);
  const auto x5 = b.alloc(B::value(x4) * xv);
  b.enforce(x4, x, x5);
  return x5;
}

template <class B>
typename B::Lc poseidon_gadget(B& b, const PoseidonParams& p,
                               const std::vector<typename B::Lc>& inputs) {
  using Lc = typename B::Lc;
  const size_t t = p.width;
  std::vector<Lc> state(t, b.zero());
  for (size_t i = 0; i < inputs.size(); ++i) state[i + 1] = inputs[i];
  for (size_t r = 0; r < p.full_rounds + p.partial_rounds; ++r) {
    for (size_t i = 0; i < t; ++i) state[i] = state[i] + b.constant(p.constant(r, i));
    if (p.is_full_round(r)) {
      for (auto& s : state) s = sbox(b, s);
    } else {
      state[0] = sbox(b, state[0]);
    }
    std::vector<Lc> next(t, b.zero());
    for (size_t i = 0; i < t; ++i) {
      for (size_t j = 0; j < t; ++j) next[i] = next[i] + state[j] * p.mds[i][j];
    }
    state = std::move(next);
  }
  return state[0];
}

// One message: format validation, type extraction, matching, running
// counts, digest, padding. Returns the offsets of its wire block.
template <class B>
MessageLayout message_gadget(B& b, const Context& ctx, size_t index,
                             std::span<const uint8_t> padded, size_t type_len,
                             std::vector<typename B::Lc>& sums) {
  using Lc = typename B::Lc;
  const size_t L = ctx.params.max_json;
  const size_t M = ctx.params.max_type;
  const size_t K = ctx.params.num_types;
  const size_t base = b.next_aux();
  MessageLayout lay;

  // Byte range: eight boolean wires per byte.
  lay.bits = b.next_aux() - base;
  std::vector<Lc> bytes(L, b.zero());
  for (size_t m = 0; m < L; ++m) {
    Fr weight = Fr::one();
    for (size_t k = 0; k < 8; ++k) {
      const Lc bit = b.alloc(Fr::from_u64((padded[m] >> k) & 1));
      b.enforce(bit, bit - b.one(), b.zero());
      bytes[m] = bytes[m] + bit * weight;
      weight = weight.dbl();
    }
  }

  // Fixed prefix.
  for (size_t m = 0; m < kEnvelopePrefix.size(); ++m) {
    const Fr expected = Fr::from_u64(static_cast<uint8_t>(kEnvelopePrefix[m]));
    b.enforce(bytes[m] - b.constant(expected), b.one(), b.zero());
  }

  // type_len as a one-hot selector over 1..M.
  lay.type_len = b.next_aux() - base;
  const Lc tl = b.alloc(Fr::from_u64(type_len));
  lay.sel = b.next_aux() - base;
  std::vector<Lc> sel(M + 1, b.zero());
  Lc sel_sum = b.zero(), sel_weighted = b.zero();
  for (size_t t = 1; t <= M; ++t) {
    sel[t] = b.alloc(t == type_len ? Fr::one() : Fr::zero());
    b.enforce(sel[t], sel[t] - b.one(), b.zero());
    sel_sum = sel_sum + sel[t];
    sel_weighted = sel_weighted + sel[t] * Fr::from_u64(t);
  }
  b.enforce(sel_sum, b.one(), b.one());
  b.enforce(sel_weighted, b.one(), tl);

  // Suffix `"}` at type_len + 10, type_len + 11.
  const Fr suffix = Fr::from_u64(kQuote + 256 * kBrace);
  for (size_t t = 1; t <= M; ++t) {
    const Lc pair = bytes[t + 10] + bytes[t + 11] * Fr::from_u64(256);
    b.enforce(sel[t], pair - b.constant(suffix), b.zero());
  }

  // Zero padding: ge[m] = [m >= type_len + 12] = sum of sel[t] with t + 12 <= m.
  Lc ge = b.zero();
  for (size_t m = 0; m < L; ++m) {
    if (m >= 13 && m - 12 <= M) ge = ge + sel[m - 12];
    if (m >= 13) b.enforce(bytes[m], ge, b.zero());
  }

  // Type extraction: type[k] = json[10 + k] * [k < type_len].
  lay.type = b.next_aux() - base;
  Lc packed = tl * pow256(M);
  Lc lt = sel_sum;  // [type_len > k] = sum of sel[t] for t > k
  for (size_t k = 0; k < M; ++k) {
    if (k > 0) lt = lt - sel[k];
    const Lc byte = bytes[10 + k];
    const Lc tk = b.alloc(B::value(byte) * B::value(lt));
    b.enforce(byte, lt, tk);
    packed = packed + tk * pow256(k);
  }

  // Matching: match_j = [packed == entry_j] via an inverse witness.
  lay.inv = b.next_aux() - base;
  std::vector<Lc> diff(K, b.zero()), inv(K, b.zero()), match(K, b.zero());
  for (size_t j = 0; j < K; ++j) {
    diff[j] = packed - b.constant(ctx.packed_entries[j]);
    const Fr d = B::value(diff[j]);
    inv[j] = b.alloc(d.is_zero() ? Fr::zero() : d.inverse());
  }
  lay.match = b.next_aux() - base;
  Lc match_sum = b.zero();
  for (size_t j = 0; j < K; ++j) {
    match[j] = b.alloc(B::value(diff[j]).is_zero() ? Fr::one() : Fr::zero());
    b.enforce(diff[j], inv[j], b.one() - match[j]);
    b.enforce(diff[j], match[j], b.zero());
    match_sum = match_sum + match[j];
  }
  b.enforce(match_sum, b.one(), b.one());

  // Running counts.
  lay.sum = b.next_aux() - base;
  for (size_t j = 0; j < K; ++j) {
    const Lc next = sums[j] + match[j];
    const Lc s = b.alloc(B::value(next));
    b.enforce(next, b.one(), s);
    sums[j] = s;
  }

  // Digest over big-endian limbs and total_len.
  lay.hash = b.next_aux() - base;
  std::vector<Lc> hash_in;
  for (size_t start = 0; start < L; start += kLimbBytes) {
    const size_t end = std::min(L, start + kLimbBytes);
    Lc limb = b.zero();
    for (size_t m = start; m < end; ++m) limb = limb + bytes[m] * pow256(end - 1 - m);
    hash_in.push_back(limb);
  }
  hash_in.push_back(tl + b.constant(Fr::from_u64(kEnvelopeOverhead)));
  b.bind_input(K + index, poseidon_gadget(b, *ctx.poseidon, hash_in));

  lay.stride = b.next_aux() - base;
  return lay;
}

template <class B>
MessageLayout synthesize_all(B& b, const Context& ctx, std::span<const RawMessage> msgs) {
  const size_t K = ctx.params.num_types;
  std::vector<typename B::Lc> sums(K, b.zero());
  MessageLayout layout;
  for (size_t i = 0; i < ctx.params.n; ++i) {
    layout = message_gadget(b, ctx, i, msgs[i].padded, msgs[i].type_len, sums);
  }
  for (size_t j = 0; j < K; ++j) b.bind_input(j, sums[j]);
  return layout;
}

std::string hex_prefix(const std::string& decimal, size_t chars) {
  U256 v;
  U256::parse_decimal(decimal, v);
  return v.to_hex().substr(2, chars);
}

}  // namespace

std::string type_table_digest(const TypeTable& table, size_t max_json) {
  Fr h;
  for (const auto& e : table.entries()) {
    const Fr d = message_digest(AuditMessage::from_type(e), max_json);
    h = poseidon(std::vector<Fr>{h, d});
  }
  return h.to_decimal();
}

std::string ConstraintSystem::circuit_id() const {
  return "zkmcp-n" + std::to_string(params.n) + "-L" + std::to_string(params.max_json) +
         "-T" + std::to_string(params.max_type) + "-K" + std::to_string(params.num_types) +
         "-" + hex_prefix(type_table_digest, 12);
}

nlohmann::json ConstraintSystem::metadata() const {
  return {
      {"circuit_id", circuit_id()},
      {"n", params.n},
      {"max_json", params.max_json},
      {"max_type", params.max_type},
      {"num_types", params.num_types},
      {"type_table", table.entries()},
      {"type_table_digest", type_table_digest},
      {"constraint_count", constraint_count()},
      {"wire_count", wire_count()},
      {"public_layout",
       nlohmann::json::array({{{"name", "counts"}, {"offset", 0}, {"length", params.num_types}},
                              {{"name", "hashes"}, {"offset", params.num_types}, {"length", params.n}}})},
  };
}

std::vector<Fr> PublicStatement::inputs() const {
  std::vector<Fr> out = counts;
  out.insert(out.end(), hashes.begin(), hashes.end());
  return out;
}

nlohmann::json PublicStatement::to_json() const {
  nlohmann::json c = nlohmann::json::array(), h = nlohmann::json::array();
  for (const Fr& v : counts) c.push_back(v.to_decimal());
  for (const Fr& v : hashes) h.push_back(v.to_decimal());
  return {{"counts", c}, {"hashes", h}};
}

PublicStatement PublicStatement::from_json(const nlohmann::json& j) {
  auto read = [](const nlohmann::json& arr, const char* what) {
    if (!arr.is_array()) throw Error(ErrorCode::kBadFieldElement, std::string(what) + " not a list");
    std::vector<Fr> out;
    for (const auto& v : arr) {
      if (!v.is_string()) throw Error(ErrorCode::kBadFieldElement, "expected decimal string");
      auto f = Fr::from_decimal(v.get<std::string>());
      if (!f) throw Error(ErrorCode::kBadFieldElement, "'" + v.get<std::string>() + "'");
      out.push_back(*f);
    }
    return out;
  };
  if (!j.is_object() || !j.contains("counts") || !j.contains("hashes")) {
    throw Error(ErrorCode::kBadFieldElement, "statement needs counts and hashes");
  }
  return {read(j.at("counts"), "counts"), read(j.at("hashes"), "hashes")};
}

ConstraintSystem build_circuit(const CircuitParams& params, const TypeTable& table) {
  params.validate();
  if (params.max_type > kMaxTypeLimit) {
    throw Error(ErrorCode::kInvalidParams, "max_type above 30 is unsupported");
  }
  if (table.size() != params.num_types) {
    throw Error(ErrorCode::kInvalidParams,
                "table has " + std::to_string(table.size()) + " entries, expected " +
                    std::to_string(params.num_types));
  }
  for (const auto& e : table.entries()) {
    if (e.size() > params.max_type) {
      throw Error(ErrorCode::kInvalidParams, "table entry '" + e + "' exceeds max_type");
    }
  }
  const Context ctx = make_context(params, table);
  ConstraintSystem cs;
  cs.params = params;
  cs.table = table;
  cs.num_inputs = params.num_types + params.n;
  cs.type_table_digest = type_table_digest(table, params.max_json);

  ShapeBuilder b(cs.num_inputs);
  const std::vector<RawMessage> blanks(
      params.n, RawMessage{std::vector<uint8_t>(params.max_json, 0), 0});
  cs.layout = synthesize_all(b, ctx, blanks);
  cs.num_variables = b.num_variables();
  cs.a = b.take_a();
  cs.b = b.take_b();
  cs.c = b.take_c();
  return cs;
}

std::pair<Witness, PublicStatement> synthesize_raw(const ConstraintSystem& cs,
                                                   std::span<const RawMessage> messages) {
  const auto& p = cs.params;
  if (messages.size() != p.n) {
    throw Error(ErrorCode::kWrongMessageCount, std::to_string(messages.size()) +
                                                   " messages for a circuit of n=" +
                                                   std::to_string(p.n));
  }
  for (const auto& m : messages) {
    if (m.padded.size() != p.max_json) {
      throw Error(ErrorCode::kMalformedMessage, "padded buffer has wrong length");
    }
  }
  const Context ctx = make_context(p, cs.table);
  WitnessBuilder b(cs.num_inputs);
  synthesize_all(b, ctx, messages);
  PublicStatement x;
  auto& in = b.inputs();
  x.counts.assign(in.begin(), in.begin() + static_cast<long>(p.num_types));
  x.hashes.assign(in.begin() + static_cast<long>(p.num_types), in.end());
  return {Witness{std::move(b.aux())}, std::move(x)};
}

std::pair<Witness, PublicStatement> synthesize_witness(
    const ConstraintSystem& cs, std::span<const AuditMessage> messages) {
  const auto& p = cs.params;
  if (messages.size() != p.n) {
    throw Error(ErrorCode::kWrongMessageCount, std::to_string(messages.size()) +
                                                   " messages for a circuit of n=" +
                                                   std::to_string(p.n));
  }
  std::vector<RawMessage> raw;
  raw.reserve(messages.size());
  for (size_t i = 0; i < messages.size(); ++i) {
    const AuditMessage& m = messages[i];
    const std::string where = "message " + std::to_string(i) + ": ";
    if (m.raw.size() != m.total_len || m.total_len != m.type_len + kEnvelopeOverhead ||
        m.raw.size() > p.max_json) {
      throw Error(ErrorCode::kMalformedMessage, where + "length fields disagree with raw bytes");
    }
    std::string extracted;
    try {
      extracted = extract_type(m.raw, p.max_json);
    } catch (const Error& e) {
      throw Error(ErrorCode::kMalformedMessage, where + e.what());
    }
    if (extracted != m.type_string) {
      throw Error(ErrorCode::kMalformedMessage, where + "type_string differs from envelope");
    }
    if (m.type_len < 1 || m.type_len > p.max_type) {
      throw Error(ErrorCode::kMalformedMessage, where + "type_len out of range");
    }
    if (!cs.table.index_of(m.type_string)) {
      throw Error(ErrorCode::kUnknownType, where + "'" + m.type_string + "'");
    }
    raw.push_back({pad_message(m.raw, p.max_json), m.type_len});
  }
  auto out = synthesize_raw(cs, raw);
  if (auto bad = first_unsatisfied(cs, out.second, out.first)) {
    throw Error(ErrorCode::kMalformedMessage,
                "constraint " + std::to_string(*bad) + " unsatisfied");
  }
  return out;
}

void check_statement_shape(const ConstraintSystem& cs, const PublicStatement& x) {
  if (x.counts.size() != cs.params.num_types || x.hashes.size() != cs.params.n) {
    throw Error(ErrorCode::kShapeMismatch,
                "statement has " + std::to_string(x.counts.size()) + " counts and " +
                    std::to_string(x.hashes.size()) + " hashes, circuit expects " +
                    std::to_string(cs.params.num_types) + " and " +
                    std::to_string(cs.params.n));
  }
}

std::vector<Fr> full_assignment(const ConstraintSystem& cs, const PublicStatement& x,
                                const Witness& w) {
  check_statement_shape(cs, x);
  if (w.aux.size() != cs.num_aux()) {
    throw Error(ErrorCode::kShapeMismatch, "witness has " + std::to_string(w.aux.size()) +
                                               " wires, circuit expects " +
                                               std::to_string(cs.num_aux()));
  }
  std::vector<Fr> z;
  z.reserve(cs.num_variables);
  z.push_back(Fr::one());
  z.insert(z.end(), x.counts.begin(), x.counts.end());
  z.insert(z.end(), x.hashes.begin(), x.hashes.end());
  z.insert(z.end(), w.aux.begin(), w.aux.end());
  return z;
}

std::optional<size_t> first_unsatisfied(const ConstraintSystem& cs,
                                        const PublicStatement& x, const Witness& w,
                                        Exec exec) {
  const auto z = full_assignment(cs, x, w);
  const size_t rows = cs.constraint_count();
  std::vector<Fr> az(rows), bz(rows), cz(rows);
  spmv(cs.a, z, az, exec);
  spmv(cs.b, z, bz, exec);
  spmv(cs.c, z, cz, exec);
  for (size_t r = 0; r < rows; ++r) {
    if (az[r] * bz[r] != cz[r]) return r;
  }
  return std::nullopt;
}

bool check_relation(const ConstraintSystem& cs, const PublicStatement& x,
                    const Witness& w) {
  return !first_unsatisfied(cs, x, w).has_value();
}

Fr WitnessView::byte(size_t i, size_t m) const {
  Fr acc, weight = Fr::one();
  for (size_t k = 0; k < 8; ++k) {
    acc += at(i, cs_.layout.bits + 8 * m + k) * weight;
    weight = weight.dbl();
  }
  return acc;
}

}  // namespace zkmcp
