#include <random>

#include <gtest/gtest.h>

#include "zkmcp/circuit.hpp"
#include "zkmcp/errors.hpp"
#include "zkmcp/hashing.hpp"

namespace zkmcp {
namespace {

const ConstraintSystem& circuit(size_t n) {
  static std::map<size_t, ConstraintSystem> cache;
  auto it = cache.find(n);
  if (it == cache.end()) {
    CircuitParams p;
    p.n = n;
    it = cache.emplace(n, build_circuit(p, TypeTable::defaults())).first;
  }
  return it->second;
}

std::vector<AuditMessage> random_session(size_t n, std::mt19937_64& rng) {
  const TypeTable table = TypeTable::defaults();
  std::vector<AuditMessage> msgs;
  for (size_t i = 0; i < n; ++i) {
    msgs.push_back(AuditMessage::from_type(table[rng() % table.size()]));
  }
  return msgs;
}

std::vector<Fr> as_field(const std::vector<uint64_t>& v) {
  std::vector<Fr> out;
  for (auto c : v) out.push_back(Fr::from_u64(c));
  return out;
}

std::vector<RawMessage> to_raw(const std::vector<AuditMessage>& msgs) {
  std::vector<RawMessage> out;
  for (const auto& m : msgs) out.push_back({pad_message(m.raw), m.type_len});
  return out;
}

TEST(BuildCircuitTest, PublicLayoutAndSize) {
  const auto& cs = circuit(1);
  EXPECT_EQ(cs.num_inputs, 9u);
  EXPECT_EQ(cs.constraint_count(), 961u + 8u);
  EXPECT_EQ(cs.a.rows(), cs.b.rows());
  EXPECT_EQ(cs.a.cols, cs.num_variables);
  const auto meta = cs.metadata();
  EXPECT_EQ(meta["n"], 1);
  EXPECT_EQ(meta["public_layout"][0]["length"], 8);
  EXPECT_EQ(meta["public_layout"][1]["offset"], 8);
  EXPECT_EQ(meta["public_layout"][1]["length"], 1);
  EXPECT_EQ(meta["type_table_digest"], cs.type_table_digest);
}

TEST(BuildCircuitTest, LinearGrowth) {
  size_t prev_c = circuit(4).constraint_count();
  size_t prev_w = circuit(4).wire_count();
  for (size_t n = 8; n <= 128; n *= 2) {
    CircuitParams p;
    p.n = n;
    const auto cs = build_circuit(p, TypeTable::defaults());
    const double rc = static_cast<double>(cs.constraint_count()) / static_cast<double>(prev_c);
    const double rw = static_cast<double>(cs.wire_count()) / static_cast<double>(prev_w);
    EXPECT_GE(rc, 1.8);
    EXPECT_LE(rc, 2.2);
    EXPECT_GE(rw, 1.8);
    EXPECT_LE(rw, 2.2);
    prev_c = cs.constraint_count();
    prev_w = cs.wire_count();
  }
}

TEST(BuildCircuitTest, RejectsBadParams) {
  CircuitParams p;
  auto entries = TypeTable::defaults().entries();
  entries.pop_back();
  try {
    build_circuit(p, TypeTable(entries));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidParams);
  }
  p.n = 0;
  EXPECT_THROW(build_circuit(p, TypeTable::defaults()), Error);
}

TEST(BuildCircuitTest, CircuitIdDependsOnTable) {
  CircuitParams p;
  auto entries = TypeTable::defaults().entries();
  std::swap(entries[0], entries[1]);
  const auto other = build_circuit(p, TypeTable(entries));
  EXPECT_NE(other.circuit_id(), circuit(1).circuit_id());
  EXPECT_EQ(other.constraint_count(), circuit(1).constraint_count());
}

TEST(SynthesizeTest, ThreeRequestsFiveResponses) {
  std::vector<AuditMessage> msgs;
  for (int i = 0; i < 3; ++i) msgs.push_back(AuditMessage::from_type("request"));
  for (int i = 0; i < 5; ++i) msgs.push_back(AuditMessage::from_type("response"));
  const auto& cs = circuit(8);
  const auto [w, x] = synthesize_witness(cs, msgs);
  EXPECT_EQ(x.counts, as_field({3, 5, 0, 0, 0, 0, 0, 0}));
  for (size_t i = 0; i < 8; ++i) EXPECT_EQ(x.hashes[i], message_digest(msgs[i]));
  EXPECT_TRUE(check_relation(cs, x, w));
  EXPECT_EQ(w.aux.size(), cs.num_aux());
}

TEST(SynthesizeTest, SinglePing) {
  const std::vector<AuditMessage> msgs{AuditMessage::from_type("ping")};
  const auto [w, x] = synthesize_witness(circuit(1), msgs);
  EXPECT_EQ(x.counts, as_field({0, 0, 0, 0, 1, 0, 0, 0}));
  EXPECT_EQ(x.hashes[0].to_decimal(),
            "15603099227172716070380910437883064302426937755958214667656371112046430280532");
}

TEST(SynthesizeTest, RejectsBadInput) {
  const auto& cs = circuit(1);
  auto expect_code = [&](std::vector<AuditMessage> msgs, ErrorCode code) {
    try {
      synthesize_witness(cs, msgs);
      ADD_FAILURE() << "accepted";
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), code) << e.what();
    }
  };
  AuditMessage trailing = AuditMessage::from_type("ping");
  trailing.raw += "x";
  expect_code({trailing}, ErrorCode::kMalformedMessage);
  AuditMessage lying = AuditMessage::from_type("ping");
  lying.type_string = "request";
  expect_code({lying}, ErrorCode::kMalformedMessage);
  expect_code({AuditMessage::from_type("bogus")}, ErrorCode::kUnknownType);
  expect_code({}, ErrorCode::kWrongMessageCount);
  expect_code({AuditMessage::from_type("ping"), AuditMessage::from_type("ping")},
              ErrorCode::kWrongMessageCount);
}

TEST(CheckRelationTest, Perturbations) {
  std::mt19937_64 rng(5);
  const auto& cs = circuit(8);
  const auto [w, x] = synthesize_witness(cs, random_session(8, rng));
  EXPECT_TRUE(check_relation(cs, x, w));
  auto bumped = x;
  bumped.counts[0] += Fr::one();
  EXPECT_FALSE(check_relation(cs, bumped, w));
  auto rehashed = x;
  rehashed.hashes[3] = Fr::from_u64(rng());
  EXPECT_FALSE(check_relation(cs, rehashed, w));
  auto short_x = x;
  short_x.hashes.pop_back();
  EXPECT_THROW(check_relation(cs, short_x, w), Error);
  auto short_w = w;
  short_w.aux.pop_back();
  EXPECT_THROW(check_relation(cs, x, short_w), Error);
}

TEST(CheckRelationTest, OracleEquivalence) {
  std::mt19937_64 rng(6);
  const auto& cs = circuit(8);
  const TypeTable table = TypeTable::defaults();
  for (int trial = 0; trial < 100; ++trial) {
    const auto msgs = random_session(8, rng);
    const auto [w, x] = synthesize_witness(cs, msgs);
    ASSERT_EQ(x.counts, as_field(count_types(msgs, table)));
    Fr total;
    for (const Fr& c : x.counts) total += c;
    EXPECT_EQ(total, Fr::from_u64(8));
    const WitnessView view(cs, w);
    for (size_t i = 0; i < 8; ++i) {
      Fr row;
      for (size_t j = 0; j < 8; ++j) {
        const Fr mij = view.match(i, j);
        EXPECT_TRUE(mij.is_zero() || mij == Fr::one());
        row += mij;
      }
      EXPECT_EQ(row, Fr::one());
      EXPECT_EQ(view.type_len(i), Fr::from_u64(msgs[i].type_len));
      for (size_t m = 0; m < msgs[i].raw.size(); ++m) {
        EXPECT_EQ(view.byte(i, m), Fr::from_u64(static_cast<uint8_t>(msgs[i].raw[m])));
      }
    }
    for (size_t j = 0; j < 8; ++j) EXPECT_EQ(view.sum(j, 8), x.counts[j]);
  }
}

// Honest prover arithmetic applied to a buffer that hides data after the
// envelope: the digest is consistent, so only the padding rows can fail.
TEST(CheckRelationTest, PaddingSoundness) {
  std::mt19937_64 rng(7);
  const auto& cs = circuit(1);
  for (int trial = 0; trial < 50; ++trial) {
    auto raw = to_raw(random_session(1, rng));
    const size_t total = raw[0].type_len + kEnvelopeOverhead;
    const size_t pos = total + rng() % (64 - total);
    raw[0].padded[pos] = static_cast<uint8_t>(1 + rng() % 255);
    const auto [w, x] = synthesize_raw(cs, raw);
    EXPECT_FALSE(check_relation(cs, x, w)) << "pos " << pos;
  }
  // Same construction without the hidden byte is accepted.
  const auto raw = to_raw(random_session(1, rng));
  const auto [w, x] = synthesize_raw(cs, raw);
  EXPECT_TRUE(check_relation(cs, x, w));
}

TEST(CheckRelationTest, AdversarialEnvelopes) {
  const auto& cs = circuit(1);
  auto rejects = [&](std::string bytes, size_t type_len) {
    RawMessage m{pad_message(bytes), type_len};
    const auto [w, x] = synthesize_raw(cs, std::vector<RawMessage>{m});
    return !check_relation(cs, x, w);
  };
  EXPECT_FALSE(rejects("{\"type\": \"ping\"}", 4));
  // Type not in the table.
  EXPECT_TRUE(rejects("{\"type\": \"pong\"}", 4));
  // Wrong prefix.
  EXPECT_TRUE(rejects("{\"kind\": \"ping\"}", 4));
  // Claimed length disagrees with the suffix position.
  EXPECT_TRUE(rejects("{\"type\": \"ping\"}", 5));
  EXPECT_TRUE(rejects("{\"type\": \"ping\"}", 3));
  // A NUL inside the type must not alias the shorter entry.
  EXPECT_TRUE(rejects(std::string("{\"type\": \"ping") + '\0' + "\"}", 5));
  // type_len outside 1..20 selects nothing.
  EXPECT_TRUE(rejects("{\"type\": \"ping\"}", 0));
  EXPECT_TRUE(rejects("{\"type\": \"ping\"}", 21));
  // Prefix of a longer entry.
  EXPECT_TRUE(rejects("{\"type\": \"req\"}", 3));
}

TEST(StatementTest, JsonRoundTrip) {
  std::mt19937_64 rng(8);
  const auto [w, x] = synthesize_witness(circuit(2), random_session(2, rng));
  const auto j = x.to_json();
  EXPECT_EQ(PublicStatement::from_json(j), x);
  auto bad = j;
  bad["hashes"][0] = "21888242871839275222246405745257275088548364400416034343698204186575808495617";
  EXPECT_THROW(PublicStatement::from_json(bad), Error);
  bad["hashes"][0] = 5;
  EXPECT_THROW(PublicStatement::from_json(bad), Error);
}

}  // namespace
}  // namespace zkmcp
