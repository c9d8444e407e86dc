#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "test_util.hpp"
#include "zkmcp/errors.hpp"
#include "zkmcp/hashing.hpp"
#include "zkmcp/proof/groth16.hpp"
#include "zkmcp/proof_system.hpp"

namespace zkmcp {
namespace {

using testing::random_session;

const CrsBundle& crs_for(size_t n, Backend backend = Backend::kGroth16) {
  static std::map<std::pair<size_t, Backend>, CrsBundle> cache;
  const auto key = std::make_pair(n, backend);
  auto it = cache.find(key);
  if (it == cache.end()) {
    CircuitParams p;
    p.n = n;
    it = cache.emplace(key, setup(p, TypeTable::defaults(), backend)).first;
  }
  return it->second;
}

// verify() outcome with MalformedProof folded into a rejection.
bool accepts(const CrsBundle& crs, const ProofBundle& p) {
  try {
    return verify(crs, p);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMalformedProof) << e.what();
    return false;
  }
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::kIoFailure;
}

TEST(SetupTest, MetadataAndOracleKeys) {
  const auto& real = crs_for(8);
  EXPECT_EQ(real.n(), 8u);
  EXPECT_EQ(real.backend_id, kGroth16BackendId);
  EXPECT_EQ(real.hash_params_id, kHashParamsId);
  EXPECT_FALSE(real.proving_key.empty());
  EXPECT_FALSE(real.verification_key.empty());
  const auto& oracle = crs_for(8, Backend::kInsecureOracle);
  EXPECT_EQ(oracle.backend_id, "insecure-oracle");
  EXPECT_TRUE(oracle.proving_key.empty());
  EXPECT_TRUE(oracle.verification_key.empty());
  EXPECT_EQ(oracle.circuit_id(), real.circuit_id());
  EXPECT_EQ(code_of([] { parse_backend("plonk"); }), ErrorCode::kBackendUnavailable);
}

TEST(SetupTest, TwoSetupsBothComplete) {
  CircuitParams p;
  const auto s1 = setup(p, TypeTable::defaults(), Backend::kGroth16);
  const auto s2 = setup(p, TypeTable::defaults(), Backend::kGroth16);
  EXPECT_NE(s1.verification_key, s2.verification_key);
  EXPECT_NE(s1.proving_key, s2.proving_key);
  std::mt19937_64 rng(11);
  const auto [w, x] = synthesize_witness(*s1.circuit, random_session(1, rng));
  const auto p1 = prove(s1, x, w);
  const auto p2 = prove(s2, x, w);
  EXPECT_TRUE(verify(s1, p1));
  EXPECT_TRUE(verify(s2, p2));
  // Keys are independent: a proof does not carry over to another setup.
  EXPECT_FALSE(verify(s2, p1));
}

TEST(ProveTest, CompletenessAcrossSizes) {
  std::mt19937_64 rng(12);
  for (size_t n : {1u, 2u, 4u, 8u}) {
    const auto& crs = crs_for(n);
    for (int trial = 0; trial < 2; ++trial) {
      const auto [w, x] = synthesize_witness(*crs.circuit, random_session(n, rng));
      const auto p = prove(crs, x, w, "s-" + std::to_string(n));
      EXPECT_EQ(p.proof.size(), groth16::Proof::kBytes);
      EXPECT_EQ(p.s_id, "s-" + std::to_string(n));
      EXPECT_GT(p.created_at_ms, 0);
      EXPECT_TRUE(verify(crs, p)) << "n=" << n;
    }
  }
}

TEST(ProveTest, RefusesFalseStatements) {
  std::mt19937_64 rng(13);
  for (Backend b : {Backend::kGroth16, Backend::kInsecureOracle}) {
    const auto& crs = crs_for(2, b);
    const auto [w, x] = synthesize_witness(*crs.circuit, random_session(2, rng));
    auto bumped = x;
    bumped.counts[0] += Fr::one();
    EXPECT_EQ(code_of([&] { prove(crs, bumped, w); }), ErrorCode::kRelationUnsatisfied);
    auto short_x = x;
    short_x.hashes.pop_back();
    EXPECT_EQ(code_of([&] { prove(crs, short_x, w); }), ErrorCode::kShapeMismatch);
  }
}

TEST(VerifyTest, PerturbationsRejected) {
  std::mt19937_64 rng(14);
  const auto& crs = crs_for(4);
  const auto [w, x] = synthesize_witness(*crs.circuit, random_session(4, rng));
  const auto honest = prove(crs, x, w);
  ASSERT_TRUE(verify(crs, honest));
  for (size_t j = 0; j < x.counts.size(); ++j) {
    for (const Fr& d : {Fr::one(), -Fr::one()}) {
      auto p = honest;
      p.statement.counts[j] += d;
      EXPECT_FALSE(verify(crs, p)) << "count " << j;
    }
    for (size_t k = j + 1; k < x.counts.size(); ++k) {
      if (x.counts[j] == x.counts[k]) continue;
      auto p = honest;
      std::swap(p.statement.counts[j], p.statement.counts[k]);
      EXPECT_FALSE(verify(crs, p)) << "swap " << j << "," << k;
    }
  }
  for (size_t i = 0; i < x.hashes.size(); ++i) {
    auto p = honest;
    p.statement.hashes[i] = testing::random_element<Fr>(rng);
    EXPECT_FALSE(verify(crs, p)) << "hash " << i;
  }
  for (int trial = 0; trial < 16; ++trial) {
    auto p = honest;
    p.proof[rng() % p.proof.size()] ^= static_cast<uint8_t>(1u << (rng() % 8));
    EXPECT_FALSE(accepts(crs, p));
  }
}

TEST(VerifyTest, RandomBytes) {
  std::mt19937_64 rng(15);
  const auto& crs = crs_for(1);
  const auto [w, x] = synthesize_witness(*crs.circuit, random_session(1, rng));
  auto p = prove(crs, x, w);
  for (size_t len : {192u, 256u}) {
    for (int trial = 0; trial < 10; ++trial) {
      p.proof.resize(len);
      for (auto& b : p.proof) b = static_cast<uint8_t>(rng());
      EXPECT_FALSE(accepts(crs, p));
    }
  }
  p.proof.assign(192, 0);
  EXPECT_EQ(code_of([&] { verify(crs, p); }), ErrorCode::kMalformedProof);
  // All-zero 256 bytes decode to three identity points; the pairing check fails.
  p.proof.assign(256, 0);
  EXPECT_FALSE(verify(crs, p));
}

TEST(VerifyTest, EnvelopeChecks) {
  std::mt19937_64 rng(16);
  const auto& crs = crs_for(1);
  const auto& oracle = crs_for(1, Backend::kInsecureOracle);
  const auto [w, x] = synthesize_witness(*crs.circuit, random_session(1, rng));
  const auto real = prove(crs, x, w);
  const auto fake = prove(oracle, x, w);
  EXPECT_TRUE(verify(oracle, fake));
  EXPECT_EQ(code_of([&] { verify(crs, fake); }), ErrorCode::kCrsMismatch);
  EXPECT_EQ(code_of([&] { verify(oracle, real); }), ErrorCode::kCrsMismatch);
  auto other_hash = real;
  other_hash.hash_params_id = "poseidon-other";
  EXPECT_EQ(code_of([&] { verify(crs, other_hash); }), ErrorCode::kCrsMismatch);
  EXPECT_EQ(code_of([&] { verify(crs_for(2), real); }), ErrorCode::kShapeMismatch);
  // The oracle transcript is bound to the statement.
  auto moved = fake;
  moved.statement.counts[0] += Fr::one();
  EXPECT_FALSE(verify(oracle, moved));
  auto garbage = fake;
  garbage.proof = {1, 2, 3};
  EXPECT_EQ(code_of([&] { verify(oracle, garbage); }), ErrorCode::kMalformedProof);
}

TEST(ProofBundleTest, JsonRoundTrip) {
  std::mt19937_64 rng(17);
  const auto& crs = crs_for(2);
  const auto [w, x] = synthesize_witness(*crs.circuit, random_session(2, rng));
  const auto p = prove(crs, x, w, "a|b|1|ff");
  const auto j = nlohmann::json::parse(p.to_json().dump());
  const auto back = ProofBundle::from_json(j);
  EXPECT_EQ(back.proof, p.proof);
  EXPECT_EQ(back.statement, p.statement);
  EXPECT_EQ(back.s_id, p.s_id);
  EXPECT_EQ(back.created_at_ms, p.created_at_ms);
  EXPECT_TRUE(verify(crs, back));
  auto bad = j;
  bad["proof"]["payload"] = "!!not base64!!";
  EXPECT_EQ(code_of([&] { ProofBundle::from_json(bad); }), ErrorCode::kDecode);
  bad = j;
  bad["proof"].erase("backend_id");
  EXPECT_EQ(code_of([&] { ProofBundle::from_json(bad); }), ErrorCode::kDecode);
}

// Serialized bundles must not leak message bytes or type lengths: no value
// holds a 4-byte piece of any message and the key set is the fixed schema.
TEST(ProofBundleTest, PrivacyScan) {
  std::mt19937_64 rng(18);
  const auto& crs = crs_for(8);
  const std::set<std::string> schema = {"proof",   "backend_id", "hash_params_id",
                                        "version", "payload",    "statement",
                                        "counts",  "hashes",     "s_id",
                                        "created_at"};
  for (int trial = 0; trial < 3; ++trial) {
    const auto msgs = random_session(8, rng);
    const auto [w, x] = synthesize_witness(*crs.circuit, msgs);
    const auto j = nlohmann::json::parse(prove(crs, x, w, "agent-a|agent-b").to_json().dump());
    std::vector<std::string> raws;
    for (const auto& m : msgs) raws.push_back(m.raw);
    const auto leak = testing::find_leak(j, raws);
    EXPECT_FALSE(leak) << "leaked '" << *leak << "'";
    std::vector<std::string> values, keys;
    testing::collect_leaves(j, values, keys);
    for (const auto& k : keys) EXPECT_TRUE(schema.count(k)) << k;
  }
  // The scan itself finds a planted copy.
  const std::vector<std::string> raws{"{\"type\": \"ping\"}"};
  EXPECT_TRUE(testing::find_leak({{"s_id", "x-ping-y"}}, raws));
}

TEST(BackendAgreementTest, RandomAndAdversarial) {
  std::mt19937_64 rng(19);
  const auto& real = crs_for(1);
  const auto& oracle = crs_for(1, Backend::kInsecureOracle);
  const ConstraintSystem& cs = *real.circuit;
  auto outcome = [&](const CrsBundle& crs, const PublicStatement& x, const Witness& w) {
    try {
      return verify(crs, prove(crs, x, w));
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kRelationUnsatisfied);
      return false;
    }
  };
  size_t accepted = 0;
  auto agree = [&](const PublicStatement& x, const Witness& w) {
    const bool expect = check_relation(cs, x, w);
    EXPECT_EQ(outcome(oracle, x, w), expect);
    EXPECT_EQ(outcome(real, x, w), expect);
    accepted += expect;
  };
  for (int trial = 0; trial < 100; ++trial) {
    auto [w, x] = synthesize_witness(cs, random_session(1, rng));
    switch (rng() % 4) {
      case 0:
        x.counts[rng() % x.counts.size()] += Fr::one();
        break;
      case 1:
        x.hashes[0] = testing::random_element<Fr>(rng);
        break;
      case 2:
        w.aux[rng() % w.aux.size()] += Fr::one();
        break;
      default:
        break;
    }
    agree(x, w);
  }
  const std::vector<std::pair<std::string, size_t>> adversarial = {
      {"{\"type\": \"ping\"}", 4},        {"{\"type\": \"pong\"}", 4},
      {"{\"kind\": \"ping\"}", 4},        {"{\"type\": \"ping\"}", 5},
      {"{\"type\": \"ping\"}", 3},        {"{\"type\": \"ping\"}", 0},
      {"{\"type\": \"ping\"}", 21},       {"{\"type\": \"req\"}", 3},
      {"{\"type\": \"requestX\"}", 8},    {"{\"type\": \"request\"} ", 7},
      {"{\"type\": \"Request\"}", 7},     {"{\"type\":\"request\"}", 7},
      {"{\"type\": \"error\"}", 5},       {"{\"type\": \"error\"}x", 5},
      {"{\"type\": \"progress\"}", 8},    {"{\"type\": \"cancelled\"}", 9},
      {"{\"type\": \"\"}", 0},            {"", 0},
      {std::string("{\"type\": \"ping") + '\0' + "\"}", 5},
      {"{\"type\": \"notification\"}", 12},
  };
  for (const auto& [bytes, len] : adversarial) {
    RawMessage m{pad_message(bytes), len};
    const auto [w, x] = synthesize_raw(cs, std::vector<RawMessage>{m});
    agree(x, w);
  }
  EXPECT_GT(accepted, 20u);
}

class CrsFilesTest : public ::testing::Test {
 protected:
  void SetUp() override {
    root_ = std::filesystem::temp_directory_path() /
            ("zkmcp-crs-" + std::to_string(::getpid()));
    std::filesystem::remove_all(root_);
  }
  void TearDown() override { std::filesystem::remove_all(root_); }
  std::filesystem::path root_;
};

TEST_F(CrsFilesTest, SaveLoadRoundTrip) {
  std::mt19937_64 rng(20);
  const auto& crs = crs_for(2);
  const auto dir = save_crs(crs, root_);
  EXPECT_EQ(dir.filename(), crs.circuit_id());
  const auto full = load_crs(dir, true);
  const auto vk_only = load_crs(dir, false);
  EXPECT_FALSE(vk_only.circuit);
  EXPECT_EQ(full.proving_key, crs.proving_key);
  const auto [w, x] = synthesize_witness(*full.circuit, random_session(2, rng));
  const auto p = prove(full, x, w);
  EXPECT_TRUE(verify(vk_only, p));
  EXPECT_TRUE(verify(crs, p));
}

TEST_F(CrsFilesTest, OracleRoundTrip) {
  std::mt19937_64 rng(21);
  const auto& crs = crs_for(2, Backend::kInsecureOracle);
  const auto loaded = load_crs(save_crs(crs, root_), true);
  EXPECT_TRUE(loaded.is_insecure());
  const auto [w, x] = synthesize_witness(*loaded.circuit, random_session(2, rng));
  EXPECT_TRUE(verify(loaded, prove(loaded, x, w)));
}

TEST_F(CrsFilesTest, DetectsCorruption) {
  const auto dir = save_crs(crs_for(1), root_);
  {
    std::fstream f(dir / "vk.bin", std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(40);
    f.put('\x7f');
  }
  EXPECT_EQ(code_of([&] { load_crs(dir, false); }), ErrorCode::kCorruptCrs);
  std::filesystem::remove(dir / "vk.bin");
  EXPECT_EQ(code_of([&] { load_crs(dir, false); }), ErrorCode::kIoFailure);
  {
    std::ofstream f(dir / "meta.json");
    f << "{";
  }
  EXPECT_EQ(code_of([&] { load_crs(dir, false); }), ErrorCode::kCorruptCrs);
}

TEST_F(CrsFilesTest, ForeignHashParams) {
  const auto dir = save_crs(crs_for(1, Backend::kInsecureOracle), root_);
  nlohmann::json meta;
  std::ifstream(dir / "meta.json") >> meta;
  meta["hash_params_id"] = "mimc-bn254";
  std::ofstream(dir / "meta.json") << meta.dump();
  EXPECT_EQ(code_of([&] { load_crs(dir, false); }), ErrorCode::kCrsMismatch);
}

}  // namespace
}  // namespace zkmcp
