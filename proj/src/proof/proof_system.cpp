#include "zkmcp/proof_system.hpp"

#include <chrono>
#include <fstream>

#include "zkmcp/errors.hpp"
#include "zkmcp/hashing.hpp"
#include "zkmcp/proof/encoding.hpp"
#include "zkmcp/proof/groth16.hpp"

namespace zkmcp {

namespace {

constexpr std::string_view kOracleTag = "insecure-oracle/v1:";

int64_t now_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

// The oracle "proof" commits to the statement only; it carries no witness
// data and anyone can forge it.
std::vector<uint8_t> oracle_transcript(const std::string& circuit_id, const PublicStatement& x) {
  const std::string body = circuit_id + "|" + x.to_json().dump();
  const std::string tagged = std::string(kOracleTag) + sha256_hex(body);
  return {tagged.begin(), tagged.end()};
}

void check_shape(const CrsBundle& crs, const PublicStatement& x) {
  if (x.counts.size() != crs.num_types() || x.hashes.size() != crs.n()) {
    throw Error(ErrorCode::kShapeMismatch,
                "statement has " + std::to_string(x.counts.size()) + " counts and " +
                    std::to_string(x.hashes.size()) + " hashes, crs expects " +
                    std::to_string(crs.num_types()) + " and " + std::to_string(crs.n()));
  }
}

std::vector<uint8_t> read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoFailure, "cannot read " + p.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& p, std::span<const uint8_t> data) {
  const auto tmp = p.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIoFailure, "cannot write " + tmp);
    out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
    if (!out) throw Error(ErrorCode::kIoFailure, "short write to " + tmp);
  }
  std::filesystem::rename(tmp, p);
}

void write_text(const std::filesystem::path& p, const std::string& s) {
  write_file(p, std::span<const uint8_t>(reinterpret_cast<const uint8_t*>(s.data()), s.size()));
}

std::shared_ptr<const ConstraintSystem> rebuild_circuit(const nlohmann::json& meta) {
  CircuitParams p;
  p.n = meta.at("n").get<size_t>();
  p.max_json = meta.at("max_json").get<size_t>();
  p.max_type = meta.at("max_type").get<size_t>();
  p.num_types = meta.at("num_types").get<size_t>();
  const TypeTable table(meta.at("type_table").get<std::vector<std::string>>(), p.max_type);
  auto cs = std::make_shared<ConstraintSystem>(build_circuit(p, table));
  if (cs->metadata() != meta) {
    throw Error(ErrorCode::kCorruptCrs, "circuit metadata does not match the rebuilt circuit");
  }
  return cs;
}

}  // namespace

std::string_view backend_id(Backend b) {
  return b == Backend::kGroth16 ? kGroth16BackendId : kOracleBackendId;
}

Backend parse_backend(std::string_view id) {
  if (id == kGroth16BackendId || id == "real" || id == "groth16") return Backend::kGroth16;
  if (id == kOracleBackendId || id == "oracle") return Backend::kInsecureOracle;
  throw Error(ErrorCode::kBackendUnavailable, "unknown backend '" + std::string(id) + "'");
}

nlohmann::json ProofBundle::proof_json() const {
  return {{"backend_id", backend_id},
          {"hash_params_id", hash_params_id},
          {"version", version},
          {"payload", base64_encode(proof)}};
}

ProofBundle ProofBundle::from_proof_json(const nlohmann::json& j, PublicStatement statement) {
  ProofBundle p;
  try {
    p.backend_id = j.at("backend_id").get<std::string>();
    p.hash_params_id = j.at("hash_params_id").get<std::string>();
    p.version = j.at("version").get<int>();
    p.proof = base64_decode(j.at("payload").get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kDecode, std::string("proof envelope: ") + e.what());
  }
  p.statement = std::move(statement);
  return p;
}

nlohmann::json ProofBundle::to_json() const {
  return {{"proof", proof_json()},
          {"statement", statement.to_json()},
          {"s_id", s_id},
          {"created_at", created_at_ms}};
}

ProofBundle ProofBundle::from_json(const nlohmann::json& j) {
  try {
    auto p = from_proof_json(j.at("proof"), PublicStatement::from_json(j.at("statement")));
    p.s_id = j.at("s_id").get<std::string>();
    p.created_at_ms = j.at("created_at").get<int64_t>();
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kDecode, e.what());
  }
}

CrsBundle setup(const CircuitParams& params, const TypeTable& table, Backend backend,
                Exec exec) {
  auto cs = std::make_shared<ConstraintSystem>(build_circuit(params, table));
  CrsBundle crs;
  crs.backend_id = std::string(backend_id(backend));
  crs.hash_params_id = std::string(kHashParamsId);
  crs.circuit_meta = cs->metadata();
  if (backend == Backend::kGroth16) {
    auto kp = groth16::generate(*cs, exec);
    crs.proving_key = kp.pk.serialize();
    crs.verification_key = kp.vk.serialize();
    crs.pk = std::make_shared<groth16::ProvingKey>(std::move(kp.pk));
    crs.pvk = std::make_shared<groth16::PreparedVerifyingKey>(std::move(kp.vk));
  }
  crs.circuit = std::move(cs);
  return crs;
}

ProofBundle prove(const CrsBundle& crs, const PublicStatement& x, const Witness& w,
                  const std::string& s_id, Exec exec) {
  if (!crs.circuit) throw Error(ErrorCode::kBackendUnavailable, "crs has no circuit loaded");
  check_shape(crs, x);
  const ConstraintSystem& cs = *crs.circuit;
  const auto z = full_assignment(cs, x, w);
  if (first_unsatisfied(cs, x, w, exec)) {
    throw Error(ErrorCode::kRelationUnsatisfied, "statement has no valid witness here");
  }
  ProofBundle out;
  out.backend_id = crs.backend_id;
  out.hash_params_id = crs.hash_params_id;
  out.statement = x;
  out.s_id = s_id;
  if (crs.is_insecure()) {
    out.proof = oracle_transcript(crs.circuit_id(), x);
  } else {
    if (!crs.pk) throw Error(ErrorCode::kBackendUnavailable, "crs has no proving key");
    out.proof = groth16::prove(cs, *crs.pk, z, exec).serialize();
  }
  out.created_at_ms = now_ms();
  return out;
}

bool verify(const CrsBundle& crs, const ProofBundle& p) {
  check_shape(crs, p.statement);
  if (p.backend_id != crs.backend_id || p.hash_params_id != crs.hash_params_id ||
      p.version != kEnvelopeVersion) {
    throw Error(ErrorCode::kCrsMismatch, "proof made for " + p.backend_id + "/" +
                                             p.hash_params_id + ", crs is " + crs.backend_id +
                                             "/" + crs.hash_params_id);
  }
  if (crs.is_insecure()) {
    if (!std::string_view(reinterpret_cast<const char*>(p.proof.data()), p.proof.size())
             .starts_with(kOracleTag)) {
      throw Error(ErrorCode::kMalformedProof, "not an oracle transcript");
    }
    return p.proof == oracle_transcript(crs.circuit_id(), p.statement);
  }
  if (!crs.pvk) throw Error(ErrorCode::kBackendUnavailable, "crs has no verification key");
  const auto proof = groth16::Proof::deserialize(p.proof);
  return groth16::verify(*crs.pvk, p.statement.inputs(), proof);
}

std::filesystem::path save_crs(const CrsBundle& crs, const std::filesystem::path& root) {
  const auto dir = root / crs.circuit_id();
  std::filesystem::create_directories(dir);
  write_file(dir / "pk.bin", crs.proving_key);
  write_file(dir / "vk.bin", crs.verification_key);
  const nlohmann::json meta = {
      {"backend_id", crs.backend_id},
      {"hash_params_id", crs.hash_params_id},
      {"version", kEnvelopeVersion},
      {"circuit", crs.circuit_meta},
      {"pk_sha256", sha256_hex(crs.proving_key)},
      {"vk_sha256", sha256_hex(crs.verification_key)},
  };
  write_text(dir / "meta.json", meta.dump(2) + "\n");
  return dir;
}

CrsBundle load_crs(const std::filesystem::path& dir, bool with_proving_key) {
  const auto meta_bytes = read_file(dir / "meta.json");
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(meta_bytes.begin(), meta_bytes.end());
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kCorruptCrs, std::string("meta.json: ") + e.what());
  }
  CrsBundle crs;
  try {
    crs.backend_id = meta.at("backend_id").get<std::string>();
    crs.hash_params_id = meta.at("hash_params_id").get<std::string>();
    crs.circuit_meta = meta.at("circuit");
    if (meta.at("version").get<int>() != kEnvelopeVersion) {
      throw Error(ErrorCode::kCorruptCrs, "unsupported crs version");
    }
    crs.verification_key = read_file(dir / "vk.bin");
    if (sha256_hex(crs.verification_key) != meta.at("vk_sha256").get<std::string>()) {
      throw Error(ErrorCode::kCorruptCrs, "vk.bin checksum mismatch");
    }
    if (with_proving_key) {
      crs.proving_key = read_file(dir / "pk.bin");
      if (sha256_hex(crs.proving_key) != meta.at("pk_sha256").get<std::string>()) {
        throw Error(ErrorCode::kCorruptCrs, "pk.bin checksum mismatch");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kCorruptCrs, std::string("meta.json: ") + e.what());
  }
  if (crs.hash_params_id != kHashParamsId) {
    throw Error(ErrorCode::kCrsMismatch, "crs uses hash parameters " + crs.hash_params_id);
  }
  parse_backend(crs.backend_id);
  if (!crs.is_insecure()) {
    crs.pvk = std::make_shared<groth16::PreparedVerifyingKey>(
        groth16::VerifyingKey::deserialize(crs.verification_key));
    if (crs.pvk->vk.num_inputs() != crs.n() + crs.num_types()) {
      throw Error(ErrorCode::kCorruptCrs, "verification key input count disagrees with meta");
    }
  }
  if (with_proving_key) {
    crs.circuit = rebuild_circuit(crs.circuit_meta);
    if (!crs.is_insecure()) {
      crs.pk = std::make_shared<groth16::ProvingKey>(
          groth16::ProvingKey::deserialize(crs.proving_key));
      if (crs.pk->num_variables != crs.circuit->num_variables) {
        throw Error(ErrorCode::kCorruptCrs, "proving key does not match the circuit");
      }
    }
  }
  return crs;
}

}  // namespace zkmcp
