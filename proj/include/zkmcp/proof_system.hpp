#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "zkmcp/circuit.hpp"
#include "zkmcp/kernels/exec.hpp"

namespace zkmcp {

namespace groth16 {
struct ProvingKey;
struct PreparedVerifyingKey;
}  // namespace groth16

enum class Backend { kGroth16, kInsecureOracle };

inline constexpr std::string_view kGroth16BackendId = "groth16-bn254";
inline constexpr std::string_view kOracleBackendId = "insecure-oracle";
inline constexpr int kEnvelopeVersion = 1;

std::string_view backend_id(Backend b);
// Throws BackendUnavailable for unknown identifiers.
Backend parse_backend(std::string_view id);

struct CrsBundle {
  std::string backend_id;
  std::string hash_params_id;
  nlohmann::json circuit_meta;
  std::vector<uint8_t> proving_key;       // empty for the oracle backend
  std::vector<uint8_t> verification_key;  // empty for the oracle backend

  // Decoded forms, filled by setup/load. `circuit` and `pk` are absent on
  // a verifier that loaded only the verification key.
  std::shared_ptr<const ConstraintSystem> circuit;
  std::shared_ptr<const groth16::ProvingKey> pk;
  std::shared_ptr<const groth16::PreparedVerifyingKey> pvk;

  size_t n() const { return circuit_meta.at("n").get<size_t>(); }
  size_t num_types() const { return circuit_meta.at("num_types").get<size_t>(); }
  std::string circuit_id() const { return circuit_meta.at("circuit_id").get<std::string>(); }
  bool is_insecure() const { return backend_id == kOracleBackendId; }
};

// Self-describing proof envelope {backend_id, hash_params_id, version, payload}.
struct ProofBundle {
  std::string backend_id;
  std::string hash_params_id;
  int version = kEnvelopeVersion;
  std::vector<uint8_t> proof;
  PublicStatement statement;
  std::string s_id;
  int64_t created_at_ms = 0;

  nlohmann::json proof_json() const;
  // Throws Decode when fields are missing or the payload is not base64.
  static ProofBundle from_proof_json(const nlohmann::json& proof, PublicStatement statement);
  nlohmann::json to_json() const;
  static ProofBundle from_json(const nlohmann::json& j);
};

// Throws BackendUnavailable, InvalidParams.
CrsBundle setup(const CircuitParams& params, const TypeTable& table, Backend backend,
                Exec exec = Exec::kParallel);

// Refuses unsatisfiable (x, w): throws RelationUnsatisfied, ShapeMismatch.
ProofBundle prove(const CrsBundle& crs, const PublicStatement& x, const Witness& w,
                  const std::string& s_id = "", Exec exec = Exec::kParallel);

// Throws ShapeMismatch, MalformedProof (undecodable proof bytes), and
// CrsMismatch (proof produced for another backend or hash parameter set).
bool verify(const CrsBundle& crs, const ProofBundle& proof);

// crs/<circuit-id>/{pk.bin, vk.bin, meta.json}; returns the directory used.
std::filesystem::path save_crs(const CrsBundle& crs, const std::filesystem::path& root);
// Loads from a directory holding meta.json. Without the proving key only
// verification is possible. Throws CorruptCrs, IoFailure.
CrsBundle load_crs(const std::filesystem::path& dir, bool with_proving_key);

}  // namespace zkmcp
