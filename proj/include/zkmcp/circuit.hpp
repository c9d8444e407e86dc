#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "zkmcp/algebra/fields.hpp"
#include "zkmcp/kernels/exec.hpp"
#include "zkmcp/kernels/sparse.hpp"
#include "zkmcp/message.hpp"

namespace zkmcp {

// Relative variable offsets of one message's block of auxiliary wires.
// Every message allocates an identical block; block i starts at
// first_aux + i * stride.
struct MessageLayout {
  size_t stride = 0;
  size_t bits = 0;      // 8 * max_json, little-endian bits per byte
  size_t type_len = 0;  // 1
  size_t sel = 0;       // max_type one-hot selectors, sel[t - 1] for t in 1..max_type
  size_t type = 0;      // max_type extracted bytes
  size_t inv = 0;       // num_types inverse wires
  size_t match = 0;     // num_types match wires
  size_t sum = 0;       // num_types running sums after this message
  size_t hash = 0;      // Poseidon S-box wires
};

// R1CS: (A z) o (B z) = (C z) with z = [1, counts[K], hashes[n], aux...].
struct ConstraintSystem {
  CircuitParams params;
  TypeTable table = TypeTable::defaults();
  size_t num_inputs = 0;     // K + n
  size_t num_variables = 0;  // 1 + num_inputs + aux
  SparseMatrix a, b, c;
  MessageLayout layout;
  std::string type_table_digest;

  size_t first_aux() const { return 1 + num_inputs; }
  size_t num_aux() const { return num_variables - first_aux(); }
  size_t constraint_count() const { return a.rows(); }
  size_t wire_count() const { return num_variables; }
  size_t private_input_count() const { return params.n * (params.max_json + 1); }

  // Stable identifier derived from params and the table digest.
  std::string circuit_id() const;
  nlohmann::json metadata() const;
};

struct PublicStatement {
  std::vector<Fr> counts;
  std::vector<Fr> hashes;

  std::vector<Fr> inputs() const;
  nlohmann::json to_json() const;
  // Throws BadFieldElement on non-canonical decimals.
  static PublicStatement from_json(const nlohmann::json& j);
  friend bool operator==(const PublicStatement&, const PublicStatement&) = default;
};

struct Witness {
  std::vector<Fr> aux;
};

// Decimal Poseidon chain over the table entries' message digests.
std::string type_table_digest(const TypeTable& table, size_t max_json = 64);

// Throws InvalidParams.
ConstraintSystem build_circuit(const CircuitParams& params, const TypeTable& table);

// Checks every message and produces a satisfying assignment. Throws
// WrongMessageCount, MalformedMessage, UnknownType.
std::pair<Witness, PublicStatement> synthesize_witness(
    const ConstraintSystem& cs, std::span<const AuditMessage> messages);

// Prover-side wire computation from arbitrary padded bytes and claimed
// type lengths, with no validation. The result need not satisfy the
// relation; used to build adversarial witnesses.
struct RawMessage {
  std::vector<uint8_t> padded;
  size_t type_len = 0;
};
std::pair<Witness, PublicStatement> synthesize_raw(const ConstraintSystem& cs,
                                                   std::span<const RawMessage> messages);

std::vector<Fr> full_assignment(const ConstraintSystem& cs, const PublicStatement& x,
                                const Witness& w);

// Index of the first violated constraint. Throws ShapeMismatch.
std::optional<size_t> first_unsatisfied(const ConstraintSystem& cs,
                                        const PublicStatement& x, const Witness& w,
                                        Exec exec = Exec::kParallel);

bool check_relation(const ConstraintSystem& cs, const PublicStatement& x,
                    const Witness& w);

void check_statement_shape(const ConstraintSystem& cs, const PublicStatement& x);

// Named access to one message's wires.
class WitnessView {
 public:
  WitnessView(const ConstraintSystem& cs, const Witness& w) : cs_(cs), w_(w) {}

  Fr byte(size_t i, size_t m) const;
  Fr type_len(size_t i) const { return at(i, cs_.layout.type_len); }
  Fr sel(size_t i, size_t t) const { return at(i, cs_.layout.sel + t - 1); }
  Fr type_byte(size_t i, size_t k) const { return at(i, cs_.layout.type + k); }
  Fr match(size_t i, size_t j) const { return at(i, cs_.layout.match + j); }
  // sum[j][i] for i in 0..n
  Fr sum(size_t j, size_t i) const {
    return i == 0 ? Fr::zero() : at(i - 1, cs_.layout.sum + j);
  }

 private:
  Fr at(size_t i, size_t offset) const {
    return w_.aux[i * cs_.layout.stride + offset];
  }
  const ConstraintSystem& cs_;
  const Witness& w_;
};

}  // namespace zkmcp
