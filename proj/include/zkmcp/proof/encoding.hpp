#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "zkmcp/algebra/curve.hpp"
#include "zkmcp/errors.hpp"

namespace zkmcp {

// Fixed-width big-endian encodings. G1: x || y (64 bytes). G2: x.c0 ||
// x.c1 || y.c0 || y.c1 (128 bytes). The point at infinity is all zeros,
// which is not on either curve.
inline constexpr size_t kG1Bytes = 64;
inline constexpr size_t kG2Bytes = 128;

class ByteWriter {
 public:
  void u32(uint32_t v);
  void u64(uint64_t v);
  void bytes(std::span<const uint8_t> b);
  void fr(const Fr& v);
  void g1(const G1Affine& p);
  void g2(const G2Affine& p);
  void g1_vec(const std::vector<G1Affine>& v);
  void g2_vec(const std::vector<G2Affine>& v);

  std::vector<uint8_t>& data() { return out_; }

 private:
  void fq(const Fq& v);
  std::vector<uint8_t> out_;
};

// Every read validates; failures throw Error(code_on_failure).
class ByteReader {
 public:
  ByteReader(std::span<const uint8_t> in, ErrorCode code_on_failure)
      : in_(in), code_(code_on_failure) {}

  uint32_t u32();
  uint64_t u64();
  std::span<const uint8_t> bytes(size_t n);
  Fr fr();
  G1Affine g1();
  // The prime-order subgroup check runs unless disabled.
  G2Affine g2(bool subgroup_check = true);
  std::vector<G1Affine> g1_vec(size_t max_len);
  std::vector<G2Affine> g2_vec(size_t max_len, bool subgroup_check = true);
  void expect_end() const;

 private:
  [[noreturn]] void fail(const std::string& what) const;
  Fq fq();
  std::span<const uint8_t> in_;
  size_t pos_ = 0;
  ErrorCode code_;
};

std::string base64_encode(std::span<const uint8_t> in);
// Throws Decode on invalid input.
std::vector<uint8_t> base64_decode(std::string_view in);

std::string sha256_hex(std::span<const uint8_t> in);
std::string sha256_hex(std::string_view in);

}  // namespace zkmcp
