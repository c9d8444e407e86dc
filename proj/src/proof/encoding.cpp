#include "zkmcp/proof/encoding.hpp"

#include <openssl/evp.h>
#include <openssl/sha.h>

#include "zkmcp/errors.hpp"

namespace zkmcp {

void ByteWriter::u32(uint32_t v) {
  for (int i = 3; i >= 0; --i) out_.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

void ByteWriter::u64(uint64_t v) {
  for (int i = 7; i >= 0; --i) out_.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

void ByteWriter::bytes(std::span<const uint8_t> b) { out_.insert(out_.end(), b.begin(), b.end()); }

void ByteWriter::fq(const Fq& v) {
  std::array<uint8_t, 32> buf;
  v.to_canonical().to_be_bytes(buf);
  bytes(buf);
}

void ByteWriter::fr(const Fr& v) {
  std::array<uint8_t, 32> buf;
  v.to_canonical().to_be_bytes(buf);
  bytes(buf);
}

void ByteWriter::g1(const G1Affine& p) {
  if (p.infinity) {
    out_.insert(out_.end(), kG1Bytes, 0);
    return;
  }
  fq(p.x);
  fq(p.y);
}

void ByteWriter::g2(const G2Affine& p) {
  if (p.infinity) {
    out_.insert(out_.end(), kG2Bytes, 0);
    return;
  }
  fq(p.x.c0);
  fq(p.x.c1);
  fq(p.y.c0);
  fq(p.y.c1);
}

void ByteWriter::g1_vec(const std::vector<G1Affine>& v) {
  u32(static_cast<uint32_t>(v.size()));
  for (const auto& p : v) g1(p);
}

void ByteWriter::g2_vec(const std::vector<G2Affine>& v) {
  u32(static_cast<uint32_t>(v.size()));
  for (const auto& p : v) g2(p);
}

void ByteReader::fail(const std::string& what) const {
  throw Error(code_, what + " at byte " + std::to_string(pos_));
}

std::span<const uint8_t> ByteReader::bytes(size_t n) {
  if (in_.size() - pos_ < n) fail("truncated input");
  auto out = in_.subspan(pos_, n);
  pos_ += n;
  return out;
}

uint32_t ByteReader::u32() {
  uint32_t v = 0;
  for (uint8_t b : bytes(4)) v = (v << 8) | b;
  return v;
}

uint64_t ByteReader::u64() {
  uint64_t v = 0;
  for (uint8_t b : bytes(8)) v = (v << 8) | b;
  return v;
}

Fq ByteReader::fq() {
  const auto b = bytes(32);
  auto v = Fq::from_canonical(U256::from_be_bytes(b.first<32>()));
  if (!v) fail("non-canonical base field element");
  return *v;
}

Fr ByteReader::fr() {
  const auto b = bytes(32);
  auto v = Fr::from_canonical(U256::from_be_bytes(b.first<32>()));
  if (!v) fail("non-canonical scalar");
  return *v;
}

G1Affine ByteReader::g1() {
  const auto raw = in_.subspan(pos_, std::min(kG1Bytes, in_.size() - pos_));
  if (raw.size() == kG1Bytes &&
      std::all_of(raw.begin(), raw.end(), [](uint8_t b) { return b == 0; })) {
    pos_ += kG1Bytes;
    return G1Affine::identity();
  }
  const Fq x = fq();
  const Fq y = fq();
  G1Affine p(x, y);
  if (!p.is_on_curve()) fail("G1 point not on curve");
  return p;
}

G2Affine ByteReader::g2(bool subgroup_check) {
  const auto raw = in_.subspan(pos_, std::min(kG2Bytes, in_.size() - pos_));
  if (raw.size() == kG2Bytes &&
      std::all_of(raw.begin(), raw.end(), [](uint8_t b) { return b == 0; })) {
    pos_ += kG2Bytes;
    return G2Affine::identity();
  }
  const Fq x0 = fq(), x1 = fq(), y0 = fq(), y1 = fq();
  G2Affine p(Fq2(x0, x1), Fq2(y0, y1));
  if (!p.is_on_curve()) fail("G2 point not on curve");
  if (subgroup_check && !g2_in_subgroup(p)) fail("G2 point outside the prime-order subgroup");
  return p;
}

std::vector<G1Affine> ByteReader::g1_vec(size_t max_len) {
  const uint32_t n = u32();
  if (n > max_len) fail("vector length out of range");
  std::vector<G1Affine> v(n);
  for (auto& p : v) p = g1();
  return v;
}

std::vector<G2Affine> ByteReader::g2_vec(size_t max_len, bool subgroup_check) {
  const uint32_t n = u32();
  if (n > max_len) fail("vector length out of range");
  std::vector<G2Affine> v(n);
  for (auto& p : v) p = g2(subgroup_check);
  return v;
}

void ByteReader::expect_end() const {
  if (pos_ != in_.size()) fail("trailing bytes");
}

std::string base64_encode(std::span<const uint8_t> in) {
  std::string out(4 * ((in.size() + 2) / 3), '\0');
  const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()), in.data(),
                                static_cast<int>(in.size()));
  out.resize(static_cast<size_t>(n));
  return out;
}

std::vector<uint8_t> base64_decode(std::string_view in) {
  if (in.size() % 4 != 0) throw Error(ErrorCode::kDecode, "base64 length not a multiple of 4");
  std::vector<uint8_t> out(in.size() / 4 * 3);
  const int n = EVP_DecodeBlock(out.data(), reinterpret_cast<const unsigned char*>(in.data()),
                                static_cast<int>(in.size()));
  if (n < 0) throw Error(ErrorCode::kDecode, "invalid base64");
  size_t len = static_cast<size_t>(n);
  // EVP_DecodeBlock keeps the bytes that stand in for '=' padding.
  if (!in.empty() && in.back() == '=') --len;
  if (in.size() >= 2 && in[in.size() - 2] == '=') --len;
  out.resize(len);
  return out;
}

std::string sha256_hex(std::span<const uint8_t> in) {
  unsigned char digest[SHA256_DIGEST_LENGTH];
  SHA256(in.data(), in.size(), digest);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned char c : digest) {
    out.push_back(kHex[c >> 4]);
    out.push_back(kHex[c & 15]);
  }
  return out;
}

std::string sha256_hex(std::string_view in) {
  return sha256_hex(std::span<const uint8_t>(reinterpret_cast<const uint8_t*>(in.data()), in.size()));
}

}  // namespace zkmcp
