#pragma once

// Two interchangeable constraint builders driven by the same gadget code:
// ShapeBuilder records R1CS rows, WitnessBuilder only tracks values.

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "zkmcp/algebra/fields.hpp"
#include "zkmcp/kernels/sparse.hpp"

namespace zkmcp::detail {

class LinearCombination {
 public:
  using Term = std::pair<uint32_t, Fr>;

  LinearCombination() = default;
  static LinearCombination term(uint32_t var, const Fr& coeff) {
    LinearCombination lc;
    if (!coeff.is_zero()) lc.terms_.emplace_back(var, coeff);
    return lc;
  }

  const std::vector<Term>& terms() const { return terms_; }

  LinearCombination operator+(const LinearCombination& o) const { return merge(o, false); }
  LinearCombination operator-(const LinearCombination& o) const { return merge(o, true); }
  LinearCombination operator*(const Fr& s) const {
    if (s.is_zero()) return {};
    LinearCombination out = *this;
    for (auto& t : out.terms_) t.second *= s;
    return out;
  }

 private:
  LinearCombination merge(const LinearCombination& o, bool negate) const {
    LinearCombination out;
    out.terms_.reserve(terms_.size() + o.terms_.size());
    size_t i = 0, j = 0;
    while (i < terms_.size() || j < o.terms_.size()) {
      if (j == o.terms_.size() ||
          (i < terms_.size() && terms_[i].first < o.terms_[j].first)) {
        out.terms_.push_back(terms_[i++]);
        continue;
      }
      const Fr c = negate ? -o.terms_[j].second : o.terms_[j].second;
      if (i < terms_.size() && terms_[i].first == o.terms_[j].first) {
        const Fr sum = terms_[i].second + c;
        if (!sum.is_zero()) out.terms_.emplace_back(terms_[i].first, sum);
        ++i;
      } else {
        out.terms_.emplace_back(o.terms_[j].first, c);
      }
      ++j;
    }
    return out;
  }

  std::vector<Term> terms_;
};

class ShapeBuilder {
 public:
  using Lc = LinearCombination;

  explicit ShapeBuilder(size_t num_inputs)
      : num_inputs_(num_inputs), next_var_(static_cast<uint32_t>(1 + num_inputs)) {}

  Lc one() const { return Lc::term(0, Fr::one()); }
  Lc zero() const { return {}; }
  Lc constant(const Fr& c) const { return Lc::term(0, c); }
  Lc input(size_t k) const { return Lc::term(static_cast<uint32_t>(1 + k), Fr::one()); }
  Lc alloc(const Fr&) { return Lc::term(next_var_++, Fr::one()); }
  size_t next_aux() const { return next_var_ - 1 - num_inputs_; }
  static Fr value(const Lc&) { return Fr::zero(); }

  void enforce(const Lc& a, const Lc& b, const Lc& c) {
    push(a_, a);
    push(b_, b);
    push(c_, c);
  }
  void bind_input(size_t k, const Lc& lc) { enforce(lc, one(), input(k)); }

  size_t num_variables() const { return next_var_; }
  SparseMatrix take_a() { return finish(std::move(a_)); }
  SparseMatrix take_b() { return finish(std::move(b_)); }
  SparseMatrix take_c() { return finish(std::move(c_)); }

 private:
  static void push(SparseMatrix& m, const Lc& lc) {
    for (const auto& [var, coeff] : lc.terms()) {
      m.col_index.push_back(var);
      m.values.push_back(coeff);
    }
    m.row_start.push_back(static_cast<uint32_t>(m.values.size()));
  }
  SparseMatrix finish(SparseMatrix m) const {
    m.cols = next_var_;
    return m;
  }

  size_t num_inputs_;
  uint32_t next_var_;
  SparseMatrix a_, b_, c_;
};

// A linear combination collapsed to its value.
struct WitnessValue {
  Fr v;
  WitnessValue operator+(const WitnessValue& o) const { return {v + o.v}; }
  WitnessValue operator-(const WitnessValue& o) const { return {v - o.v}; }
  WitnessValue operator*(const Fr& s) const { return {v * s}; }
};

class WitnessBuilder {
 public:
  using Lc = WitnessValue;

  explicit WitnessBuilder(size_t num_inputs) : inputs_(num_inputs) {}

  Lc one() const { return {Fr::one()}; }
  Lc zero() const { return {}; }
  Lc constant(const Fr& c) const { return {c}; }
  Lc input(size_t k) const { return {inputs_[k]}; }
  Lc alloc(const Fr& v) {
    aux_.push_back(v);
    return {v};
  }
  size_t next_aux() const { return aux_.size(); }
  static Fr value(const Lc& lc) { return lc.v; }

  void enforce(const Lc& a, const Lc& b, const Lc& c) {
    if (!first_violation_ && a.v * b.v != c.v) first_violation_ = constraint_;
    ++constraint_;
  }
  void bind_input(size_t k, const Lc& lc) {
    inputs_[k] = lc.v;
    ++constraint_;
  }

  std::vector<Fr>& aux() { return aux_; }
  std::vector<Fr>& inputs() { return inputs_; }
  std::optional<size_t> first_violation() const { return first_violation_; }

 private:
  std::vector<Fr> inputs_;
  std::vector<Fr> aux_;
  size_t constraint_ = 0;
  std::optional<size_t> first_violation_;
};

}  // namespace zkmcp::detail
