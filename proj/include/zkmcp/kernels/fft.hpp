#pragma once

#include <span>
#include <vector>

#include "zkmcp/algebra/fields.hpp"
#include "zkmcp/kernels/exec.hpp"

namespace zkmcp {

// In-place radix-2 transform: a[i] <- sum_j a[j] * omega^(i*j).
// a.size() must be a power of two and omega a primitive root of that order.
void fft_serial(std::span<Fr> a, const Fr& omega);
void fft_parallel(std::span<Fr> a, const Fr& omega);

// O(n^2) transform, used as the test reference.
std::vector<Fr> dft_naive(std::span<const Fr> a, const Fr& omega);

// Multiplicative subgroup H of Fr of power-of-two order.
class Domain {
 public:
  // Smallest domain with at least min_size points.
  explicit Domain(size_t min_size);

  size_t size() const { return size_; }
  size_t log_size() const { return log_size_; }
  const Fr& omega() const { return omega_; }
  const Fr& omega_inv() const { return omega_inv_; }
  // Coset generator g; evaluations over g*H avoid the zeros of Z_H.
  static Fr coset_shift() { return Fr::from_u64(kFrMultiplicativeGenerator); }

  void fft(std::span<Fr> a, Exec exec) const;
  void ifft(std::span<Fr> a, Exec exec) const;
  void coset_fft(std::span<Fr> a, Exec exec) const;
  void coset_ifft(std::span<Fr> a, Exec exec) const;

  // Z_H(x) = x^n - 1
  Fr vanishing_at(const Fr& x) const;
  // [L_0(tau), ..., L_{n-1}(tau)]; tau must lie outside H.
  std::vector<Fr> lagrange_at(const Fr& tau) const;

 private:
  size_t size_ = 1;
  size_t log_size_ = 0;
  Fr omega_, omega_inv_, size_inv_;
};

}  // namespace zkmcp
