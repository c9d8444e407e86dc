#include "zkmcp/kernels/fft.hpp"

#include <bit>

#include "zkmcp/errors.hpp"

namespace zkmcp {

namespace {

void bit_reverse(std::span<Fr> a) {
  const size_t n = a.size();
  for (size_t i = 1, j = 0; i < n; ++i) {
    size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
}

void check_size(size_t n) {
  if (n == 0 || !std::has_single_bit(n)) {
    throw Error(ErrorCode::kInvalidParams, "fft size must be a power of two");
  }
}

}  // namespace

void fft_serial(std::span<Fr> a, const Fr& omega) {
  const size_t n = a.size();
  check_size(n);
  bit_reverse(a);
  for (size_t len = 2; len <= n; len <<= 1) {
    const size_t half = len / 2;
    const Fr w_len = omega.pow(U256(n / len));
    for (size_t start = 0; start < n; start += len) {
      Fr w = Fr::one();
      for (size_t k = 0; k < half; ++k) {
        const Fr t = a[start + k + half] * w;
        a[start + k + half] = a[start + k] - t;
        a[start + k] += t;
        w *= w_len;
      }
    }
  }
}

void fft_parallel(std::span<Fr> a, const Fr& omega) {
  const size_t n = a.size();
  check_size(n);
  if (n < 2) return;
  bit_reverse(a);
  // twiddle[k] = omega^k for k < n/2; stage `len` uses stride n/len.
  std::vector<Fr> twiddle(n / 2);
  twiddle[0] = Fr::one();
  for (size_t k = 1; k < n / 2; ++k) twiddle[k] = twiddle[k - 1] * omega;
  const auto total = static_cast<long long>(n / 2);
  for (size_t len = 2; len <= n; len <<= 1) {
    const size_t half = len / 2;
    const size_t stride = n / len;
#pragma omp parallel for schedule(static)
    for (long long b = 0; b < total; ++b) {
      const size_t idx = static_cast<size_t>(b);
      const size_t k = idx % half;
      const size_t start = (idx / half) * len;
      const Fr t = a[start + k + half] * twiddle[k * stride];
      a[start + k + half] = a[start + k] - t;
      a[start + k] += t;
    }
  }
}

std::vector<Fr> dft_naive(std::span<const Fr> a, const Fr& omega) {
  const size_t n = a.size();
  std::vector<Fr> out(n);
  Fr wi = Fr::one();
  for (size_t i = 0; i < n; ++i) {
    Fr acc, x = Fr::one();
    for (size_t j = 0; j < n; ++j) {
      acc += a[j] * x;
      x *= wi;
    }
    out[i] = acc;
    wi *= omega;
  }
  return out;
}

Domain::Domain(size_t min_size) {
  while (size_ < min_size) {
    size_ <<= 1;
    ++log_size_;
  }
  if (log_size_ > kFrTwoAdicity) {
    throw Error(ErrorCode::kInvalidParams, "domain exceeds the two-adicity of Fr");
  }
  omega_ = fr_root_of_unity(log_size_);
  omega_inv_ = omega_.inverse();
  size_inv_ = Fr::from_u64(size_).inverse();
}

void Domain::fft(std::span<Fr> a, Exec exec) const {
  if (exec == Exec::kParallel) {
    fft_parallel(a, omega_);
  } else {
    fft_serial(a, omega_);
  }
}

void Domain::ifft(std::span<Fr> a, Exec exec) const {
  if (exec == Exec::kParallel) {
    fft_parallel(a, omega_inv_);
  } else {
    fft_serial(a, omega_inv_);
  }
  for (Fr& x : a) x *= size_inv_;
}

void Domain::coset_fft(std::span<Fr> a, Exec exec) const {
  const Fr g = coset_shift();
  Fr s = Fr::one();
  for (Fr& x : a) {
    x *= s;
    s *= g;
  }
  fft(a, exec);
}

void Domain::coset_ifft(std::span<Fr> a, Exec exec) const {
  ifft(a, exec);
  const Fr g_inv = coset_shift().inverse();
  Fr s = Fr::one();
  for (Fr& x : a) {
    x *= s;
    s *= g_inv;
  }
}

Fr Domain::vanishing_at(const Fr& x) const {
  return x.pow(U256(size_)) - Fr::one();
}

std::vector<Fr> Domain::lagrange_at(const Fr& tau) const {
  // L_i(tau) = Z(tau) * omega^i / (n * (tau - omega^i))
  const Fr z = vanishing_at(tau);
  if (z.is_zero()) {
    throw Error(ErrorCode::kInvalidParams, "evaluation point lies in the domain");
  }
  std::vector<Fr> denom(size_);
  Fr wi = Fr::one();
  for (size_t i = 0; i < size_; ++i) {
    denom[i] = tau - wi;
    wi *= omega_;
  }
  // Batch inversion.
  std::vector<Fr> prefix(size_);
  Fr acc = Fr::one();
  for (size_t i = 0; i < size_; ++i) {
    prefix[i] = acc;
    acc *= denom[i];
  }
  Fr inv = acc.inverse();
  for (size_t i = size_; i-- > 0;) {
    const Fr d = denom[i];
    denom[i] = inv * prefix[i];
    inv *= d;
  }
  const Fr scale = z * size_inv_;
  std::vector<Fr> out(size_);
  wi = Fr::one();
  for (size_t i = 0; i < size_; ++i) {
    out[i] = scale * wi * denom[i];
    wi *= omega_;
  }
  return out;
}

}  // namespace zkmcp
