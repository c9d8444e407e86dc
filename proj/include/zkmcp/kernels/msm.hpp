#pragma once

#include <span>
#include <vector>

#include "zkmcp/algebra/curve.hpp"
#include "zkmcp/kernels/exec.hpp"

namespace zkmcp {

// Multi-scalar multiplication sum_i k_i * P_i.
//
// msm_naive is double-and-add per term and exists only as a test
// reference. msm_serial and msm_parallel are bucket (Pippenger) methods;
// the parallel variant distributes windows across threads.
template <class F, class Cfg>
JacobianPoint<F, Cfg> msm_naive(std::span<const AffinePoint<F, Cfg>> points,
                                std::span<const U256> scalars);

template <class F, class Cfg>
JacobianPoint<F, Cfg> msm_serial(std::span<const AffinePoint<F, Cfg>> points,
                                 std::span<const U256> scalars);

template <class F, class Cfg>
JacobianPoint<F, Cfg> msm_parallel(std::span<const AffinePoint<F, Cfg>> points,
                                   std::span<const U256> scalars);

template <class F, class Cfg>
JacobianPoint<F, Cfg> msm(std::span<const AffinePoint<F, Cfg>> points,
                          std::span<const U256> scalars, Exec exec) {
  return exec == Exec::kParallel ? msm_parallel<F, Cfg>(points, scalars)
                                 : msm_serial<F, Cfg>(points, scalars);
}

std::vector<U256> to_canonical_scalars(std::span<const Fr> s);

// Windowed table of multiples of one base point, for computing many k*G.
template <class F, class Cfg>
class FixedBaseTable {
 public:
  explicit FixedBaseTable(const AffinePoint<F, Cfg>& base);

  JacobianPoint<F, Cfg> mul(const U256& k) const;
  std::vector<AffinePoint<F, Cfg>> batch_mul(std::span<const Fr> scalars,
                                             Exec exec) const;

 private:
  static constexpr size_t kWindow = 8;
  static constexpr size_t kWindows = (256 + kWindow - 1) / kWindow;
  // table_[w][d - 1] = d * 2^(w*kWindow) * base
  std::vector<std::vector<AffinePoint<F, Cfg>>> table_;
};

using G1Table = FixedBaseTable<Fq, G1Config>;
using G2Table = FixedBaseTable<Fq2, G2Config>;

}  // namespace zkmcp
