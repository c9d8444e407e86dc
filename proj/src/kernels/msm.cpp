#include "zkmcp/kernels/msm.hpp"

#include <algorithm>
#include <cmath>

#include "zkmcp/errors.hpp"

namespace zkmcp {

namespace {

constexpr size_t kScalarBits = 254;

// Minimizes windows * (one add per point + 2 adds per bucket).
size_t window_bits(size_t n) {
  size_t best = 1;
  double best_cost = 0;
  for (size_t c = 1; c <= 16; ++c) {
    const double windows = static_cast<double>((kScalarBits + c - 1) / c);
    const double cost = windows * (static_cast<double>(n) + std::ldexp(2.0, static_cast<int>(c)));
    if (c == 1 || cost < best_cost) {
      best = c;
      best_cost = cost;
    }
  }
  return best;
}

template <class F, class Cfg>
void check_lengths(std::span<const AffinePoint<F, Cfg>> points,
                   std::span<const U256> scalars) {
  if (points.size() != scalars.size()) {
    throw Error(ErrorCode::kShapeMismatch, "msm points/scalars length mismatch");
  }
}

template <class F, class Cfg>
JacobianPoint<F, Cfg> window_sum(std::span<const AffinePoint<F, Cfg>> points,
                                 std::span<const U256> scalars, size_t pos,
                                 size_t c) {
  using Point = JacobianPoint<F, Cfg>;
  std::vector<Point> buckets((size_t{1} << c) - 1);
  for (size_t i = 0; i < points.size(); ++i) {
    const uint64_t digit = scalars[i].bits(pos, c);
    if (digit != 0) buckets[digit - 1] = buckets[digit - 1].add_mixed(points[i]);
  }
  // sum_d d * bucket[d] via running suffix sums.
  Point running, acc;
  for (size_t d = buckets.size(); d-- > 0;) {
    running += buckets[d];
    acc += running;
  }
  return acc;
}

template <class F, class Cfg>
JacobianPoint<F, Cfg> combine_windows(const std::vector<JacobianPoint<F, Cfg>>& sums,
                                      size_t c) {
  JacobianPoint<F, Cfg> total;
  for (size_t w = sums.size(); w-- > 0;) {
    for (size_t k = 0; k < c; ++k) total = total.dbl();
    total += sums[w];
  }
  return total;
}

}  // namespace

template <class F, class Cfg>
JacobianPoint<F, Cfg> msm_naive(std::span<const AffinePoint<F, Cfg>> points,
                                std::span<const U256> scalars) {
  check_lengths(points, scalars);
  JacobianPoint<F, Cfg> acc;
  for (size_t i = 0; i < points.size(); ++i) {
    acc += JacobianPoint<F, Cfg>(points[i]).mul(scalars[i]);
  }
  return acc;
}

template <class F, class Cfg>
JacobianPoint<F, Cfg> msm_serial(std::span<const AffinePoint<F, Cfg>> points,
                                 std::span<const U256> scalars) {
  check_lengths(points, scalars);
  const size_t c = window_bits(points.size());
  const size_t windows = (kScalarBits + c - 1) / c;
  std::vector<JacobianPoint<F, Cfg>> sums(windows);
  for (size_t w = 0; w < windows; ++w) {
    sums[w] = window_sum(points, scalars, w * c, c);
  }
  return combine_windows(sums, c);
}

template <class F, class Cfg>
JacobianPoint<F, Cfg> msm_parallel(std::span<const AffinePoint<F, Cfg>> points,
                                   std::span<const U256> scalars) {
  check_lengths(points, scalars);
  const size_t c = window_bits(points.size());
  const auto windows = static_cast<long long>((kScalarBits + c - 1) / c);
  std::vector<JacobianPoint<F, Cfg>> sums(static_cast<size_t>(windows));
#pragma omp parallel for schedule(dynamic, 1)
  for (long long w = 0; w < windows; ++w) {
    sums[static_cast<size_t>(w)] =
        window_sum(points, scalars, static_cast<size_t>(w) * c, c);
  }
  return combine_windows(sums, c);
}

std::vector<U256> to_canonical_scalars(std::span<const Fr> s) {
  std::vector<U256> out(s.size());
  for (size_t i = 0; i < s.size(); ++i) out[i] = s[i].to_canonical();
  return out;
}

template <class F, class Cfg>
FixedBaseTable<F, Cfg>::FixedBaseTable(const AffinePoint<F, Cfg>& base) {
  using Point = JacobianPoint<F, Cfg>;
  constexpr size_t kPerWindow = (size_t{1} << kWindow) - 1;
  std::vector<Point> all;
  all.reserve(kWindows * kPerWindow);
  Point window_base(base);
  for (size_t w = 0; w < kWindows; ++w) {
    Point acc = window_base;
    for (size_t d = 0; d < kPerWindow; ++d) {
      all.push_back(acc);
      acc += window_base;
    }
    window_base = acc;  // 2^kWindow * previous base
  }
  const auto affine = batch_to_affine<F, Cfg>(all);
  table_.resize(kWindows);
  for (size_t w = 0; w < kWindows; ++w) {
    table_[w].assign(affine.begin() + static_cast<long>(w * kPerWindow),
                     affine.begin() + static_cast<long>((w + 1) * kPerWindow));
  }
}

template <class F, class Cfg>
JacobianPoint<F, Cfg> FixedBaseTable<F, Cfg>::mul(const U256& k) const {
  JacobianPoint<F, Cfg> acc;
  for (size_t w = 0; w < kWindows; ++w) {
    const uint64_t d = k.bits(w * kWindow, kWindow);
    if (d != 0) acc = acc.add_mixed(table_[w][d - 1]);
  }
  return acc;
}

template <class F, class Cfg>
std::vector<AffinePoint<F, Cfg>> FixedBaseTable<F, Cfg>::batch_mul(
    std::span<const Fr> scalars, Exec exec) const {
  std::vector<JacobianPoint<F, Cfg>> out(scalars.size());
  const auto n = static_cast<long long>(scalars.size());
  if (exec == Exec::kParallel) {
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < n; ++i) {
      out[static_cast<size_t>(i)] = mul(scalars[static_cast<size_t>(i)].to_canonical());
    }
  } else {
    for (long long i = 0; i < n; ++i) {
      out[static_cast<size_t>(i)] = mul(scalars[static_cast<size_t>(i)].to_canonical());
    }
  }
  return batch_to_affine<F, Cfg>(out);
}

#define ZKMCP_INSTANTIATE_MSM(F, Cfg)                                         \
  template JacobianPoint<F, Cfg> msm_naive<F, Cfg>(                           \
      std::span<const AffinePoint<F, Cfg>>, std::span<const U256>);           \
  template JacobianPoint<F, Cfg> msm_serial<F, Cfg>(                          \
      std::span<const AffinePoint<F, Cfg>>, std::span<const U256>);           \
  template JacobianPoint<F, Cfg> msm_parallel<F, Cfg>(                        \
      std::span<const AffinePoint<F, Cfg>>, std::span<const U256>);           \
  template class FixedBaseTable<F, Cfg>;

ZKMCP_INSTANTIATE_MSM(Fq, G1Config)
ZKMCP_INSTANTIATE_MSM(Fq2, G2Config)

#undef ZKMCP_INSTANTIATE_MSM

}  // namespace zkmcp
