#include "zkmcp/kernels/sparse.hpp"

#include "zkmcp/errors.hpp"

namespace zkmcp {

namespace {

void check(const SparseMatrix& m, std::span<const Fr> z, std::span<Fr> out) {
  if (z.size() < m.cols || out.size() < m.rows()) {
    throw Error(ErrorCode::kShapeMismatch, "spmv operand sizes");
  }
}

}  // namespace

void spmv_serial(const SparseMatrix& m, std::span<const Fr> z, std::span<Fr> out) {
  check(m, z, out);
  for (size_t r = 0; r < m.rows(); ++r) out[r] = m.row_dot(r, z);
}

void spmv_parallel(const SparseMatrix& m, std::span<const Fr> z, std::span<Fr> out) {
  check(m, z, out);
  const auto rows = static_cast<long long>(m.rows());
#pragma omp parallel for schedule(static)
  for (long long r = 0; r < rows; ++r) {
    out[static_cast<size_t>(r)] = m.row_dot(static_cast<size_t>(r), z);
  }
}

}  // namespace zkmcp
