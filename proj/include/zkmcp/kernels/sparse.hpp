#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "zkmcp/algebra/fields.hpp"
#include "zkmcp/kernels/exec.hpp"

namespace zkmcp {

// Compressed sparse row matrix over Fr.
struct SparseMatrix {
  size_t cols = 0;
  std::vector<uint32_t> row_start{0};
  std::vector<uint32_t> col_index;
  std::vector<Fr> values;

  size_t rows() const { return row_start.size() - 1; }
  size_t nonzeros() const { return values.size(); }

  Fr row_dot(size_t row, std::span<const Fr> z) const {
    Fr acc;
    for (uint32_t k = row_start[row]; k < row_start[row + 1]; ++k) {
      acc += values[k] * z[col_index[k]];
    }
    return acc;
  }
};

// out[r] = <M[r], z> for every row r.
void spmv_serial(const SparseMatrix& m, std::span<const Fr> z, std::span<Fr> out);
void spmv_parallel(const SparseMatrix& m, std::span<const Fr> z, std::span<Fr> out);

inline void spmv(const SparseMatrix& m, std::span<const Fr> z, std::span<Fr> out,
                 Exec exec) {
  if (exec == Exec::kParallel) {
    spmv_parallel(m, z, out);
  } else {
    spmv_serial(m, z, out);
  }
}

}  // namespace zkmcp
