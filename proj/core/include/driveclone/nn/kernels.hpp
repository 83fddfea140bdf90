#pragma once

#include <cstddef>

namespace driveclone::nn::kernels {

// Row-major raw-pointer kernels. Accumulation order is fixed, so results are
// reproducible run to run.

/// c[m x n] += a[m x k] * b[k x n]
void gemm_acc(std::size_t m, std::size_t k, std::size_t n, const double* a, const double* b,
              double* c);

/// c[k x n] += a[m x k]^T * b[m x n]
void gemm_tn_acc(std::size_t m, std::size_t k, std::size_t n, const double* a, const double* b,
                 double* c);

/// dst[cols x rows] = src[rows x cols]^T
void transpose(std::size_t rows, std::size_t cols, const double* src, double* dst);

/// out[n] += column sums of a[m x n]
void column_sum_acc(std::size_t m, std::size_t n, const double* a, double* out);

}  // namespace driveclone::nn::kernels
