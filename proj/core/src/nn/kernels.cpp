#include "driveclone/nn/kernels.hpp"

#include <Eigen/Core>

namespace driveclone::nn::kernels {
namespace {
using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMap = Eigen::Map<const RowMat>;
using Map = Eigen::Map<RowMat>;

// Eigen's GEMM packs its operands, so its results do not depend on where they
// live in memory. Its matrix-vector and small coefficient-wise paths do, so
// those shapes go through fixed-order loops.
bool needs_fixed_order(std::size_t rows, std::size_t depth, std::size_t cols) {
  return rows == 1 || cols == 1 || rows + depth + cols < 24;
}
}  // namespace

void gemm_acc(std::size_t m, std::size_t k, std::size_t n, const double* a, const double* b,
              double* c) {
  if (m == 0 || k == 0 || n == 0) return;
  if (needs_fixed_order(m, k, n)) {
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t p = 0; p < k; ++p) {
        const double av = a[i * k + p];
        for (std::size_t j = 0; j < n; ++j) c[i * n + j] += av * b[p * n + j];
      }
    }
    return;
  }
  const auto M = static_cast<Eigen::Index>(m);
  const auto K = static_cast<Eigen::Index>(k);
  const auto N = static_cast<Eigen::Index>(n);
  Map(c, M, N).noalias() += ConstMap(a, M, K) * ConstMap(b, K, N);
}

void gemm_tn_acc(std::size_t m, std::size_t k, std::size_t n, const double* a, const double* b,
                 double* c) {
  if (m == 0 || k == 0 || n == 0) return;
  if (needs_fixed_order(k, m, n)) {
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t p = 0; p < k; ++p) {
        const double av = a[i * k + p];
        for (std::size_t j = 0; j < n; ++j) c[p * n + j] += av * b[i * n + j];
      }
    }
    return;
  }
  const auto M = static_cast<Eigen::Index>(m);
  const auto K = static_cast<Eigen::Index>(k);
  const auto N = static_cast<Eigen::Index>(n);
  Map(c, K, N).noalias() += ConstMap(a, M, K).transpose() * ConstMap(b, M, N);
}

void transpose(std::size_t rows, std::size_t cols, const double* src, double* dst) {
  const auto R = static_cast<Eigen::Index>(rows);
  const auto C = static_cast<Eigen::Index>(cols);
  Map(dst, C, R) = ConstMap(src, R, C).transpose();
}

// Plain loop on purpose: Eigen's vectorized reduction picks its summation
// order from the buffer alignment, which made identical runs differ in the
// last bit.
void column_sum_acc(std::size_t m, std::size_t n, const double* a, double* out) {
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) out[j] += a[i * n + j];
  }
}

}  // namespace driveclone::nn::kernels
