#pragma once

#include <cstdint>

namespace deynet {

// Row-major C = alpha * op(A) * op(B) + beta * C via OpenBLAS dgemm.
void gemm(bool trans_a, bool trans_b, std::int64_t m, std::int64_t n, std::int64_t k,
          double alpha, const double* a, std::int64_t lda, const double* b, std::int64_t ldb,
          double beta, double* c, std::int64_t ldc);

// Fixes the BLAS thread count. Results are bit-reproducible for a fixed
// setting; the default of 1 keeps them reproducible across machines with
// different core counts as well.
void set_blas_threads(int n);
int blas_threads();

}  // namespace deynet
