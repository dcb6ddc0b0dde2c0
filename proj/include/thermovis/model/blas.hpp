#pragma once

namespace thermovis {

/// Row-major C = alpha * op(A) * op(B) + beta * C, backed by CBLAS.
template <typename T>
void gemm(bool trans_a, bool trans_b, int m, int n, int k, T alpha, const T* a, int lda,
          const T* b, int ldb, T beta, T* c, int ldc);

}  // namespace thermovis
