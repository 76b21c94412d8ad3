// SPDX-License-Identifier: Apache-2.0
#include "tensor/gemm.hpp"

#include <vector>

#ifdef BGCNN_HAVE_CBLAS
#include <cblas.h>
#endif

namespace bgcnn {

namespace {

#ifdef BGCNN_HAVE_CBLAS

void blas_gemm(bool ta, bool tb, std::size_t m, std::size_t n, std::size_t k, const float* a, const float* b,
               float* c) {
  cblas_sgemm(CblasRowMajor, ta ? CblasTrans : CblasNoTrans, tb ? CblasTrans : CblasNoTrans, static_cast<int>(m),
              static_cast<int>(n), static_cast<int>(k), 1.0f, a, static_cast<int>(ta ? m : k), b,
              static_cast<int>(tb ? k : n), 1.0f, c, static_cast<int>(n));
}

void blas_gemm(bool ta, bool tb, std::size_t m, std::size_t n, std::size_t k, const double* a, const double* b,
               double* c) {
  cblas_dgemm(CblasRowMajor, ta ? CblasTrans : CblasNoTrans, tb ? CblasTrans : CblasNoTrans, static_cast<int>(m),
              static_cast<int>(n), static_cast<int>(k), 1.0, a, static_cast<int>(ta ? m : k), b,
              static_cast<int>(tb ? k : n), 1.0, c, static_cast<int>(n));
}

#else

// Row-axpy form; transposed operands are copied to row-major first so the
// inner loop always walks contiguous memory.
template <typename T>
void portable_gemm(bool ta, bool tb, std::size_t m, std::size_t n, std::size_t k, const T* a, const T* b, T* c) {
  std::vector<T> at, bt;
  if (ta) {
    at.resize(m * k);
    for (std::size_t p = 0; p < k; ++p)
      for (std::size_t i = 0; i < m; ++i) at[i * k + p] = a[p * m + i];
    a = at.data();
  }
  if (tb) {
    bt.resize(k * n);
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t p = 0; p < k; ++p) bt[p * n + j] = b[j * k + p];
    b = bt.data();
  }
  for (std::size_t i = 0; i < m; ++i) {
    T* crow = c + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const T s = a[i * k + p];
      if (s == T(0)) continue;
      const T* brow = b + p * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] += s * brow[j];
    }
  }
}

#endif

}  // namespace

template <typename T>
void gemm_accumulate(bool trans_a, bool trans_b, std::size_t m, std::size_t n, std::size_t k, const T* a, const T* b,
                     T* c) {
  if (m == 0 || n == 0 || k == 0) return;
#ifdef BGCNN_HAVE_CBLAS
  blas_gemm(trans_a, trans_b, m, n, k, a, b, c);
#else
  portable_gemm(trans_a, trans_b, m, n, k, a, b, c);
#endif
}

const char* gemm_backend() {
#ifdef BGCNN_HAVE_CBLAS
  return "cblas";
#else
  return "portable";
#endif
}

template void gemm_accumulate<float>(bool, bool, std::size_t, std::size_t, std::size_t, const float*, const float*,
                                     float*);
template void gemm_accumulate<double>(bool, bool, std::size_t, std::size_t, std::size_t, const double*,
                                      const double*, double*);

}  // namespace bgcnn
