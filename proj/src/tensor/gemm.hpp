// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>

namespace bgcnn {

/// C[m x n] += op(A) . op(B) for row-major operands, where op(A) is m x k
/// and op(B) is k x n. `trans_a` means A is stored as k x m (likewise B as
/// n x k). Backed by CBLAS when the build enables it.
template <typename T>
void gemm_accumulate(bool trans_a, bool trans_b, std::size_t m, std::size_t n, std::size_t k, const T* a, const T* b,
                     T* c);

/// Name of the kernel backend, for diagnostics ("cblas" or "portable").
const char* gemm_backend();

}  // namespace bgcnn
