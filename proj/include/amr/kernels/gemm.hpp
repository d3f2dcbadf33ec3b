#pragma once

#include <cstddef>

namespace amr::kernels {

enum class Trans : bool { no = false, yes = true };

/// C = alpha * op(A) * op(B) + beta * C, row-major with leading dimensions.
/// op(A) is m x k, op(B) is k x n. Cache-blocked, packed, OpenMP-parallel
/// over row blocks of C. Every element of C is produced by a single thread
/// summing over k in a fixed order, so results do not depend on the thread
/// count.
template <typename T>
void gemm(Trans ta, Trans tb, std::size_t m, std::size_t n, std::size_t k, T alpha, const T* a,
          std::size_t lda, const T* b, std::size_t ldb, T beta, T* c, std::size_t ldc);

namespace reference {

/// Serial triple loop with the same contract; the test oracle for gemm.
template <typename T>
void gemm(Trans ta, Trans tb, std::size_t m, std::size_t n, std::size_t k, T alpha, const T* a,
          std::size_t lda, const T* b, std::size_t ldb, T beta, T* c, std::size_t ldc);

}  // namespace reference

}  // namespace amr::kernels
