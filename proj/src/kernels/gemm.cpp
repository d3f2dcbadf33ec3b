#include "amr/kernels/gemm.hpp"

#include <algorithm>
#include <vector>

#include <omp.h>

namespace amr::kernels {

namespace {

template <typename T>
struct Blocking {
  static constexpr std::size_t MR = 6;
  static constexpr std::size_t NR = 2 * 64 / sizeof(T);  // two 512-bit lanes
  static constexpr std::size_t KC = 256;
  static constexpr std::size_t MC = 120;
  static constexpr std::size_t NC = 2048;
};

template <typename T>
inline T load(const T* p, std::size_t ld, Trans t, std::size_t row, std::size_t col) {
  return t == Trans::no ? p[row * ld + col] : p[col * ld + row];
}

template <typename T>
void micro_kernel(std::size_t kc, const T* __restrict ap, const T* __restrict bp, T* __restrict c,
                  std::size_t ldc, std::size_t mr, std::size_t nr) {
  constexpr std::size_t MR = Blocking<T>::MR, NR = Blocking<T>::NR;
  T acc[MR][NR] = {};
  for (std::size_t p = 0; p < kc; ++p) {
    const T* b = bp + p * NR;
    const T* a = ap + p * MR;
    for (std::size_t i = 0; i < MR; ++i) {
      const T av = a[i];
#pragma omp simd
      for (std::size_t j = 0; j < NR; ++j) acc[i][j] += av * b[j];
    }
  }
  if (mr == MR && nr == NR) {
    for (std::size_t i = 0; i < MR; ++i) {
#pragma omp simd
      for (std::size_t j = 0; j < NR; ++j) c[i * ldc + j] += acc[i][j];
    }
  } else {
    for (std::size_t i = 0; i < mr; ++i)
      for (std::size_t j = 0; j < nr; ++j) c[i * ldc + j] += acc[i][j];
  }
}

template <typename T>
void scale_c(std::size_t m, std::size_t n, T beta, T* c, std::size_t ldc) {
  if (beta == T(1)) return;
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < m; ++i) {
    T* row = c + i * ldc;
    if (beta == T(0)) {
      std::fill(row, row + n, T(0));
    } else {
      for (std::size_t j = 0; j < n; ++j) row[j] *= beta;
    }
  }
}

}  // namespace

template <typename T>
void gemm(Trans ta, Trans tb, std::size_t m, std::size_t n, std::size_t k, T alpha, const T* a,
          std::size_t lda, const T* b, std::size_t ldb, T beta, T* c, std::size_t ldc) {
  using B = Blocking<T>;
  constexpr std::size_t MR = B::MR, NR = B::NR, KC = B::KC, MC = B::MC, NC = B::NC;
  if (m == 0 || n == 0) return;
  scale_c(m, n, beta, c, ldc);
  if (k == 0 || alpha == T(0)) return;

  std::vector<T> bpack(KC * ((std::min(NC, n) + NR - 1) / NR) * NR);
  const std::size_t n_ic = (m + MC - 1) / MC;

#pragma omp parallel
  {
    std::vector<T> apack(KC * ((MC + MR - 1) / MR) * MR);
    for (std::size_t jc = 0; jc < n; jc += NC) {
      const std::size_t nc = std::min(NC, n - jc);
      const std::size_t n_panels = (nc + NR - 1) / NR;
      for (std::size_t pc = 0; pc < k; pc += KC) {
        const std::size_t kc = std::min(KC, k - pc);
#pragma omp for schedule(static)
        for (std::size_t jp = 0; jp < n_panels; ++jp) {
          const std::size_t jr = jp * NR;
          const std::size_t nr = std::min(NR, nc - jr);
          T* dst = bpack.data() + jr * kc;
          for (std::size_t p = 0; p < kc; ++p) {
            for (std::size_t j = 0; j < NR; ++j) {
              dst[p * NR + j] = j < nr ? load(b, ldb, tb, pc + p, jc + jr + j) : T(0);
            }
          }
        }  // implicit barrier: B panel complete
#pragma omp for schedule(static)
        for (std::size_t ib = 0; ib < n_ic; ++ib) {
          const std::size_t ic = ib * MC;
          const std::size_t mc = std::min(MC, m - ic);
          for (std::size_t ir = 0; ir < mc; ir += MR) {
            const std::size_t mr = std::min(MR, mc - ir);
            T* dst = apack.data() + ir * kc;
            for (std::size_t p = 0; p < kc; ++p) {
              for (std::size_t i = 0; i < MR; ++i) {
                dst[p * MR + i] = i < mr ? alpha * load(a, lda, ta, ic + ir + i, pc + p) : T(0);
              }
            }
          }
          for (std::size_t jr = 0; jr < nc; jr += NR) {
            for (std::size_t ir = 0; ir < mc; ir += MR) {
              micro_kernel<T>(kc, apack.data() + ir * kc, bpack.data() + jr * kc,
                              c + (ic + ir) * ldc + jc + jr, ldc, std::min(MR, mc - ir),
                              std::min(NR, nc - jr));
            }
          }
        }  // implicit barrier before bpack is overwritten
      }
    }
  }
}

namespace reference {

template <typename T>
void gemm(Trans ta, Trans tb, std::size_t m, std::size_t n, std::size_t k, T alpha, const T* a,
          std::size_t lda, const T* b, std::size_t ldb, T beta, T* c, std::size_t ldc) {
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      T acc = T(0);
      for (std::size_t p = 0; p < k; ++p) acc += load(a, lda, ta, i, p) * load(b, ldb, tb, p, j);
      T& out = c[i * ldc + j];
      out = (beta == T(0) ? T(0) : beta * out) + alpha * acc;
    }
  }
}

template void gemm<float>(Trans, Trans, std::size_t, std::size_t, std::size_t, float, const float*,
                          std::size_t, const float*, std::size_t, float, float*, std::size_t);
template void gemm<double>(Trans, Trans, std::size_t, std::size_t, std::size_t, double,
                           const double*, std::size_t, const double*, std::size_t, double, double*,
                           std::size_t);

}  // namespace reference

template void gemm<float>(Trans, Trans, std::size_t, std::size_t, std::size_t, float, const float*,
                          std::size_t, const float*, std::size_t, float, float*, std::size_t);
template void gemm<double>(Trans, Trans, std::size_t, std::size_t, std::size_t, double,
                           const double*, std::size_t, const double*, std::size_t, double, double*,
                           std::size_t);

}  // namespace amr::kernels
