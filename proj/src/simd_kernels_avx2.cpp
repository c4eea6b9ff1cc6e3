// AVX2 + FMA variants; this translation unit is compiled with -mavx2 -mfma.

#include "dsmdot/simd.hpp"

#ifdef DSMDOT_HAVE_AVX2

#include <immintrin.h>

namespace dsmdot::simd::detail {

namespace {
inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
}
} // namespace

double dot_avx2(const double* a, const double* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
    }
    for (; i + 4 <= n; i += 4) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    }
    double s = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

double dot3_avx2(const double* w, const double* a, const double* b, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d ab = _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
        acc = _mm256_fmadd_pd(_mm256_loadu_pd(w + i), ab, acc);
    }
    double s = hsum(acc);
    for (; i < n; ++i) s += w[i] * a[i] * b[i];
    return s;
}

void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d vy = _mm256_loadu_pd(y + i);
        vy = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), vy);
        _mm256_storeu_pd(y + i, vy);
    }
    for (; i < n; ++i) y[i] += alpha * x[i];
}

void xpby_avx2(const double* x, double beta, double* y, std::size_t n) {
    const __m256d vb = _mm256_set1_pd(beta);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d vy = _mm256_loadu_pd(y + i);
        vy = _mm256_fmadd_pd(vb, vy, _mm256_loadu_pd(x + i));
        _mm256_storeu_pd(y + i, vy);
    }
    for (; i < n; ++i) y[i] = x[i] + beta * y[i];
}

void stencil5_avx2(int nx, int ny, const double* d, const double* cxm, const double* cxp,
                   const double* cym, const double* cyp, const double* x, double* y) {
    const std::size_t n = static_cast<std::size_t>(nx) * ny;
    std::size_t k = 0;
    for (; k + 4 <= n; k += 4) {
        __m256d acc = _mm256_mul_pd(_mm256_loadu_pd(d + k), _mm256_loadu_pd(x + k));
        acc = _mm256_fmadd_pd(_mm256_loadu_pd(cxm + k), _mm256_loadu_pd(x + k - 1), acc);
        acc = _mm256_fmadd_pd(_mm256_loadu_pd(cxp + k), _mm256_loadu_pd(x + k + 1), acc);
        acc = _mm256_fmadd_pd(_mm256_loadu_pd(cym + k), _mm256_loadu_pd(x + k - nx), acc);
        acc = _mm256_fmadd_pd(_mm256_loadu_pd(cyp + k), _mm256_loadu_pd(x + k + nx), acc);
        _mm256_storeu_pd(y + k, acc);
    }
    for (; k < n; ++k) {
        y[k] = d[k] * x[k] + cxm[k] * x[k - 1] + cxp[k] * x[k + 1] +
               cym[k] * x[k - nx] + cyp[k] * x[k + nx];
    }
}

} // namespace dsmdot::simd::detail

#endif // DSMDOT_HAVE_AVX2
