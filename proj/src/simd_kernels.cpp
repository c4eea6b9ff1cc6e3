#include "dsmdot/simd.hpp"

#include <cstdlib>
#include <cstring>

namespace dsmdot::simd {

namespace detail {

double dot_scalar(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

double dot3_scalar(const double* w, const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += w[i] * a[i] * b[i];
    return s;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void xpby_scalar(const double* x, double beta, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] = x[i] + beta * y[i];
}

void stencil5_scalar(int nx, int ny, const double* d, const double* cxm, const double* cxp,
                     const double* cym, const double* cyp, const double* x, double* y) {
    const std::size_t n = static_cast<std::size_t>(nx) * ny;
    for (std::size_t k = 0; k < n; ++k) {
        y[k] = d[k] * x[k] + cxm[k] * x[k - 1] + cxp[k] * x[k + 1] +
               cym[k] * x[k - nx] + cyp[k] * x[k + nx];
    }
}

bool compiled_with_avx2() {
#ifdef DSMDOT_HAVE_AVX2
    return true;
#else
    return false;
#endif
}

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(__i386__)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

} // namespace detail

namespace {

Isa detect_isa() {
    if (const char* env = std::getenv("DSMDOT_SIMD")) {
        if (std::strcmp(env, "scalar") == 0) return Isa::Scalar;
#ifdef DSMDOT_HAVE_AVX2
        if (std::strcmp(env, "avx2") == 0 && detail::cpu_has_avx2()) return Isa::Avx2;
#endif
        return Isa::Scalar;
    }
#ifdef DSMDOT_HAVE_AVX2
    if (detail::cpu_has_avx2()) return Isa::Avx2;
#endif
    return Isa::Scalar;
}

} // namespace

Isa active_isa() {
    static const Isa isa = detect_isa();
    return isa;
}

const char* isa_name(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

double dot(const double* a, const double* b, std::size_t n) {
#ifdef DSMDOT_HAVE_AVX2
    if (active_isa() == Isa::Avx2) return detail::dot_avx2(a, b, n);
#endif
    return detail::dot_scalar(a, b, n);
}

double dot3(const double* w, const double* a, const double* b, std::size_t n) {
#ifdef DSMDOT_HAVE_AVX2
    if (active_isa() == Isa::Avx2) return detail::dot3_avx2(w, a, b, n);
#endif
    return detail::dot3_scalar(w, a, b, n);
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
#ifdef DSMDOT_HAVE_AVX2
    if (active_isa() == Isa::Avx2) { detail::axpy_avx2(alpha, x, y, n); return; }
#endif
    detail::axpy_scalar(alpha, x, y, n);
}

void xpby(const double* x, double beta, double* y, std::size_t n) {
#ifdef DSMDOT_HAVE_AVX2
    if (active_isa() == Isa::Avx2) { detail::xpby_avx2(x, beta, y, n); return; }
#endif
    detail::xpby_scalar(x, beta, y, n);
}

void stencil5(int nx, int ny, const double* d, const double* cxm, const double* cxp,
              const double* cym, const double* cyp, const double* x, double* y) {
#ifdef DSMDOT_HAVE_AVX2
    if (active_isa() == Isa::Avx2) {
        detail::stencil5_avx2(nx, ny, d, cxm, cxp, cym, cyp, x, y);
        return;
    }
#endif
    detail::stencil5_scalar(nx, ny, d, cxm, cxp, cym, cyp, x, y);
}

} // namespace dsmdot::simd
