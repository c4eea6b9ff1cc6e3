#pragma once

#include <cstddef>

// Data-parallel kernels for the solver and quadrature inner loops.
// Scalar reference implementations always exist; an AVX2 variant is selected
// at runtime when the binary was built with AVX2 support and the CPU has it.
// DSMDOT_SIMD=scalar (or =avx2) in the environment overrides the choice.

namespace dsmdot::simd {

enum class Isa { Scalar, Avx2 };

Isa active_isa();
const char* isa_name(Isa isa);

// sum a[i]*b[i]
double dot(const double* a, const double* b, std::size_t n);
// sum w[i]*a[i]*b[i]  (weighted quadrature of a product)
double dot3(const double* w, const double* a, const double* b, std::size_t n);
// y += alpha*x
void axpy(double alpha, const double* x, double* y, std::size_t n);
// y = x + beta*y
void xpby(const double* x, double beta, double* y, std::size_t n);

// 5-point stencil apply: y[k] = d[k]*x[k] + cxm[k]*x[k-1] + cxp[k]*x[k+1]
//                             + cym[k]*x[k-nx] + cyp[k]*x[k+nx], k = 0..nx*ny-1.
// `x` must point at the first real element of a buffer padded by nx zeros on
// both ends; edge coefficients must be zero where a neighbour does not exist.
void stencil5(int nx, int ny, const double* d, const double* cxm, const double* cxp,
              const double* cym, const double* cyp, const double* x, double* y);

namespace detail {

bool compiled_with_avx2();
bool cpu_has_avx2();

double dot_scalar(const double* a, const double* b, std::size_t n);
double dot3_scalar(const double* w, const double* a, const double* b, std::size_t n);
void axpy_scalar(double alpha, const double* x, double* y, std::size_t n);
void xpby_scalar(const double* x, double beta, double* y, std::size_t n);
void stencil5_scalar(int nx, int ny, const double* d, const double* cxm, const double* cxp,
                     const double* cym, const double* cyp, const double* x, double* y);

#ifdef DSMDOT_HAVE_AVX2
double dot_avx2(const double* a, const double* b, std::size_t n);
double dot3_avx2(const double* w, const double* a, const double* b, std::size_t n);
void axpy_avx2(double alpha, const double* x, double* y, std::size_t n);
void xpby_avx2(const double* x, double beta, double* y, std::size_t n);
void stencil5_avx2(int nx, int ny, const double* d, const double* cxm, const double* cxp,
                   const double* cym, const double* cyp, const double* x, double* y);
#endif

} // namespace detail

} // namespace dsmdot::simd
