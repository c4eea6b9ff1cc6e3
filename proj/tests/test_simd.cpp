#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <vector>

#include "dsmdot/simd.hpp"

using namespace dsmdot::simd;

namespace {

std::vector<double> random_vec(std::size_t n, std::mt19937& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> v(n);
    for (double& x : v) x = u(rng);
    return v;
}

// Brute 2D reference for the padded stencil layout.
void stencil5_reference(int nx, int ny, const double* d, const double* cxm, const double* cxp,
                        const double* cym, const double* cyp, const double* x, double* y) {
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const int k = j * nx + i;
            double acc = d[k] * x[k];
            if (i > 0) acc += cxm[k] * x[k - 1];
            if (i < nx - 1) acc += cxp[k] * x[k + 1];
            if (j > 0) acc += cym[k] * x[k - nx];
            if (j < ny - 1) acc += cyp[k] * x[k + nx];
            y[k] = acc;
        }
    }
}

struct StencilSetup {
    int nx, ny;
    std::vector<double> d, cxm, cxp, cym, cyp, xpad;
    double* x() { return xpad.data() + nx; }
};

StencilSetup random_stencil(int nx, int ny, std::mt19937& rng) {
    StencilSetup s;
    s.nx = nx;
    s.ny = ny;
    const std::size_t n = static_cast<std::size_t>(nx) * ny;
    s.d = random_vec(n, rng);
    s.cxm = random_vec(n, rng);
    s.cxp = random_vec(n, rng);
    s.cym = random_vec(n, rng);
    s.cyp = random_vec(n, rng);
    for (int j = 0; j < ny; ++j) {
        s.cxm[j * nx] = 0;
        s.cxp[j * nx + nx - 1] = 0;
    }
    for (int i = 0; i < nx; ++i) {
        s.cym[i] = 0;
        s.cyp[(ny - 1) * nx + i] = 0;
    }
    s.xpad.assign(n + 2 * nx, 0.0);
    auto v = random_vec(n, rng);
    std::copy(v.begin(), v.end(), s.xpad.begin() + nx);
    return s;
}

} // namespace

TEST_CASE("dispatch reports a known lane") {
    const Isa isa = active_isa();
    CHECK((isa == Isa::Scalar || isa == Isa::Avx2));
    CHECK(isa_name(Isa::Scalar) == std::string("scalar"));
    CHECK(isa_name(Isa::Avx2) == std::string("avx2"));
    if (isa == Isa::Avx2) {
        CHECK(detail::compiled_with_avx2());
        CHECK(detail::cpu_has_avx2());
    }
}

TEST_CASE("reduction kernels agree across lanes") {
    std::mt19937 rng(11);
    for (std::size_t n : {1u, 3u, 4u, 7u, 8u, 17u, 64u, 1001u}) {
        auto a = random_vec(n, rng), b = random_vec(n, rng), w = random_vec(n, rng);
        const double ds = detail::dot_scalar(a.data(), b.data(), n);
        const double d3s = detail::dot3_scalar(w.data(), a.data(), b.data(), n);
        CHECK(dot(a.data(), b.data(), n) == doctest::Approx(ds).epsilon(1e-13));
        CHECK(dot3(w.data(), a.data(), b.data(), n) == doctest::Approx(d3s).epsilon(1e-13));
#ifdef DSMDOT_HAVE_AVX2
        if (detail::cpu_has_avx2()) {
            CHECK(detail::dot_avx2(a.data(), b.data(), n) == doctest::Approx(ds).epsilon(1e-13));
            CHECK(detail::dot3_avx2(w.data(), a.data(), b.data(), n) ==
                  doctest::Approx(d3s).epsilon(1e-13));
        }
#endif
    }
}

TEST_CASE("update kernels agree across lanes") {
    std::mt19937 rng(12);
    for (std::size_t n : {1u, 5u, 8u, 33u, 1000u}) {
        auto x = random_vec(n, rng);
        auto y0 = random_vec(n, rng);
        auto y_ref = y0, y_disp = y0;
        detail::axpy_scalar(0.37, x.data(), y_ref.data(), n);
        axpy(0.37, x.data(), y_disp.data(), n);
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(y_disp[i] == doctest::Approx(y_ref[i]).epsilon(1e-14));
        }
        y_ref = y0;
        y_disp = y0;
        detail::xpby_scalar(x.data(), -1.91, y_ref.data(), n);
        xpby(x.data(), -1.91, y_disp.data(), n);
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(y_disp[i] == doctest::Approx(y_ref[i]).epsilon(1e-14));
        }
    }
}

TEST_CASE("stencil kernel matches a brute 2D reference") {
    std::mt19937 rng(13);
    for (auto [nx, ny] : {std::pair{5, 4}, {16, 9}, {37, 11}}) {
        StencilSetup s = random_stencil(nx, ny, rng);
        const std::size_t n = static_cast<std::size_t>(nx) * ny;
        std::vector<double> y_ref(n), y(n);
        stencil5_reference(nx, ny, s.d.data(), s.cxm.data(), s.cxp.data(), s.cym.data(),
                           s.cyp.data(), s.x(), y_ref.data());
        stencil5(nx, ny, s.d.data(), s.cxm.data(), s.cxp.data(), s.cym.data(), s.cyp.data(),
                 s.x(), y.data());
        for (std::size_t k = 0; k < n; ++k) {
            CHECK(y[k] == doctest::Approx(y_ref[k]).epsilon(1e-13));
        }
#ifdef DSMDOT_HAVE_AVX2
        if (detail::cpu_has_avx2()) {
            std::vector<double> y2(n);
            detail::stencil5_avx2(nx, ny, s.d.data(), s.cxm.data(), s.cxp.data(), s.cym.data(),
                                  s.cyp.data(), s.x(), y2.data());
            for (std::size_t k = 0; k < n; ++k) {
                CHECK(y2[k] == doctest::Approx(y_ref[k]).epsilon(1e-13));
            }
        }
#endif
    }
}
