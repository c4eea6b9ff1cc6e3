#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "dsmdot/analytic.hpp"
#include "dsmdot/dsm.hpp"
#include "dsmdot/solver.hpp"

using namespace dsmdot;

namespace {
const double kPi = std::numbers::pi;

// Ascending power series for the modified Bessel function of the first kind,
// 30 terms; independent oracle for the implementation's ratio.
double bessel_i_series(int n, double x) {
    double term = std::pow(x / 2, n);
    for (int k = 1; k <= n; ++k) term /= k;
    double sum = term;
    for (int k = 1; k < 30; ++k) {
        term *= (x / 2) * (x / 2) / (k * (n + k));
        sum += term;
    }
    return sum;
}

Vec2 polar(double r, double t) { return {r * std::cos(t), r * std::sin(t)}; }

} // namespace

TEST_CASE("poisson kernel values") {
    CHECK(disk_poisson_eta({0, 0}, 0.3) == doctest::Approx(1 / (2 * kPi)).epsilon(1e-14));
    CHECK(disk_poisson_eta({0, 0}, 2.7) == doctest::Approx(1 / (2 * kPi)).epsilon(1e-14));
    CHECK(disk_poisson_eta({0.5, 0}, 0.0) == doctest::Approx(3 / (2 * kPi)).epsilon(1e-14));
    CHECK_THROWS_AS(disk_poisson_eta({1.0, 0}, 0.1), PointOnBoundary);

    // unit mass: the kernel integrates to one over the circle
    const int n = 4096;
    double integral = 0;
    for (int k = 0; k < n; ++k) integral += disk_poisson_eta({0.37, -0.21}, 2 * kPi * k / n);
    integral *= 2 * kPi / n;
    CHECK(integral == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("disk H1 duality closed form") {
    // truncated series oracle: (1/pi) sum n q^n at q = 0.25
    double oracle = 0;
    for (int n = 1; n <= 100; ++n) oracle += n * std::pow(0.25, n);
    oracle /= kPi;
    CHECK(disk_duality_H1({0.5, 0}, {0.5, 0}) == doctest::Approx(oracle).epsilon(1e-12));
    CHECK(disk_duality_H1({0.5, 0}, {0.5, 0}) == doctest::Approx(0.14147).epsilon(1e-4));

    CHECK(disk_duality_H1({0, 0}, {0.3, 0.4}) == 0.0);

    std::mt19937 rng(5);
    std::uniform_real_distribution<double> ur(0, 0.95), ut(0, 2 * kPi);
    for (int t = 0; t < 1000; ++t) {
        const Vec2 x = polar(ur(rng), ut(rng));
        const Vec2 z = polar(ur(rng), ut(rng));
        CHECK(disk_duality_H1(x, z) == disk_duality_H1(z, x));  // exact swap symmetry
    }
}

TEST_CASE("disk eta norms closed forms") {
    const DiskNorms n0 = disk_eta_norms({0, 0});
    CHECK(n0.h0_sq == doctest::Approx(1 / (2 * kPi)).epsilon(1e-14));
    CHECK(n0.h1_sq == 0.0);

    const DiskNorms nh = disk_eta_norms({0.5, 0});
    CHECK(nh.h0_sq == doctest::Approx(5 / (6 * kPi)).epsilon(1e-13));
    // (1/pi) * 0.25 * 1.25 / 0.421875
    CHECK(nh.h1_sq == doctest::Approx(0.235785100876882).epsilon(1e-12));

    // quadrature oracle from the independent pointwise closed forms:
    // eta = (1-r^2)/(2 pi D), d(eta)/dtheta = -(1-r^2) r sin(theta-tx) / (pi D^2)
    const double r = 0.5, tx = 0.77;
    const int nq = 4096;
    double h0 = 0, h1 = 0;
    for (int k = 0; k < nq; ++k) {
        const double th = 2 * kPi * k / nq;
        const double D = 1 - 2 * r * std::cos(th - tx) + r * r;
        const double eta = (1 - r * r) / (2 * kPi * D);
        const double de = -(1 - r * r) * r * std::sin(th - tx) / (kPi * D * D);
        h0 += eta * eta;
        h1 += de * de;
    }
    h0 *= 2 * kPi / nq;
    h1 *= 2 * kPi / nq;
    const DiskNorms nc = disk_eta_norms(polar(r, tx));
    CHECK(h0 == doctest::Approx(nc.h0_sq).epsilon(1e-6));
    CHECK(h1 == doctest::Approx(nc.h1_sq).epsilon(1e-6));
}

TEST_CASE("eta series matches the poisson kernel pointwise") {
    std::vector<double> thetas;
    for (int k = 0; k < 64; ++k) thetas.push_back(2 * kPi * k / 64);
    std::vector<double> eta(64), de(64), le(64);
    const Vec2 x = polar(0.7, 1.1);
    disk_eta_series(x, thetas, eta, de, le);
    for (int k = 0; k < 64; ++k) {
        CHECK(eta[k] == doctest::Approx(disk_poisson_eta(x, thetas[k])).epsilon(1e-10));
    }
}

TEST_CASE("Gz series has zero circle mean") {
    const int n = 512;
    std::vector<double> thetas(n), g(n);
    for (int k = 0; k < n; ++k) thetas[k] = 2 * kPi * k / n;
    disk_Gz_series({0.4, -0.3}, thetas, g);
    double mean = 0;
    for (double v : g) mean += v;
    CHECK(std::abs(mean / n) < 1e-14);
}

TEST_CASE("full-circle kernel") {
    const Grid2D g = build_grid(DomainGeometry::unit_disk(), 0.05);
    const BoundaryMesh gamma = boundary_trace(g);
    CHECK(disk_kernel_K({0, 0}, {0, 0}, gamma) == 0.0);
    CHECK(disk_kernel_K({0, 0}, {0.3, 0.2}, gamma) == 0.0);

    // matches the closed-form composition
    const Vec2 x{0.4, 0.1}, z{0.2, -0.3};
    const DiskNorms n = disk_eta_norms(x);
    const double want = disk_duality_H1(x, z) / (std::pow(n.h1_sq, 0.25) * std::pow(n.h0_sq, 0.375));
    CHECK(disk_kernel_K(x, z, gamma) == doctest::Approx(want).epsilon(1e-14));
}

TEST_CASE("arc kernel quadrature approaches the closed form on a near-full arc") {
    const Grid2D g = build_grid(DomainGeometry::unit_disk_arc(0, 2 * kPi - 1e-9), 0.002);
    const BoundaryMesh arc = boundary_trace(g);
    const Grid2D gf = build_grid(DomainGeometry::unit_disk(), 0.002);
    const BoundaryMesh full = boundary_trace(gf);
    const Vec2 x{0.35, 0.2}, z{-0.1, 0.3};
    CHECK(disk_kernel_K(x, z, arc) == doctest::Approx(disk_kernel_K(x, z, full)).epsilon(1e-5));
}

TEST_CASE("arc kernel throws past the certified series radius") {
    const Grid2D g = build_grid(DomainGeometry::unit_disk_arc(0, kPi), 0.01);
    const BoundaryMesh arc = boundary_trace(g);
    CHECK_THROWS_AS(disk_kernel_K({0.97, 0.0}, {-0.41, 0.32}, arc), TruncationNotConverged);
}

TEST_CASE("bessel coefficient ratio") {
    CHECK(bessel_coeff_ratio(0, 2.0, 1.0) == doctest::Approx(1.0).epsilon(1e-14));
    // I1(1)/I1(2) against the 30-term power-series oracle
    const double oracle = bessel_i_series(1, 1.0) / bessel_i_series(1, 2.0);
    CHECK(bessel_coeff_ratio(1, 2.0, 0.5) == doctest::Approx(oracle).epsilon(1e-12));
    CHECK(bessel_coeff_ratio(1, 2.0, 0.5) == doctest::Approx(0.35531).epsilon(1e-4));
    CHECK(bessel_coeff_ratio(5, 2.0, 0.5) ==
          doctest::Approx(bessel_i_series(5, 1.0) / bessel_i_series(5, 2.0)).epsilon(1e-12));

    // asymptotic regime: ratio / r^n -> 1
    const double ratio40 = bessel_coeff_ratio(40, 1.0, 0.5);
    CHECK(std::abs(ratio40 / std::pow(0.5, 40) - 1.0) <= 1e-2);
    // beyond the switch order the asymptote is used directly
    CHECK(bessel_coeff_ratio(80, 1.0, 0.5) == doctest::Approx(std::pow(0.5, 80)).epsilon(1e-14));

    CHECK_THROWS(bessel_coeff_ratio(1, -1.0, 0.5));
    CHECK_THROWS(bessel_coeff_ratio(1, 1.0, 1.5));
}

TEST_CASE("bessel probing series reduces to the poisson kernel as mu0 -> 0") {
    std::vector<double> thetas;
    for (int k = 0; k < 128; ++k) thetas.push_back(2 * kPi * k / 128);
    std::vector<double> eta(128), de(128), le(128);
    const Vec2 x = polar(0.55, -0.8);
    disk_eta_series_bessel(x, 1e-4, thetas, eta, de, le);
    for (int k = 0; k < 128; ++k) {
        CHECK(eta[k] == doctest::Approx(disk_poisson_eta(x, thetas[k])).epsilon(1e-5));
    }
    // absorption flattens the probe: the n = 0 share drops below 1/(2 pi)
    disk_eta_series_bessel(x, 3.0, thetas, eta, de, le);
    double mean = 0;
    for (double v : eta) mean += v / 128;
    CHECK(mean < 1 / (2 * kPi));
    CHECK(mean > 0);
}

TEST_CASE("bessel duality series") {
    CHECK(disk_duality_H1_bessel({0, 0}, {0.3, 0.1}, 2.0) == doctest::Approx(0.0).epsilon(1e-14));

    // small-absorption limit agrees with the closed form
    const Vec2 x{0.5, 0}, z{0.3, 0.1};
    CHECK(disk_duality_H1_bessel(x, z, 1e-3) ==
          doctest::Approx(disk_duality_H1(x, z)).epsilon(1e-3));

    // frozen value from an independent special-function evaluation
    CHECK(disk_duality_H1_bessel(x, z, 2.0) == doctest::Approx(0.01913546950875733).epsilon(1e-9));

    std::mt19937 rng(17);
    std::uniform_real_distribution<double> ur(0, 0.8), ut(0, 2 * kPi);
    for (int t = 0; t < 50; ++t) {
        const Vec2 a = polar(ur(rng), ut(rng));
        const Vec2 b = polar(ur(rng), ut(rng));
        const double ab = disk_duality_H1_bessel(a, b, 2.0);
        const double ba = disk_duality_H1_bessel(b, a, 2.0);
        CHECK(ab == doctest::Approx(ba).epsilon(1e-12));
    }
}

TEST_CASE("image family formulas") {
    const RectStrip s = RectStrip::from(DomainGeometry::rectangle(-1, 1, 0, 0.4, {Side::Bottom, Side::Top}));
    CHECK(s.hu == doctest::Approx(0.4));
    CHECK(s.L == doctest::Approx(1.0));
    double u, v;
    s.to_uv({0.3, 0.25}, u, v);
    CHECK(u == doctest::Approx(0.25));
    CHECK(v == doctest::Approx(0.3));

    // identity image
    const Vec2 base = rect_image_point(s, u, v, 1, 0, 0);
    CHECK(base.x == u);
    CHECK(base.y == v);
    // reflection formulas, exact
    std::mt19937 rng(3);
    std::uniform_int_distribution<int> ui(-5, 5);
    for (int t = 0; t < 100; ++t) {
        const int i1 = ui(rng), i2 = ui(rng);
        CHECK(rect_image_point(s, u, v, 1, i1, i2).x == u + 2 * s.hu * i1);
        CHECK(rect_image_point(s, u, v, 1, i1, i2).y == v + 4 * s.L * i2);
        CHECK(rect_image_point(s, u, v, 2, i1, i2).y == 2 * s.L - v + 4 * s.L * i2);
        CHECK(rect_image_point(s, u, v, 3, i1, i2).x == -u + 2 * s.hu * i1);
        CHECK(rect_image_point(s, u, v, 4, i1, i2).x == -u + 2 * s.hu * i1);
        CHECK(rect_image_point(s, u, v, 4, i1, i2).y == 2 * s.L - v + 4 * s.L * i2);
    }
    CHECK_THROWS(rect_image_point(s, u, v, 5, 0, 0));
}

TEST_CASE("leading image term is the free-space flux") {
    const RectStrip s = RectStrip::from(DomainGeometry::rectangle(-1, 1, 0, 0.4, {Side::Bottom, Side::Top}));
    const double u = 0.15, v = -0.2, vy = 0.33;
    const double term = rect_eta_term(s, u, v, true, vy, 1, 0, 0);
    const double dv = vy - v;
    const double want = -(s.hu - u) / ((s.hu - u) * (s.hu - u) + dv * dv) / (2 * kPi);
    CHECK(term == doctest::Approx(want).epsilon(1e-15));
}

TEST_CASE("ladder flux: reflection symmetry on a square") {
    const RectStrip s =
        RectStrip::from(DomainGeometry::rectangle(0, 1, -0.5, 0.5, {Side::Left, Side::Right}));
    // x on the vertical midline: u = 0.5
    const Vec2 x{0.5, 0.1};
    const double lo = rect_eta(s, x, 0.0, false);
    const double hi = rect_eta(s, x, 0.0, true);
    CHECK(lo == doctest::Approx(hi).epsilon(1e-13));
}

TEST_CASE("ladder flux row sum converges fast") {
    const RectStrip s = RectStrip::from(DomainGeometry::rectangle(-1, 1, 0, 0.4, {Side::Bottom, Side::Top}));
    const Vec2 x{0.2, 0.13};
    const double few = rect_eta(s, x, 0.4, true, 2);
    const double many = rect_eta(s, x, 0.4, true, 20);
    CHECK(few == doctest::Approx(many).epsilon(1e-10));
    CHECK_THROWS_AS(rect_eta(s, Vec2{1.5, 0.2}, 0.0, true), PointOutsideDomain);
}

TEST_CASE("ladder derivatives are consistent with fine differences") {
    const RectStrip s = RectStrip::from(DomainGeometry::rectangle(-1, 1, 0, 0.4, {Side::Bottom, Side::Top}));
    const double u = 0.13, v = -0.4;
    const int n = 4001;
    const double h = 2.0 / (n - 1);
    std::vector<double> vy(n), eta(n), de(n), le(n);
    for (int k = 0; k < n; ++k) vy[k] = -1.0 + h * k;
    rect_eta_ladder(s, u, v, false, vy, eta, de, le);
    double de_sc = 0, le_sc = 0;
    for (int k = 0; k < n; ++k) {
        de_sc = std::max(de_sc, std::abs(de[k]));
        le_sc = std::max(le_sc, std::abs(le[k]));
    }
    for (int k = 2; k < n - 2; ++k) {
        const double fd1 = (eta[k + 1] - eta[k - 1]) / (2 * h);
        const double fd2 = (eta[k + 1] - 2 * eta[k] + eta[k - 1]) / (h * h);
        CHECK(std::abs(de[k] - fd1) < 1e-4 * de_sc);
        CHECK(std::abs(le[k] - fd2) < 1e-3 * le_sc);
    }
}

TEST_CASE("truncated square image sum stays a reference form") {
    // the square truncation carries a lattice-shape offset; rect_eta (ladder
    // rows) is the convergent evaluation. Verified here only for plumbing.
    const RectStrip s = RectStrip::from(DomainGeometry::rectangle(-1, 1, 0, 0.4, {Side::Bottom, Side::Top}));
    const double v1 = rect_eta_truncated(s, {0.2, 0.13}, 0.4, true, 1);
    const double v2 = rect_eta_truncated(s, {0.2, 0.13}, 0.4, true, 2);
    CHECK(std::isfinite(v1));
    CHECK(std::isfinite(v2));
}
