#include "dsmdot/analytic.hpp"

#include <cmath>
#include <complex>
#include <numbers>

namespace dsmdot {

namespace {

constexpr double kPi = std::numbers::pi;

void to_polar(Vec2 p, double& r, double& theta) {
    r = std::hypot(p.x, p.y);
    theta = std::atan2(p.y, p.x);
}

// Truncation order giving a series tail below 1e-12 for coefficient decay r^n.
int series_order(double r_max) {
    if (r_max < 1e-8) return 8;
    if (r_max >= 1.0) throw PointOnBoundary("series point on or outside the circle");
    int n = static_cast<int>(std::ceil(std::log(1e-12) / std::log(r_max)));
    n = std::max(n, 8);
    if (n > 200) {
        const double tail = 200.0 * 200.0 * std::pow(r_max, 200) / (1.0 - r_max);
        if (tail > 1e-8) {
            throw TruncationNotConverged("series order cap reached at radius " + std::to_string(r_max));
        }
        n = 200;
    }
    return n;
}

} // namespace

// ---------------------------------------------------------------- unit disk

double disk_poisson_eta(Vec2 x, double theta) {
    const double r2 = x.x * x.x + x.y * x.y;
    if (r2 >= (1.0 - 1e-12) * (1.0 - 1e-12)) throw PointOnBoundary("poisson kernel pole");
    const double dx = x.x - std::cos(theta);
    const double dy = x.y - std::sin(theta);
    return (1.0 - r2) / (2 * kPi * (dx * dx + dy * dy));
}

double disk_duality_H1(Vec2 x, Vec2 z) {
    // p = x.z and q = |x||z| keep the value exactly symmetric under swap.
    const double p = x.x * z.x + x.y * z.y;
    const double q = std::hypot(x.x, x.y) * std::hypot(z.x, z.y);
    const double den = 1.0 - 2.0 * p + q * q;
    return (p * (1.0 + q * q) - 2.0 * q * q) / (kPi * den * den);
}

DiskNorms disk_eta_norms(Vec2 x) {
    const double r2 = x.x * x.x + x.y * x.y;
    if (r2 >= (1.0 - 1e-12) * (1.0 - 1e-12)) throw PointOnBoundary("eta norms at the circle");
    DiskNorms n;
    n.h0_sq = (1.0 + r2) / (2 * kPi * (1.0 - r2));
    n.h1_sq = r2 * (r2 + 1.0) / (kPi * (1.0 - r2) * (1.0 - r2) * (1.0 - r2));
    return n;
}

void disk_eta_series(Vec2 x, std::span<const double> thetas, std::span<double> eta,
                     std::span<double> deta, std::span<double> lap_eta, int n_max, double r_hint) {
    double r, tx;
    to_polar(x, r, tx);
    if (n_max <= 0) n_max = series_order(std::max(r, r_hint));
    for (std::size_t k = 0; k < thetas.size(); ++k) {
        const double d = thetas[k] - tx;
        const double c1 = std::cos(d), s1 = std::sin(d);
        double cn = c1, sn = s1, rn = r;
        double se = 0, sd = 0, sl = 0;
        for (int n = 1; n <= n_max; ++n) {
            se += rn * cn;
            sd += n * rn * sn;
            sl += static_cast<double>(n) * n * rn * cn;
            const double cn1 = cn * c1 - sn * s1;
            sn = sn * c1 + cn * s1;
            cn = cn1;
            rn *= r;
        }
        if (!eta.empty()) eta[k] = (1.0 + 2.0 * se) / (2 * kPi);
        if (!deta.empty()) deta[k] = -2.0 * sd / (2 * kPi);
        if (!lap_eta.empty()) lap_eta[k] = -2.0 * sl / (2 * kPi);
    }
}

void disk_Gz_series(Vec2 z, std::span<const double> thetas, std::span<double> g, int n_max,
                    double r_hint) {
    double r, tz;
    to_polar(z, r, tz);
    if (n_max <= 0) n_max = series_order(std::max(r, r_hint));
    for (std::size_t k = 0; k < thetas.size(); ++k) {
        const double d = thetas[k] - tz;
        const double c1 = std::cos(d), s1 = std::sin(d);
        double cn = c1, sn = s1, rn = r;
        double s = 0;
        for (int n = 1; n <= n_max; ++n) {
            s += rn * cn / n;
            const double cn1 = cn * c1 - sn * s1;
            sn = sn * c1 + cn * s1;
            cn = cn1;
            rn *= r;
        }
        g[k] = 2.0 * s / (2 * kPi);
    }
}

double disk_kernel_K(Vec2 x, Vec2 z, const BoundaryMesh& gamma) {
    const double rx = std::hypot(x.x, x.y);
    if (rx < 1e-12) return 0.0;  // removable: numerator and norms both vanish
    if (gamma.segments.size() == 1 && gamma.segments[0].closed) {
        const DiskNorms n = disk_eta_norms(x);
        if (n.h1_sq <= 0.0) return 0.0;
        return disk_duality_H1(x, z) / (std::pow(n.h1_sq, 0.25) * std::pow(n.h0_sq, 0.375));
    }
    // Arc: every factor from the truncated series, trapezoid over the arc mesh.
    const double rz = std::hypot(z.x, z.y);
    const int n_max = series_order(std::max(rx, rz));
    double dual = 0, h0_sq = 0, h1_sq = 0;
    std::vector<double> eta, de, le, g;
    for (const auto& seg : gamma.segments) {
        const std::size_t m = seg.size();
        eta.assign(m, 0);
        de.assign(m, 0);
        le.assign(m, 0);
        g.assign(m, 0);
        disk_eta_series(x, seg.arc, eta, de, le, n_max);
        disk_Gz_series(z, seg.arc, g, n_max);
        for (std::size_t k = 0; k < m; ++k) {
            dual += seg.weights[k] * (-le[k]) * g[k];
            h0_sq += seg.weights[k] * eta[k] * eta[k];
            h1_sq += seg.weights[k] * de[k] * de[k];
        }
    }
    if (h1_sq <= 0.0) return 0.0;
    return dual / (std::pow(h1_sq, 0.25) * std::pow(h0_sq, 0.375));
}

void disk_eta_series_bessel(Vec2 x, double sqrt_mu0, std::span<const double> thetas,
                            std::span<double> eta, std::span<double> deta,
                            std::span<double> lap_eta, int n_max) {
    double r, tx;
    to_polar(x, r, tx);
    if (n_max <= 0) n_max = series_order(std::max(r, 1e-3));
    std::vector<double> coeff(static_cast<std::size_t>(n_max) + 1);
    for (int n = 0; n <= n_max; ++n) coeff[n] = bessel_coeff_ratio(n, sqrt_mu0, r);
    for (std::size_t k = 0; k < thetas.size(); ++k) {
        const double d = thetas[k] - tx;
        const double c1 = std::cos(d), s1 = std::sin(d);
        double cn = c1, sn = s1;
        double se = 0, sd = 0, sl = 0;
        for (int n = 1; n <= n_max; ++n) {
            se += coeff[n] * cn;
            sd += n * coeff[n] * sn;
            sl += static_cast<double>(n) * n * coeff[n] * cn;
            const double cn1 = cn * c1 - sn * s1;
            sn = sn * c1 + cn * s1;
            cn = cn1;
        }
        if (!eta.empty()) eta[k] = (coeff[0] + 2.0 * se) / (2 * kPi);
        if (!deta.empty()) deta[k] = -2.0 * sd / (2 * kPi);
        if (!lap_eta.empty()) lap_eta[k] = -2.0 * sl / (2 * kPi);
    }
}

double bessel_coeff_ratio(int n, double sqrt_mu0, double r) {
    n = std::abs(n);
    if (r < 0.0 || r > 1.0) throw std::invalid_argument("bessel_coeff_ratio: r in [0,1]");
    if (sqrt_mu0 <= 0.0) throw std::invalid_argument("bessel_coeff_ratio: sqrt_mu0 > 0");
    if (n > 60) return std::pow(r, n);  // asymptotic regime
    const double den = std::cyl_bessel_i(n, sqrt_mu0);
    const double num = std::cyl_bessel_i(n, sqrt_mu0 * r);
    if (!(den > 0.0) || !std::isfinite(den) || !std::isfinite(num)) return std::pow(r, n);
    return num / den;
}

double disk_duality_H1_bessel(Vec2 x, Vec2 z, double sqrt_mu0, int n_max) {
    double rx, tx, rz, tz;
    to_polar(x, rx, tx);
    to_polar(z, rz, tz);
    const double t = sqrt_mu0;
    double acc = 0.0;
    double last_term = 0.0;
    for (int n = 1; n <= n_max; ++n) {
        double term;
        const double den =
            n <= 60 ? (std::cyl_bessel_i(n - 1, t) + std::cyl_bessel_i(n + 1, t)) * std::cyl_bessel_i(n, t)
                    : 0.0;
        if (den > 0.0 && std::isfinite(den)) {
            term = 2.0 * n * n * std::cyl_bessel_i(n, t * rz) * std::cyl_bessel_i(n, t * rx) /
                   (kPi * t * den);
        } else {
            term = n * std::pow(rz * rx, n) / kPi;  // large-order asymptote of the ratio
        }
        acc += term * std::cos(n * (tx - tz));
        last_term = std::abs(term);
        if (n > 8 && last_term < 1e-16 * std::max(std::abs(acc), 1e-30)) return acc;
    }
    if (last_term > 1e-10 * std::max(std::abs(acc), 1e-30)) {
        throw TruncationNotConverged("bessel duality series at n_max=" + std::to_string(n_max));
    }
    return acc;
}

// ---------------------------------------------------------------- rectangle

RectStrip RectStrip::from(const DomainGeometry& geom) {
    if (geom.kind != DomainGeometry::Kind::Rectangle) throw WrongDomain("rectangle expected");
    RectStrip s;
    const bool tb = geom.has_gamma(Side::Bottom) && geom.has_gamma(Side::Top) &&
                    !geom.has_gamma(Side::Left) && !geom.has_gamma(Side::Right);
    const bool lr = geom.has_gamma(Side::Left) && geom.has_gamma(Side::Right) &&
                    !geom.has_gamma(Side::Bottom) && !geom.has_gamma(Side::Top);
    if (tb) {
        s.measured_y = true;
        s.hu = geom.height();
        s.L = geom.width() / 2;
        s.u_origin = geom.y0;
        s.v_center = (geom.x0 + geom.x1) / 2;
    } else if (lr) {
        s.measured_y = false;
        s.hu = geom.width();
        s.L = geom.height() / 2;
        s.u_origin = geom.x0;
        s.v_center = (geom.y0 + geom.y1) / 2;
    } else {
        throw WrongDomain("gamma must be one opposite-side pair");
    }
    return s;
}

void RectStrip::to_uv(Vec2 p, double& u, double& v) const {
    if (measured_y) {
        u = p.y - u_origin;
        v = p.x - v_center;
    } else {
        u = p.x - u_origin;
        v = p.y - v_center;
    }
}

Vec2 rect_image_point(const RectStrip& s, double u, double v, int k, int i1, int i2) {
    const double pu = 2 * s.hu * i1;
    const double pv = 4 * s.L * i2;
    switch (k) {
        case 1: return {u + pu, v + pv};
        case 2: return {u + pu, 2 * s.L - v + pv};
        case 3: return {-u + pu, v + pv};
        case 4: return {-u + pu, 2 * s.L - v + pv};
        default: throw std::invalid_argument("image class k must be 1..4");
    }
}

double rect_eta_term(const RectStrip& s, double u, double v, bool side_high, double vy,
                     int k, int i1, int i2) {
    const Vec2 img = rect_image_point(s, u, v, k, i1, i2);
    const double sign = k <= 2 ? 1.0 : -1.0;
    const double dv = vy - img.y;
    double num, den;
    if (side_high) {
        num = s.hu - img.x;
        den = num * num + dv * dv;
    } else {
        num = img.x;
        den = img.x * img.x + dv * dv;
    }
    return -sign * num / den / (2 * kPi);
}

double rect_eta_truncated(const RectStrip& s, Vec2 x, double vy, bool side_high, int n_img) {
    double u, v;
    s.to_uv(x, u, v);
    double acc = 0.0;
    for (int k = 1; k <= 4; ++k) {
        for (int i1 = -n_img; i1 <= n_img; ++i1) {
            for (int i2 = -n_img; i2 <= n_img; ++i2) {
                acc += rect_eta_term(s, u, v, side_high, vy, k, i1, i2);
            }
        }
    }
    return acc;
}

namespace {

using complexd = std::complex<double>;

inline complexd cot(complexd z) { return std::cos(z) / std::sin(z); }

// Full i1 ladder of one image row (all reflections across the measured pair,
// same tangential offset dv), in closed form via sum 1/(w - n) = pi*cot(pi*w).
// deriv in {0,1,2} differentiates in the tangential coordinate.
double row_ladder(const RectStrip& s, double u, double dv, bool side_high, int deriv) {
    const double P = 2 * s.hu;
    const double c = kPi / P;
    complexd total;
    if (side_high) {
        const complexd z1 = c * complexd(s.hu - u, -dv);
        const complexd z3 = c * complexd(s.hu + u, -dv);
        switch (deriv) {
            case 0: total = c * (cot(z1) - cot(z3)); break;
            case 1: {
                const complexd i(0.0, 1.0);
                total = c * (i * c / (std::sin(z1) * std::sin(z1)) - i * c / (std::sin(z3) * std::sin(z3)));
                break;
            }
            default: {
                auto f = [&](complexd z) {
                    const complexd sz = std::sin(z);
                    return std::cos(z) / (sz * sz * sz);
                };
                total = c * (-2.0 * c * c) * (f(z1) - f(z3));
                break;
            }
        }
    } else {
        const complexd z1 = c * complexd(u, -dv);
        switch (deriv) {
            case 0: total = 2.0 * c * cot(z1); break;
            case 1: {
                const complexd i(0.0, 1.0);
                total = 2.0 * c * i * c / (std::sin(z1) * std::sin(z1));
                break;
            }
            default: {
                const complexd sz = std::sin(z1);
                total = -4.0 * c * c * c * std::cos(z1) / (sz * sz * sz);
                break;
            }
        }
    }
    return -total.real() / (2 * kPi);
}

} // namespace

double rect_eta(const RectStrip& s, Vec2 x, double vy, bool side_high, int n_img) {
    double u, v;
    s.to_uv(x, u, v);
    if (!(u > 0.0 && u < s.hu && std::abs(v) < s.L)) {
        throw PointOutsideDomain("probing point must be interior");
    }
    double acc = 0.0;
    double shell = 0.0;
    for (int m = 0; m <= n_img; ++m) {
        shell = 0.0;
        if (m == 0) {
            for (double vrow : {v, 2 * s.L - v}) {
                shell += row_ladder(s, u, vy - vrow, side_high, 0);
            }
        } else {
            for (int i2 : {m, -m}) {
                for (double vrow : {v + 4 * s.L * i2, 2 * s.L - v + 4 * s.L * i2}) {
                    shell += row_ladder(s, u, vy - vrow, side_high, 0);
                }
            }
        }
        acc += shell;
        if (m > 0 && std::abs(shell) < 1e-14 * std::max(std::abs(acc), 1e-300)) return acc;
    }
    if (std::abs(shell) > 1e-10 * std::max(std::abs(acc), 1e-300)) {
        throw TruncationNotConverged("image rows at n_img=" + std::to_string(n_img));
    }
    return acc;
}

void rect_eta_ladder(const RectStrip& s, double u, double v, bool side_high,
                     std::span<const double> vy, std::span<double> eta, std::span<double> deta,
                     std::span<double> lap_eta, int n_rows) {
    if (!eta.empty()) std::fill(eta.begin(), eta.end(), 0.0);
    if (!deta.empty()) std::fill(deta.begin(), deta.end(), 0.0);
    if (!lap_eta.empty()) std::fill(lap_eta.begin(), lap_eta.end(), 0.0);
    // Row contributions decay like exp(-pi*|dv|/hu); include every row whose
    // nearest boundary node is within the resolvable range.
    const double reach = s.hu / kPi * 37.0;  // exp(-37) ~ 8e-17
    double vy_lo = vy.front(), vy_hi = vy.front();
    for (double t : vy) {
        vy_lo = std::min(vy_lo, t);
        vy_hi = std::max(vy_hi, t);
    }
    for (int i2 = -n_rows; i2 <= n_rows; ++i2) {
        for (double vrow : {v + 4 * s.L * i2, 2 * s.L - v + 4 * s.L * i2}) {
            if (vrow < vy_lo - reach || vrow > vy_hi + reach) continue;
            for (std::size_t k = 0; k < vy.size(); ++k) {
                const double dv = vy[k] - vrow;
                if (!eta.empty()) eta[k] += row_ladder(s, u, dv, side_high, 0);
                if (!deta.empty()) deta[k] += row_ladder(s, u, dv, side_high, 1);
                if (!lap_eta.empty()) lap_eta[k] += row_ladder(s, u, dv, side_high, 2);
            }
        }
    }
}

} // namespace dsmdot
