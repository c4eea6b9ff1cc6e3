#include "dsmdot/dsm.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "dsmdot/parallel.hpp"
#include "dsmdot/simd.hpp"

namespace dsmdot {

namespace {
constexpr double kPi = std::numbers::pi;
}

MeshPtr boundary_trace_shared(const Grid2D& grid) {
    return std::make_shared<const BoundaryMesh>(boundary_trace(grid));
}

MeshPtr full_boundary_trace_shared(const Grid2D& grid) {
    return std::make_shared<const BoundaryMesh>(full_boundary_trace(grid));
}

BoundaryData BoundaryData::zeros(MeshPtr mesh) {
    BoundaryData d;
    d.values.assign(mesh->total_nodes(), 0.0);
    d.mesh = std::move(mesh);
    return d;
}

std::span<double> BoundaryData::segment(std::size_t seg) {
    return {values.data() + mesh->segment_offset(seg), mesh->segments[seg].size()};
}

std::span<const double> BoundaryData::segment(std::size_t seg) const {
    return {values.data() + mesh->segment_offset(seg), mesh->segments[seg].size()};
}

double BoundaryData::max_abs() const {
    double m = 0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
}

BoundaryData restrict_to(const BoundaryData& src, MeshPtr target) {
    const BoundaryMesh& sm = *src.mesh;
    if (sm.segments.size() != target->segments.size()) throw MeshMismatch("segment count");
    BoundaryData out = BoundaryData::zeros(target);
    for (std::size_t s = 0; s < target->segments.size(); ++s) {
        const auto& a = sm.segments[s];
        const auto& b = target->segments[s];
        if (a.side != b.side || a.closed != b.closed) throw MeshMismatch("segment shape");
        auto sv = src.segment(s);
        auto tv = out.segment(s);
        std::size_t lo = 0;
        for (std::size_t k = 0; k < b.size(); ++k) {
            const double t = b.arc[k];
            if (t <= a.arc.front()) {
                tv[k] = sv.front();
                continue;
            }
            if (t >= a.arc.back()) {
                tv[k] = sv.back();
                continue;
            }
            while (lo + 2 < a.size() && a.arc[lo + 1] < t) ++lo;
            const double w = (t - a.arc[lo]) / (a.arc[lo + 1] - a.arc[lo]);
            tv[k] = (1 - w) * sv[lo] + w * sv[lo + 1];
        }
    }
    return out;
}

namespace {

void second_derivative(std::span<const double> f, std::span<double> out, double h, bool closed) {
    const std::size_t n = f.size();
    if (n < 3) throw SegmentTooShort("surface laplacian needs at least 3 nodes");
    const double ih2 = 1.0 / (h * h);
    for (std::size_t k = 1; k + 1 < n; ++k) {
        out[k] = (f[k + 1] - 2 * f[k] + f[k - 1]) * ih2;
    }
    if (closed) {
        out[0] = (f[1] - 2 * f[0] + f[n - 1]) * ih2;
        out[n - 1] = (f[0] - 2 * f[n - 1] + f[n - 2]) * ih2;
    } else if (n == 3) {
        out[0] = out[1];
        out[n - 1] = out[1];
    } else {
        out[0] = (2 * f[0] - 5 * f[1] + 4 * f[2] - f[3]) * ih2;
        out[n - 1] = (2 * f[n - 1] - 5 * f[n - 2] + 4 * f[n - 3] - f[n - 4]) * ih2;
    }
}

void first_derivative(std::span<const double> f, std::span<double> out, double h, bool closed) {
    const std::size_t n = f.size();
    if (n < 3) throw SegmentTooShort("arc derivative needs at least 3 nodes");
    const double i2h = 1.0 / (2 * h);
    for (std::size_t k = 1; k + 1 < n; ++k) {
        out[k] = (f[k + 1] - f[k - 1]) * i2h;
    }
    if (closed) {
        out[0] = (f[1] - f[n - 1]) * i2h;
        out[n - 1] = (f[0] - f[n - 2]) * i2h;
    } else {
        out[0] = (-3 * f[0] + 4 * f[1] - f[2]) * i2h;
        out[n - 1] = (3 * f[n - 1] - 4 * f[n - 2] + f[n - 3]) * i2h;
    }
}

double segment_spacing(const BoundarySegment& seg) {
    return seg.size() > 1 ? seg.arc[1] - seg.arc[0] : 1.0;
}

} // namespace

BoundaryData surface_laplacian(const BoundaryData& d) {
    BoundaryData out = BoundaryData::zeros(d.mesh);
    for (std::size_t s = 0; s < d.mesh->segments.size(); ++s) {
        const auto& seg = d.mesh->segments[s];
        second_derivative(d.segment(s), out.segment(s), segment_spacing(seg), seg.closed);
    }
    return out;
}

BoundaryData arc_derivative(const BoundaryData& d) {
    BoundaryData out = BoundaryData::zeros(d.mesh);
    for (std::size_t s = 0; s < d.mesh->segments.size(); ++s) {
        const auto& seg = d.mesh->segments[s];
        first_derivative(d.segment(s), out.segment(s), segment_spacing(seg), seg.closed);
    }
    return out;
}

double duality_product(const BoundaryData& phi, const BoundaryData& psi, int s) {
    if (phi.mesh != psi.mesh && phi.mesh->total_nodes() != psi.mesh->total_nodes()) {
        throw MeshMismatch("duality product operands");
    }
    if (s != 0 && s != 1) throw std::invalid_argument("duality product: s must be 0 or 1");
    const BoundaryData* lhs = &phi;
    BoundaryData lap;
    if (s == 1) {
        lap = surface_laplacian(phi);
        for (double& v : lap.values) v = -v;
        lhs = &lap;
    }
    double acc = 0;
    for (std::size_t k = 0; k < phi.mesh->segments.size(); ++k) {
        const auto& seg = phi.mesh->segments[k];
        acc += simd::dot3(seg.weights.data(), lhs->segment(k).data(), psi.segment(k).data(), seg.size());
    }
    return acc;
}

EtaNorms eta_norms_numeric(const BoundaryData& eta) {
    BoundaryData de = arc_derivative(eta);
    double h0_sq = 0, h1_sq = 0;
    for (std::size_t k = 0; k < eta.mesh->segments.size(); ++k) {
        const auto& seg = eta.mesh->segments[k];
        h0_sq += simd::dot3(seg.weights.data(), eta.segment(k).data(), eta.segment(k).data(), seg.size());
        h1_sq += simd::dot3(seg.weights.data(), de.segment(k).data(), de.segment(k).data(), seg.size());
    }
    return {std::sqrt(h0_sq), std::sqrt(h1_sq)};
}

namespace {

double min_cell(const Grid2D& g) { return std::min(g.hx, g.hy); }

void check_interior(Vec2 x, const Grid2D& grid) {
    const double margin = min_cell(grid);
    if (grid.geom.kind == DomainGeometry::Kind::Rectangle) {
        if (x.x < grid.geom.x0 + margin || x.x > grid.geom.x1 - margin ||
            x.y < grid.geom.y0 + margin || x.y > grid.geom.y1 - margin) {
            throw PointTooCloseToBoundary("probing point within one cell of the boundary");
        }
    } else {
        if (std::hypot(x.x, x.y) > 1.0 - margin) {
            throw PointTooCloseToBoundary("probing point within one cell of the circle");
        }
    }
}

bool rect_side_is_high(const RectStrip& strip, Side side) {
    return strip.measured_y ? side == Side::Top : side == Side::Right;
}

std::vector<double> segment_v(const RectStrip& strip, const BoundarySegment& seg) {
    std::vector<double> v(seg.size());
    for (std::size_t k = 0; k < seg.size(); ++k) {
        v[k] = strip.measured_y ? seg.points[k].x - strip.v_center : seg.points[k].y - strip.v_center;
    }
    return v;
}

} // namespace

ProbingSample probing_eta(Vec2 x, const Grid2D& grid, MeshPtr gamma, Provider provider,
                          const SolverOptions& opts) {
    check_interior(x, grid);
    ProbingSample out;
    out.eta = BoundaryData::zeros(gamma);
    out.deta = BoundaryData::zeros(gamma);
    out.lap_eta = BoundaryData::zeros(gamma);

    switch (provider) {
        case Provider::DiskAnalytic: {
            if (grid.geom.kind != DomainGeometry::Kind::UnitDisk) {
                throw WrongDomain("disk-analytic provider needs the unit disk");
            }
            for (std::size_t s = 0; s < gamma->segments.size(); ++s) {
                const auto& seg = gamma->segments[s];
                disk_eta_series(x, seg.arc, out.eta.segment(s), out.deta.segment(s),
                                out.lap_eta.segment(s));
            }
            out.analytic_derivatives = true;
            break;
        }
        case Provider::RectImages: {
            const RectStrip strip = RectStrip::from(grid.geom);
            double u, v;
            strip.to_uv(x, u, v);
            for (std::size_t s = 0; s < gamma->segments.size(); ++s) {
                const auto& seg = gamma->segments[s];
                const std::vector<double> vy = segment_v(strip, seg);
                rect_eta_ladder(strip, u, v, rect_side_is_high(strip, seg.side), vy,
                                out.eta.segment(s), out.deta.segment(s), out.lap_eta.segment(s));
            }
            out.analytic_derivatives = true;
            break;
        }
        case Provider::FdSolve: {
            std::vector<double> zero_dirichlet(gamma->total_nodes(), 0.0);
            Field w = solve_mixed(grid, 0.0, *gamma, zero_dirichlet, x, opts);
            out.eta.values = flux_on_boundary(w, *gamma);
            out.deta = arc_derivative(out.eta);
            out.lap_eta = surface_laplacian(out.eta);
            out.analytic_derivatives = false;
            break;
        }
    }
    return out;
}

std::vector<LocalMax> local_maxima(const IndexMap& map, double threshold) {
    const Grid2D& g = map.grid;
    std::vector<LocalMax> out;
    for (int j = 1; j < g.ny - 1; ++j) {
        for (int i = 1; i < g.nx - 1; ++i) {
            const double v = map.at(i, j);
            if (v <= threshold) continue;
            bool is_max = true;
            int ties = 0;
            for (int dj = -1; dj <= 1 && is_max; ++dj) {
                for (int di = -1; di <= 1; ++di) {
                    if (di == 0 && dj == 0) continue;
                    const double nb = map.at(i + di, j + dj);
                    if (nb > v) {
                        is_max = false;
                        break;
                    }
                    if (nb == v) ++ties;
                }
            }
            if (is_max && ties == 0) out.push_back({g.node(i, j), v});
        }
    }
    return out;
}

Vec2 argmax(const IndexMap& map) {
    const Grid2D& g = map.grid;
    std::size_t best = 0;
    for (std::size_t k = 1; k < map.values.size(); ++k) {
        if (map.values[k] > map.values[best]) best = k;
    }
    const int n = static_cast<int>(best);
    return g.node(n % g.nx, n / g.nx);
}

namespace {

bool sample_ok(const Grid2D& g, int i, int j, int margin) {
    if (i < margin || j < margin || i >= g.nx - margin || j >= g.ny - margin) return false;
    if (g.geom.kind == DomainGeometry::Kind::UnitDisk) {
        return std::hypot(g.x(i), g.y(j)) < 1.0 - margin * min_cell(g);
    }
    return true;
}

void finalize_map(IndexMap& map, bool square) {
    double m = 0;
    for (double& v : map.values) {
        v = std::abs(v);
        m = std::max(m, v);
    }
    if (m == 0) return;  // degenerate data: keep the zero map
    for (double& v : map.values) {
        v /= m;
        if (square) v *= v;
    }
}

} // namespace

IndexMap index_I(const BoundaryData& fs, const Grid2D& sampling, Provider provider, int threads,
                 const SolverOptions& opts) {
    IndexMap map;
    map.grid = sampling;
    map.kind = IndexKind::I;
    map.values.assign(sampling.size(), 0.0);

    const double scale = fs.max_abs();
    if (scale == 0) return map;
    BoundaryData unit = fs;
    for (double& v : unit.values) v /= scale;

    const MeshPtr gamma = fs.mesh;
    parallel_for(static_cast<std::size_t>(sampling.ny), threads, [&](std::size_t jb, std::size_t je) {
        for (std::size_t j = jb; j < je; ++j) {
            for (int i = 0; i < sampling.nx; ++i) {
                if (!sample_ok(sampling, i, static_cast<int>(j), map.margin_cells)) continue;
                ProbingSample p =
                    probing_eta(sampling.node(i, static_cast<int>(j)), sampling, gamma, provider, opts);
                double dual = 0, h0_sq = 0, h1_sq = 0;
                for (std::size_t s = 0; s < gamma->segments.size(); ++s) {
                    const auto& seg = gamma->segments[s];
                    dual -= simd::dot3(seg.weights.data(), p.lap_eta.segment(s).data(),
                                       unit.segment(s).data(), seg.size());
                    h0_sq += simd::dot3(seg.weights.data(), p.eta.segment(s).data(),
                                        p.eta.segment(s).data(), seg.size());
                    h1_sq += simd::dot3(seg.weights.data(), p.deta.segment(s).data(),
                                        p.deta.segment(s).data(), seg.size());
                }
                const double den = std::pow(h1_sq, 0.25) * std::pow(h0_sq, 0.375);
                map.values[sampling.index(i, static_cast<int>(j))] = den > 0 ? dual / den : 0.0;
            }
        }
    });
    finalize_map(map, false);
    return map;
}

Field solve_phi(const BoundaryData& fs, const Grid2D& grid, double mu0, const SolverOptions& opts) {
    BoundaryData lap = surface_laplacian(fs);
    return solve_mixed(grid, mu0, *fs.mesh, lap.values, std::nullopt, opts);
}

IndexMap index_via_phi(const Field& phi, const Grid2D& sampling, Provider provider, int threads) {
    IndexMap map;
    map.grid = sampling;
    map.kind = IndexKind::IViaPhi;
    map.values.assign(sampling.size(), 0.0);

    double scale = 0;
    for (double v : phi.values) scale = std::max(scale, std::abs(v));
    if (scale == 0) return map;

    const MeshPtr gamma = boundary_trace_shared(sampling);
    parallel_for(static_cast<std::size_t>(sampling.ny), threads, [&](std::size_t jb, std::size_t je) {
        for (std::size_t j = jb; j < je; ++j) {
            for (int i = 0; i < sampling.nx; ++i) {
                if (!sample_ok(sampling, i, static_cast<int>(j), map.margin_cells)) continue;
                ProbingSample p =
                    probing_eta(sampling.node(i, static_cast<int>(j)), sampling, gamma, provider);
                double h0_sq = 0, h1_sq = 0;
                for (std::size_t s = 0; s < gamma->segments.size(); ++s) {
                    const auto& seg = gamma->segments[s];
                    h0_sq += simd::dot3(seg.weights.data(), p.eta.segment(s).data(),
                                        p.eta.segment(s).data(), seg.size());
                    h1_sq += simd::dot3(seg.weights.data(), p.deta.segment(s).data(),
                                        p.deta.segment(s).data(), seg.size());
                }
                const double den = std::pow(h1_sq, 0.25) * std::pow(h0_sq, 0.375);
                map.values[sampling.index(i, static_cast<int>(j))] =
                    den > 0 ? phi.at(i, static_cast<int>(j)) / den : 0.0;
            }
        }
    });
    finalize_map(map, false);
    return map;
}

EtaNorms fundamental_flux_norms(Vec2 x, const BoundaryMesh& gamma, double mu0) {
    const double m = std::sqrt(mu0);
    double h0_sq = 0, h1_sq = 0;
    for (const auto& seg : gamma.segments) {
        const bool straight = seg.normals.size() > 1 && seg.normals[0].x == seg.normals[1].x &&
                              seg.normals[0].y == seg.normals[1].y;
        if (!straight && mu0 > 0) {
            throw std::invalid_argument("fundamental flux norms with mu0>0 need straight segments");
        }
        for (std::size_t k = 0; k < seg.size(); ++k) {
            const Vec2 y = seg.points[k];
            const Vec2 nu = seg.normals[k];
            const double dx = y.x - x.x, dy = y.y - x.y;
            const double rho2 = dx * dx + dy * dy;
            const double rho = std::sqrt(rho2);
            if (rho < 0.25 * seg.weights[k]) {
                throw PointTooCloseToBoundary("fundamental flux integrand unresolved");
            }
            const double d = dx * nu.x + dy * nu.y;
            double eta, de;
            if (mu0 == 0.0) {
                eta = -d / (2 * kPi * rho2);
                if (straight) {
                    // tangent = normal rotated by -90deg; s = (y-x).t
                    const double s = -dx * nu.y + dy * nu.x;
                    de = d * s / (kPi * rho2 * rho2);
                } else {
                    // circle: angular derivative in closed form
                    const double r = std::hypot(x.x, x.y);
                    const double cd = x.x * y.x + x.y * y.y;  // r cos(theta - theta_x)
                    const double sd = x.x * y.y - x.y * y.x;  // -r sin? see below
                    const double D = 1 - 2 * cd + r * r;
                    // d/dtheta eta = (1 - r^2) * r sin(theta - theta_x) / (2 pi D^2);
                    // r sin(theta - theta_x) = x1*y2 - x2*y1 with |y| = 1
                    de = (1 - r * r) * sd / (2 * kPi * D * D);
                }
            } else {
                const double k1 = std::cyl_bessel_k(1, m * rho);
                eta = -m * d * k1 / (2 * kPi * rho);
                const double k0 = std::cyl_bessel_k(0, m * rho);
                const double dk1 = -(k0 + k1 / (m * rho));  // K1'(z)
                const double s = -dx * nu.y + dy * nu.x;
                const double dfac = (m * dk1 * rho - k1) / rho2;  // d/drho [K1(m rho)/rho]
                de = -m * d / (2 * kPi) * dfac * (s / rho);
            }
            h0_sq += seg.weights[k] * eta * eta;
            h1_sq += seg.weights[k] * de * de;
        }
    }
    return {std::sqrt(h0_sq), std::sqrt(h1_sq)};
}

double scaling_function(double phi_value, double phi_max) {
    return 1.0 / (phi_max + std::abs(phi_value));
}

IndexMap modified_index(const Field& phi, const BoundaryMesh& gamma, double mu0, bool square,
                        int threads) {
    const Grid2D& g = phi.grid;
    IndexMap map;
    map.grid = g;
    map.kind = square ? IndexKind::ModifiedSquared : IndexKind::Modified;
    map.values.assign(g.size(), 0.0);

    double phi_max = 0;
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            if (sample_ok(g, i, j, map.margin_cells)) phi_max = std::max(phi_max, std::abs(phi.at(i, j)));
        }
    }
    if (phi_max == 0) return map;  // degenerate data

    parallel_for(static_cast<std::size_t>(g.ny), threads, [&](std::size_t jb, std::size_t je) {
        for (std::size_t j = jb; j < je; ++j) {
            for (int i = 0; i < g.nx; ++i) {
                if (!sample_ok(g, i, static_cast<int>(j), map.margin_cells)) continue;
                const EtaNorms n = fundamental_flux_norms(g.node(i, static_cast<int>(j)), gamma, mu0);
                const double den = std::sqrt(n.h1) * std::pow(n.h0, 0.75);
                const double v = phi.at(i, static_cast<int>(j));
                map.values[g.index(i, static_cast<int>(j))] =
                    den > 0 ? v * scaling_function(v, phi_max) / den : 0.0;
            }
        }
    });
    finalize_map(map, square);
    return map;
}

} // namespace dsmdot
