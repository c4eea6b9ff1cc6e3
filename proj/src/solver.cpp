#include "dsmdot/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>

#include "dsmdot/simd.hpp"

namespace dsmdot {

Inclusion Inclusion::disk(Vec2 center, double radius, double mu) {
    Inclusion inc;
    inc.shape = Shape::Disk;
    inc.center = center;
    inc.radius = radius;
    inc.mu = mu;
    return inc;
}

Inclusion Inclusion::rect(Vec2 center, double width, double height, double mu) {
    Inclusion inc;
    inc.shape = Shape::Rect;
    inc.center = center;
    inc.width = width;
    inc.height = height;
    inc.mu = mu;
    return inc;
}

bool Inclusion::contains(Vec2 p) const {
    if (shape == Shape::Disk) {
        return dist(p, center) <= radius;
    }
    return std::abs(p.x - center.x) <= width / 2 && std::abs(p.y - center.y) <= height / 2;
}

double Medium::value_at(Vec2 p) const {
    for (const auto& inc : inclusions) {
        if (inc.contains(p)) return inc.mu;
    }
    return mu0;
}

bool Medium::identically_zero() const {
    if (mu0 != 0.0) return false;
    for (const auto& inc : inclusions) {
        if (inc.mu != 0.0) return false;
    }
    return true;
}

void Medium::validate(const DomainGeometry& geom, double margin) const {
    if (mu0 < 0) throw std::invalid_argument("mu0 must be non-negative");
    for (const auto& inc : inclusions) {
        if (inc.mu < 0) throw std::invalid_argument("inclusion mu must be non-negative");
        double ext_x, ext_y;
        if (inc.shape == Inclusion::Shape::Disk) {
            ext_x = ext_y = inc.radius;
        } else {
            ext_x = inc.width / 2;
            ext_y = inc.height / 2;
        }
        if (geom.kind == DomainGeometry::Kind::Rectangle) {
            if (inc.center.x - ext_x < geom.x0 + margin || inc.center.x + ext_x > geom.x1 - margin ||
                inc.center.y - ext_y < geom.y0 + margin || inc.center.y + ext_y > geom.y1 - margin) {
                throw std::invalid_argument("inclusion too close to the boundary");
            }
        } else {
            if (std::hypot(inc.center.x, inc.center.y) + std::max(ext_x, ext_y) > 1.0 - margin) {
                throw std::invalid_argument("inclusion too close to the boundary");
            }
        }
    }
}

BoundaryFlux BoundaryFlux::zero(const Grid2D& grid) {
    BoundaryFlux f;
    f[Side::Bottom].assign(grid.nx, 0.0);
    f[Side::Top].assign(grid.nx, 0.0);
    f[Side::Left].assign(grid.ny, 0.0);
    f[Side::Right].assign(grid.ny, 0.0);
    return f;
}

namespace {

// Assembled W-scaled 5-point system in the padded-stencil layout.
struct Stencil5System final : LinearOperator {
    int nx = 0, ny = 0;
    std::vector<double> d, cxm, cxp, cym, cyp;
    bool is_semidefinite = false;

    std::size_t size() const override { return static_cast<std::size_t>(nx) * ny; }
    bool semidefinite() const override { return is_semidefinite; }
    const double* jacobi() const override { return d.data(); }
    void apply(const double* x, double* y) const override {
        simd::stencil5(nx, ny, d.data(), cxm.data(), cxp.data(), cym.data(), cyp.data(), x, y);
    }
};

double cell_weight(const Grid2D& g, int i, int j) {
    return (i == 0 || i == g.nx - 1 ? 0.5 : 1.0) * (j == 0 || j == g.ny - 1 ? 0.5 : 1.0);
}

// Interior operator rows with ghost-node Neumann closure everywhere.
Stencil5System assemble(const Grid2D& g, const Medium& medium) {
    Stencil5System s;
    s.nx = g.nx;
    s.ny = g.ny;
    const std::size_t n = static_cast<std::size_t>(g.nx) * g.ny;
    s.d.assign(n, 0.0);
    s.cxm.assign(n, 0.0);
    s.cxp.assign(n, 0.0);
    s.cym.assign(n, 0.0);
    s.cyp.assign(n, 0.0);
    const double ixx = 1.0 / (g.hx * g.hx);
    const double iyy = 1.0 / (g.hy * g.hy);
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            const std::size_t k = static_cast<std::size_t>(g.index(i, j));
            const double w = cell_weight(g, i, j);
            double xm = 0, xp = 0, ym = 0, yp = 0;
            if (i == 0) {
                xp = -2 * ixx * w;
            } else if (i == g.nx - 1) {
                xm = -2 * ixx * w;
            } else {
                xm = -ixx * w;
                xp = -ixx * w;
            }
            if (j == 0) {
                yp = -2 * iyy * w;
            } else if (j == g.ny - 1) {
                ym = -2 * iyy * w;
            } else {
                ym = -iyy * w;
                yp = -iyy * w;
            }
            s.cxm[k] = xm;
            s.cxp[k] = xp;
            s.cym[k] = ym;
            s.cyp[k] = yp;
            s.d[k] = -(xm + xp + ym + yp) + medium.value_at(g.node(i, j)) * w;
        }
    }
    return s;
}

double boundary_node_weight(const Grid2D& g, int i, int j) {
    // Trapezoid over the whole rectangle boundary; corners touch one x-edge
    // and one y-edge.
    const bool cx = (i == 0 || i == g.nx - 1);
    const bool cy = (j == 0 || j == g.ny - 1);
    if (cx && cy) return (g.hx + g.hy) / 2;
    return cx ? g.hy : g.hx;
}

void shift_to_zero_boundary_mean(Field& u) {
    const Grid2D& g = u.grid;
    double tot = 0, per = 0;
    for (int i = 0; i < g.nx; ++i) {
        for (int j : {0, g.ny - 1}) {
            double w = boundary_node_weight(g, i, j);
            tot += w * u.at(i, j);
            per += w;
        }
    }
    for (int j = 1; j < g.ny - 1; ++j) {
        for (int i : {0, g.nx - 1}) {
            double w = boundary_node_weight(g, i, j);
            tot += w * u.at(i, j);
            per += w;
        }
    }
    const double c = tot / per;
    for (double& v : u.values) v -= c;
}

} // namespace

std::vector<double> linear_solve(const LinearOperator& op, std::span<const double> rhs,
                                 const SolverOptions& opts, SolveInfo* info) {
    const std::size_t n = op.size();
    if (rhs.size() != n) throw std::invalid_argument("rhs size mismatch");
    std::vector<double> b(rhs.begin(), rhs.end());

    if (op.semidefinite()) {
        double s = 0, a = 0;
        for (double v : b) {
            s += v;
            a += std::abs(v);
        }
        if (std::abs(s) > 1e-8 * std::max(a, 1e-300)) {
            throw IncompatibleFlux("rhs not orthogonal to the constant null vector");
        }
        const double mean = s / static_cast<double>(n);
        for (double& v : b) v -= mean;
    }

    const double bnorm = std::sqrt(simd::dot(b.data(), b.data(), n));
    std::vector<double> x(n, 0.0);
    if (bnorm == 0.0) {
        if (info) *info = {0, 0.0};
        return x;
    }

    const int nx_pad = [&] {
        if (const auto* st = dynamic_cast<const Stencil5System*>(&op)) return st->nx;
        return 0;
    }();
    const std::size_t pad = static_cast<std::size_t>(nx_pad);

    std::vector<double> r = b;
    std::vector<double> z(n), q(n);
    std::vector<double> pbuf(n + 2 * pad, 0.0);
    double* p = pbuf.data() + pad;

    const double* diag = op.jacobi();
    auto precondition = [&](const std::vector<double>& src, std::vector<double>& dst) {
        if (diag) {
            for (std::size_t i = 0; i < n; ++i) dst[i] = src[i] / diag[i];
        } else {
            dst = src;
        }
    };

    precondition(r, z);
    std::memcpy(p, z.data(), n * sizeof(double));
    double rz = simd::dot(r.data(), z.data(), n);
    const int max_iter =
        opts.max_iter > 0 ? opts.max_iter : static_cast<int>(20.0 * std::sqrt(static_cast<double>(n))) + 10;
    const double target = opts.tol * bnorm;

    double rnorm = bnorm;
    int it = 0;
    for (; it < max_iter; ++it) {
        op.apply(p, q.data());
        const double pq = simd::dot(p, q.data(), n);
        if (!(pq > 0)) break;  // lost positive definiteness (rounding); bail to the check below
        const double alpha = rz / pq;
        simd::axpy(alpha, p, x.data(), n);
        simd::axpy(-alpha, q.data(), r.data(), n);
        if (op.semidefinite() && (it % 64) == 63) {
            double mean = 0;
            for (double v : r) mean += v;
            mean /= static_cast<double>(n);
            for (double& v : r) v -= mean;
        }
        rnorm = std::sqrt(simd::dot(r.data(), r.data(), n));
        if (rnorm <= target) {
            ++it;
            break;
        }
        precondition(r, z);
        const double rz_new = simd::dot(r.data(), z.data(), n);
        simd::xpby(z.data(), rz_new / rz, p, n);
        rz = rz_new;
    }
    if (rnorm > target) {
        throw SolverDivergence("cg did not reach tolerance in " + std::to_string(max_iter) + " iterations",
                               rnorm / bnorm);
    }
    if (op.semidefinite()) {
        double mean = 0;
        for (double v : x) mean += v;
        mean /= static_cast<double>(n);
        for (double& v : x) v -= mean;
    }
    if (info) *info = {it, rnorm / bnorm};
    return x;
}

Field solve_neumann(const Grid2D& grid, const Medium& medium, const BoundaryFlux& g,
                    const Field* source, const SolverOptions& opts, SolveInfo* info) {
    if (grid.geom.kind != DomainGeometry::Kind::Rectangle) {
        throw std::invalid_argument("finite differences are for rectangle grids");
    }
    Stencil5System sys = assemble(grid, medium);
    sys.is_semidefinite = medium.identically_zero();

    const std::size_t n = sys.size();
    std::vector<double> b(n, 0.0);
    if (source) {
        for (int j = 0; j < grid.ny; ++j) {
            for (int i = 0; i < grid.nx; ++i) {
                b[grid.index(i, j)] = source->at(i, j) * cell_weight(grid, i, j);
            }
        }
    }
    auto side_size_ok = [&](Side s) {
        std::size_t want = (s == Side::Bottom || s == Side::Top) ? grid.nx : grid.ny;
        return g[s].size() == want;
    };
    for (Side s : {Side::Bottom, Side::Top, Side::Left, Side::Right}) {
        if (!side_size_ok(s)) throw std::invalid_argument("flux side size mismatch");
    }
    for (int i = 0; i < grid.nx; ++i) {
        b[grid.index(i, 0)] += (2.0 / grid.hy) * g[Side::Bottom][i] * cell_weight(grid, i, 0);
        b[grid.index(i, grid.ny - 1)] +=
            (2.0 / grid.hy) * g[Side::Top][i] * cell_weight(grid, i, grid.ny - 1);
    }
    for (int j = 0; j < grid.ny; ++j) {
        b[grid.index(0, j)] += (2.0 / grid.hx) * g[Side::Left][j] * cell_weight(grid, 0, j);
        b[grid.index(grid.nx - 1, j)] +=
            (2.0 / grid.hx) * g[Side::Right][j] * cell_weight(grid, grid.nx - 1, j);
    }

    Field u;
    u.grid = grid;
    u.values = linear_solve(sys, b, opts, info);
    if (sys.is_semidefinite) shift_to_zero_boundary_mean(u);
    return u;
}

namespace {

Field solve_mixed_impl(const Grid2D& grid, double mu0, const BoundaryMesh& gamma,
                       std::span<const double> dirichlet, std::optional<Vec2> point_source,
                       const Field* source, const SolverOptions& opts, SolveInfo* info) {
    if (grid.geom.kind != DomainGeometry::Kind::Rectangle) {
        throw std::invalid_argument("finite differences are for rectangle grids");
    }
    if (dirichlet.size() != gamma.total_nodes()) throw MeshMismatch("dirichlet data size");

    Medium bg;
    bg.mu0 = mu0;
    Stencil5System sys = assemble(grid, bg);

    const std::size_t n = sys.size();
    std::vector<double> b(n, 0.0);
    if (source) {
        for (int j = 0; j < grid.ny; ++j) {
            for (int i = 0; i < grid.nx; ++i) {
                b[grid.index(i, j)] = source->at(i, j) * cell_weight(grid, i, j);
            }
        }
    }

    std::vector<char> is_dir(n, 0);
    std::vector<double> dval(n, 0.0);
    std::size_t off = 0;
    for (const auto& seg : gamma.segments) {
        if (seg.grid_nodes.empty()) throw std::invalid_argument("gamma mesh is not grid aligned");
        for (std::size_t k = 0; k < seg.size(); ++k) {
            const int node = seg.grid_nodes[k];
            is_dir[node] = 1;
            dval[node] = dirichlet[off + k];
        }
        off += seg.size();
    }

    if (point_source) {
        const int i = grid.nearest_i(point_source->x);
        const int j = grid.nearest_j(point_source->y);
        const int node = grid.index(i, j);
        if (grid.on_boundary(i, j) || is_dir[node]) {
            throw SourceOnBoundary("point source must be strictly interior");
        }
        b[node] += 1.0 / (grid.hx * grid.hy);  // W = 1 in the interior
    }

    // Eliminate Dirichlet rows/columns symmetrically.
    auto zero_coupling_into = [&](int i, int j, std::size_t knode) {
        if (i < 0 || i >= grid.nx || j < 0 || j >= grid.ny) return;
        const std::size_t nb = static_cast<std::size_t>(grid.index(i, j));
        if (is_dir[nb]) return;
        // which coefficient of nb points back to knode
        const std::size_t diff = knode > nb ? knode - nb : nb - knode;
        double* c = nullptr;
        if (diff == 1) {
            c = knode > nb ? &sys.cxp[nb] : &sys.cxm[nb];
        } else {
            c = knode > nb ? &sys.cyp[nb] : &sys.cym[nb];
        }
        b[nb] -= *c * dval[knode];
        *c = 0.0;
    };
    for (int j = 0; j < grid.ny; ++j) {
        for (int i = 0; i < grid.nx; ++i) {
            const std::size_t k = static_cast<std::size_t>(grid.index(i, j));
            if (!is_dir[k]) continue;
            zero_coupling_into(i - 1, j, k);
            zero_coupling_into(i + 1, j, k);
            zero_coupling_into(i, j - 1, k);
            zero_coupling_into(i, j + 1, k);
            sys.d[k] = 1.0;
            sys.cxm[k] = sys.cxp[k] = sys.cym[k] = sys.cyp[k] = 0.0;
            b[k] = dval[k];
        }
    }

    Field u;
    u.grid = grid;
    u.values = linear_solve(sys, b, opts, info);
    return u;
}

} // namespace

Field solve_mixed(const Grid2D& grid, double mu0, const BoundaryMesh& gamma,
                  std::span<const double> dirichlet, std::optional<Vec2> point_source,
                  const SolverOptions& opts, SolveInfo* info) {
    return solve_mixed_impl(grid, mu0, gamma, dirichlet, point_source, nullptr, opts, info);
}

std::vector<double> flux_on_boundary(const Field& w, const BoundaryMesh& mesh) {
    const Grid2D& g = w.grid;
    if (g.geom.kind != DomainGeometry::Kind::Rectangle) {
        throw std::invalid_argument("FD flux extraction needs a rectangle grid");
    }
    std::vector<double> out;
    out.reserve(mesh.total_nodes());
    for (const auto& seg : mesh.segments) {
        for (std::size_t k = 0; k < seg.size(); ++k) {
            const int node = seg.grid_nodes[k];
            const int i = node % g.nx;
            const int j = node / g.nx;
            double dnu = 0;
            switch (seg.side) {
                case Side::Bottom:
                    dnu = -(-3 * w.at(i, 0) + 4 * w.at(i, 1) - w.at(i, 2)) / (2 * g.hy);
                    break;
                case Side::Top:
                    dnu = -(-3 * w.at(i, g.ny - 1) + 4 * w.at(i, g.ny - 2) - w.at(i, g.ny - 3)) / (2 * g.hy);
                    break;
                case Side::Left:
                    dnu = -(-3 * w.at(0, j) + 4 * w.at(1, j) - w.at(2, j)) / (2 * g.hx);
                    break;
                case Side::Right:
                    dnu = -(-3 * w.at(g.nx - 1, j) + 4 * w.at(g.nx - 2, j) - w.at(g.nx - 3, j)) / (2 * g.hx);
                    break;
            }
            out.push_back(dnu);
        }
    }
    return out;
}

} // namespace dsmdot
