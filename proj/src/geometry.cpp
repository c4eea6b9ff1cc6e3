#include "dsmdot/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace dsmdot {

namespace {
constexpr double kPi = std::numbers::pi;

int snap_cells(double extent, double h, SnapPolicy policy, const char* axis) {
    double q = extent / h;
    double rounded = std::round(q);
    if (std::abs(q - rounded) <= 1e-12 * std::max(1.0, q)) {
        return std::max(1, static_cast<int>(rounded));
    }
    if (policy == SnapPolicy::Exact) {
        throw NonConformingMesh(std::string(axis) + " extent " + std::to_string(extent) +
                                " is not an integer multiple of h=" + std::to_string(h));
    }
    return std::max(1, static_cast<int>(std::ceil(q - 1e-9 * std::max(1.0, q))));
}
} // namespace

DomainGeometry DomainGeometry::rectangle(double x0, double x1, double y0, double y1,
                                         std::initializer_list<Side> gamma) {
    return rectangle(x0, x1, y0, y1, std::vector<Side>(gamma));
}

DomainGeometry DomainGeometry::rectangle(double x0, double x1, double y0, double y1,
                                         const std::vector<Side>& gamma) {
    if (!(x1 > x0) || !(y1 > y0)) throw std::invalid_argument("rectangle extents must be positive");
    if (gamma.empty()) throw std::invalid_argument("gamma must contain at least one side");
    DomainGeometry g;
    g.kind = Kind::Rectangle;
    g.x0 = x0; g.x1 = x1; g.y0 = y0; g.y1 = y1;
    for (Side s : gamma) g.gamma_sides[static_cast<int>(s)] = true;
    return g;
}

DomainGeometry DomainGeometry::unit_disk() {
    DomainGeometry g;
    g.kind = Kind::UnitDisk;
    g.x0 = -1; g.x1 = 1; g.y0 = -1; g.y1 = 1;
    g.full_circle = true;
    g.theta_lo = 0.0;
    g.theta_hi = 2 * kPi;
    return g;
}

DomainGeometry DomainGeometry::unit_disk_arc(double theta_lo, double theta_hi) {
    if (!(theta_hi > theta_lo)) throw std::invalid_argument("arc must have positive length");
    DomainGeometry g = unit_disk();
    g.full_circle = false;
    g.theta_lo = theta_lo;
    g.theta_hi = theta_hi;
    return g;
}

bool DomainGeometry::contains(Vec2 p) const {
    if (kind == Kind::Rectangle) return p.x > x0 && p.x < x1 && p.y > y0 && p.y < y1;
    return std::hypot(p.x, p.y) < 1.0;
}

int Grid2D::nearest_i(double xc) const {
    int i = static_cast<int>(std::lround((xc - base_x) / hx));
    return std::clamp(i, 0, nx - 1);
}

int Grid2D::nearest_j(double yc) const {
    int j = static_cast<int>(std::lround((yc - base_y) / hy));
    return std::clamp(j, 0, ny - 1);
}

Grid2D build_grid(const DomainGeometry& geom, double h, SnapPolicy policy) {
    if (!(h > 0)) throw std::invalid_argument("mesh size must be positive");
    Grid2D g;
    g.geom = geom;
    int ncx = snap_cells(geom.width(), h, policy, "x");
    int ncy = snap_cells(geom.height(), h, policy, "y");
    g.nx = ncx + 1;
    g.ny = ncy + 1;
    g.hx = geom.width() / ncx;
    g.hy = geom.height() / ncy;
    g.base_x = geom.x0;
    g.base_y = geom.y0;
    return g;
}

std::size_t BoundaryMesh::total_nodes() const {
    std::size_t n = 0;
    for (const auto& s : segments) n += s.size();
    return n;
}

std::size_t BoundaryMesh::segment_offset(std::size_t seg) const {
    std::size_t off = 0;
    for (std::size_t k = 0; k < seg; ++k) off += segments[k].size();
    return off;
}

namespace {

// Rectangle side segment. Corners belong to the horizontal (bottom/top)
// segments; left/right segments exclude them.
BoundarySegment rect_side_segment(const Grid2D& g, Side side) {
    BoundarySegment seg;
    seg.side = side;
    const bool horizontal = (side == Side::Bottom || side == Side::Top);
    const int n = horizontal ? g.nx : g.ny;
    const int begin = horizontal ? 0 : 1;
    const int end = horizontal ? n : n - 1;
    const double h = horizontal ? g.hx : g.hy;
    seg.points.reserve(end - begin);
    for (int k = begin; k < end; ++k) {
        Vec2 p, nu;
        int i = 0, j = 0;
        switch (side) {
            case Side::Bottom: i = k; j = 0;         p = g.node(i, j); nu = {0, -1}; break;
            case Side::Top:    i = k; j = g.ny - 1;  p = g.node(i, j); nu = {0, 1};  break;
            case Side::Left:   i = 0; j = k;         p = g.node(i, j); nu = {-1, 0}; break;
            case Side::Right:  i = g.nx - 1; j = k;  p = g.node(i, j); nu = {1, 0};  break;
        }
        seg.points.push_back(p);
        seg.normals.push_back(nu);
        seg.arc.push_back(h * k);
        seg.grid_nodes.push_back(g.index(i, j));
    }
    const std::size_t m = seg.points.size();
    seg.weights.assign(m, h);
    seg.weights.front() = h / 2;
    seg.weights.back() = h / 2;
    return seg;
}

BoundarySegment disk_segment(const Grid2D& g, double lo, double hi, bool closed) {
    BoundarySegment seg;
    seg.closed = closed;
    const double h = std::min(g.hx, g.hy);
    if (closed) {
        int n = std::max(8, static_cast<int>(std::lround(2 * kPi / h)));
        double dt = 2 * kPi / n;
        for (int k = 0; k < n; ++k) {
            double t = k * dt;
            seg.points.push_back({std::cos(t), std::sin(t)});
            seg.normals.push_back(seg.points.back());
            seg.arc.push_back(t);
        }
        seg.weights.assign(n, dt);
    } else {
        int cells = std::max(4, static_cast<int>(std::lround((hi - lo) / h)));
        double dt = (hi - lo) / cells;
        for (int k = 0; k <= cells; ++k) {
            double t = lo + k * dt;
            seg.points.push_back({std::cos(t), std::sin(t)});
            seg.normals.push_back(seg.points.back());
            seg.arc.push_back(t);
        }
        seg.weights.assign(cells + 1, dt);
        seg.weights.front() = dt / 2;
        seg.weights.back() = dt / 2;
    }
    return seg;
}

BoundaryMesh trace(const Grid2D& grid, bool whole_boundary) {
    BoundaryMesh mesh;
    if (grid.geom.kind == DomainGeometry::Kind::Rectangle) {
        for (Side s : {Side::Bottom, Side::Top, Side::Left, Side::Right}) {
            if (whole_boundary || grid.geom.has_gamma(s)) {
                mesh.segments.push_back(rect_side_segment(grid, s));
            }
        }
    } else {
        if (whole_boundary || grid.geom.full_circle) {
            mesh.segments.push_back(disk_segment(grid, 0.0, 2 * kPi, true));
        } else {
            mesh.segments.push_back(disk_segment(grid, grid.geom.theta_lo, grid.geom.theta_hi, false));
        }
    }
    return mesh;
}

} // namespace

BoundaryMesh boundary_trace(const Grid2D& grid) { return trace(grid, false); }
BoundaryMesh full_boundary_trace(const Grid2D& grid) { return trace(grid, true); }

} // namespace dsmdot
