#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include "dsmdot/errors.hpp"

namespace dsmdot {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

inline double dist(Vec2 a, Vec2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

// Rectangle sides, in the canonical segment emission order.
enum class Side { Bottom = 0, Top = 1, Left = 2, Right = 3 };

// Domain plus the measurement subset Gamma of its boundary.
struct DomainGeometry {
    enum class Kind { Rectangle, UnitDisk };
    Kind kind = Kind::Rectangle;

    // Rectangle extents.
    double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
    std::array<bool, 4> gamma_sides{};  // indexed by Side

    // Unit disk: full circle or one arc [theta_lo, theta_hi].
    bool full_circle = true;
    double theta_lo = 0.0, theta_hi = 0.0;

    static DomainGeometry rectangle(double x0, double x1, double y0, double y1,
                                    std::initializer_list<Side> gamma);
    static DomainGeometry rectangle(double x0, double x1, double y0, double y1,
                                    const std::vector<Side>& gamma);
    static DomainGeometry unit_disk();
    static DomainGeometry unit_disk_arc(double theta_lo, double theta_hi);

    double width() const { return x1 - x0; }
    double height() const { return y1 - y0; }
    bool has_gamma(Side s) const { return gamma_sides[static_cast<int>(s)]; }
    bool contains(Vec2 p) const;
};

enum class SnapPolicy { Exact, Snap };

// Uniform tensor grid on the rectangle (or the disk's bounding box [-1,1]^2).
struct Grid2D {
    DomainGeometry geom;
    int nx = 0, ny = 0;        // node counts
    double hx = 0, hy = 0;     // per-axis spacing after snapping

    double x(int i) const { return base_x + hx * i; }
    double y(int j) const { return base_y + hy * j; }
    Vec2 node(int i, int j) const { return {x(i), y(j)}; }
    int index(int i, int j) const { return j * nx + i; }
    int size() const { return nx * ny; }
    bool on_boundary(int i, int j) const { return i == 0 || j == 0 || i == nx - 1 || j == ny - 1; }
    // For the disk: whether the Cartesian node lies strictly inside the circle.
    bool inside_disk(int i, int j) const { return std::hypot(x(i), y(j)) < 1.0; }
    int nearest_i(double xc) const;
    int nearest_j(double yc) const;

    double base_x = 0, base_y = 0;
};

Grid2D build_grid(const DomainGeometry& geom, double h, SnapPolicy policy = SnapPolicy::Snap);

// One maximal connected piece of Gamma: ordered nodes, trapezoid weights,
// outward normals. `arc` is the physical arc position measured from the
// owning side's start corner (rectangle) or from angle 0 (disk), so data can
// be interpolated between meshes of different resolution.
struct BoundarySegment {
    Side side = Side::Bottom;       // rectangle only
    bool closed = false;            // full circle
    std::vector<Vec2> points;
    std::vector<double> arc;
    std::vector<double> weights;
    std::vector<Vec2> normals;
    std::vector<int> grid_nodes;    // flat grid indices; empty for the disk

    std::size_t size() const { return points.size(); }
    double length() const { return closed ? arc.size() * (arc[1] - arc[0]) : arc.back() - arc.front(); }
};

struct BoundaryMesh {
    std::vector<BoundarySegment> segments;

    std::size_t total_nodes() const;
    std::size_t segment_offset(std::size_t seg) const;
};

// Mesh of the measurement boundary Gamma.
BoundaryMesh boundary_trace(const Grid2D& grid);
// Mesh of the whole boundary (all four sides / full circle), same conventions.
BoundaryMesh full_boundary_trace(const Grid2D& grid);

} // namespace dsmdot
