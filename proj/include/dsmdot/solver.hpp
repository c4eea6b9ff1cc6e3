#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "dsmdot/geometry.hpp"

namespace dsmdot {

struct Inclusion {
    enum class Shape { Disk, Rect };
    Shape shape = Shape::Disk;
    Vec2 center;
    double radius = 0.0;            // Disk
    double width = 0.0, height = 0.0;  // Rect extents along x and y
    double mu = 0.0;                // absorption inside

    static Inclusion disk(Vec2 center, double radius, double mu);
    static Inclusion rect(Vec2 center, double width, double height, double mu);
    bool contains(Vec2 p) const;
};

// Background absorption plus inclusions; mu(x) is mu of the first inclusion
// containing x, else mu0.
struct Medium {
    double mu0 = 0.0;
    std::vector<Inclusion> inclusions;

    double value_at(Vec2 p) const;
    bool identically_zero() const;
    // Inclusions must sit inside the domain by at least `margin`.
    void validate(const DomainGeometry& geom, double margin) const;
};

struct Field {
    Grid2D grid;
    std::vector<double> values;

    double& at(int i, int j) { return values[static_cast<std::size_t>(grid.index(i, j))]; }
    double at(int i, int j) const { return values[static_cast<std::size_t>(grid.index(i, j))]; }
};

// Per-side Neumann data, each vector covering the full node range of its side
// (corners included); the ghost closure of each face uses its own side's value.
struct BoundaryFlux {
    std::array<std::vector<double>, 4> side;  // indexed by Side

    static BoundaryFlux zero(const Grid2D& grid);
    std::vector<double>& operator[](Side s) { return side[static_cast<int>(s)]; }
    const std::vector<double>& operator[](Side s) const { return side[static_cast<int>(s)]; }
};

struct SolverOptions {
    double tol = 1e-10;   // relative residual
    int max_iter = 0;     // 0: 20*sqrt(n)
};

struct SolveInfo {
    int iterations = 0;
    double residual = 0.0;
};

// Symmetric positive (semi)definite operator for the CG solver.
class LinearOperator {
public:
    virtual ~LinearOperator() = default;
    virtual std::size_t size() const = 0;
    virtual void apply(const double* x, double* y) const = 0;
    virtual const double* jacobi() const { return nullptr; }  // diagonal, optional
    // Semidefinite with the constant null vector (pure-Neumann Laplacian).
    virtual bool semidefinite() const { return false; }
};

// Conjugate gradients with optional Jacobi preconditioning. In the
// semidefinite case the rhs must be compatible (IncompatibleFlux otherwise)
// and the result is returned as the zero-mean representative.
std::vector<double> linear_solve(const LinearOperator& op, std::span<const double> rhs,
                                 const SolverOptions& opts = {}, SolveInfo* info = nullptr);

// -lap u + mu u = source, du/dnu = g on the whole boundary (5-point stencil,
// ghost-node closure). For mu == 0 the compatible singular system is solved
// and the solution shifted to zero boundary mean.
Field solve_neumann(const Grid2D& grid, const Medium& medium, const BoundaryFlux& g,
                    const Field* source = nullptr, const SolverOptions& opts = {},
                    SolveInfo* info = nullptr);

// -lap w + mu0 w = (optional delta at x0), w = dirichlet on Gamma,
// dw/dnu = 0 on the rest of the boundary. `dirichlet` is indexed like the
// Gamma mesh of `gamma`; the mesh must be grid-aligned (rectangle).
Field solve_mixed(const Grid2D& grid, double mu0, const BoundaryMesh& gamma,
                  std::span<const double> dirichlet, std::optional<Vec2> point_source,
                  const SolverOptions& opts = {}, SolveInfo* info = nullptr);

// Outward normal derivative of a solved field on the given boundary mesh
// (one-sided second-order differences into the domain).
std::vector<double> flux_on_boundary(const Field& w, const BoundaryMesh& mesh);

} // namespace dsmdot
