#pragma once

#include <memory>
#include <span>
#include <vector>

#include "dsmdot/analytic.hpp"
#include "dsmdot/geometry.hpp"
#include "dsmdot/solver.hpp"

// The sampling method itself: surface operators on Gamma, duality products,
// probing functions, the index function I, the phi representation and the
// modified index.

namespace dsmdot {

using MeshPtr = std::shared_ptr<const BoundaryMesh>;

MeshPtr boundary_trace_shared(const Grid2D& grid);
MeshPtr full_boundary_trace_shared(const Grid2D& grid);

// Scalar data on the ordered nodes of a boundary mesh (segment-major).
struct BoundaryData {
    MeshPtr mesh;
    std::vector<double> values;

    static BoundaryData zeros(MeshPtr mesh);
    std::span<double> segment(std::size_t seg);
    std::span<const double> segment(std::size_t seg) const;
    double max_abs() const;
};

// Restrict data to a coarser mesh of the same Gamma by linear interpolation
// in arc length, segment by segment.
BoundaryData restrict_to(const BoundaryData& src, MeshPtr target);

// Second arc-length derivative per segment: central differences inside,
// second-order one-sided stencils at open ends, cyclic wrap when closed.
BoundaryData surface_laplacian(const BoundaryData& d);
// First arc-length derivative (central; one-sided second-order at open ends).
BoundaryData arc_derivative(const BoundaryData& d);

// <phi, psi>_s for s in {0,1}: s=0 trapezoid of phi*psi, s=1 trapezoid of
// (-lap_Gamma phi)*psi.
double duality_product(const BoundaryData& phi, const BoundaryData& psi, int s);

struct EtaNorms {
    double h0 = 0.0;  // L2(Gamma) norm
    double h1 = 0.0;  // H1(Gamma) semi-norm
};
EtaNorms eta_norms_numeric(const BoundaryData& eta);

enum class Provider { DiskAnalytic, RectImages, FdSolve };

// Probing function sampled on Gamma, with tangential derivatives when the
// provider has them in closed form (FdSolve falls back to differences).
struct ProbingSample {
    BoundaryData eta;
    BoundaryData deta;
    BoundaryData lap_eta;
    bool analytic_derivatives = false;
};

ProbingSample probing_eta(Vec2 x, const Grid2D& grid, MeshPtr gamma, Provider provider,
                          const SolverOptions& opts = {});

enum class IndexKind { I, IViaPhi, Modified, ModifiedSquared, Kernel };

// Values of an index on the sampling grid, normalized to max |.| = 1 (the
// magnitude convention: signs are dropped before normalization). Nodes within
// `margin_cells` of the domain boundary are not sampled and hold 0.
struct IndexMap {
    Grid2D grid;
    IndexKind kind = IndexKind::I;
    int margin_cells = 2;
    std::vector<double> values;

    double at(int i, int j) const { return values[static_cast<std::size_t>(grid.index(i, j))]; }
};

struct LocalMax {
    Vec2 pos;
    double value;
};

// Strict 8-neighbour local maxima above the threshold.
std::vector<LocalMax> local_maxima(const IndexMap& map, double threshold);
Vec2 argmax(const IndexMap& map);

// I(x) = <eta_x, fs>_1 / (|eta_x|_{H1}^{1/2} |eta_x|_{H0}^{3/4}) on the
// sampling grid, then normalized. fs lives on the Gamma mesh of `sampling`.
IndexMap index_I(const BoundaryData& fs, const Grid2D& sampling, Provider provider,
                 int threads = 0, const SolverOptions& opts = {});

// phi: -lap phi + mu0 phi = 0, phi = lap_Gamma(fs) on Gamma, Neumann-0 elsewhere.
Field solve_phi(const BoundaryData& fs, const Grid2D& grid, double mu0,
                const SolverOptions& opts = {});

// I via the representation <eta_x, fs>_1 = phi(x), with numeric eta norms.
IndexMap index_via_phi(const Field& phi, const Grid2D& sampling, Provider provider,
                       int threads = 0);

// Norms of the fundamental-solution flux dPhi_x/dnu on Gamma by quadrature of
// the analytic integrand (log kernel for mu0=0, Bessel-K for mu0>0).
EtaNorms fundamental_flux_norms(Vec2 x, const BoundaryMesh& gamma, double mu0);

// S(x) = 1 / (phi_max + |phi(x)|).
double scaling_function(double phi_value, double phi_max);

// Modified index: phi * S / (h1^{1/2} h0^{3/4}) with fundamental-solution
// norms; `square` squares the normalized magnitude.
IndexMap modified_index(const Field& phi, const BoundaryMesh& gamma, double mu0, bool square,
                        int threads = 0);

} // namespace dsmdot
