#pragma once

#include <span>
#include <vector>

#include "dsmdot/geometry.hpp"

// Closed forms and series for the two special domains: Poisson-kernel and
// Fourier/Bessel expansions on the unit disk, reflected-source (image) ladders
// on a rectangle measured on one pair of opposite sides.

namespace dsmdot {

// ---------------------------------------------------------------- unit disk

// Probing flux on the unit circle: (1-|x|^2) / (2*pi*|x-y(theta)|^2).
double disk_poisson_eta(Vec2 x, double theta);

// <eta_x, G_z>_1 closed form; symmetric in x and z by construction.
double disk_duality_H1(Vec2 x, Vec2 z);

struct DiskNorms {
    double h0_sq = 0.0;  // squared L2 norm of eta_x on the circle
    double h1_sq = 0.0;  // squared H1 semi-norm
};
DiskNorms disk_eta_norms(Vec2 x);

// Sample the truncated Fourier series of eta_x and its first two angular
// derivatives on the given angles. n_max <= 0 picks the truncation from
// max(|x|, r_hint) so the tail is below 1e-12 (capped at 200;
// TruncationNotConverged beyond that).
void disk_eta_series(Vec2 x, std::span<const double> thetas, std::span<double> eta,
                     std::span<double> deta, std::span<double> lap_eta, int n_max = 0,
                     double r_hint = 0.0);
// Trace of the zero-mean Neumann Green function G_z on the circle.
void disk_Gz_series(Vec2 z, std::span<const double> thetas, std::span<double> g, int n_max = 0,
                    double r_hint = 0.0);

// Kernel K(x,z): on the full circle the closed-form composition
// duality/( |eta|_{H1}^{1/2} |eta|_{H0}^{3/4} ); on an arc all three factors
// are trapezoid quadratures of the truncated series over the arc mesh.
double disk_kernel_K(Vec2 x, Vec2 z, const BoundaryMesh& gamma);

// I_n(sqrt_mu0*r)/I_n(sqrt_mu0); switches to the r^n asymptote for large n
// or when the Bessel values underflow.
double bessel_coeff_ratio(int n, double sqrt_mu0, double r);

// Probing-function series for a nonzero background absorption: the mu0 = 0
// coefficients r^n are replaced by the Bessel ratios above.
void disk_eta_series_bessel(Vec2 x, double sqrt_mu0, std::span<const double> thetas,
                            std::span<double> eta, std::span<double> deta,
                            std::span<double> lap_eta, int n_max = 0);

// mu0>0 duality product on the full circle via the modified-Bessel series.
double disk_duality_H1_bessel(Vec2 x, Vec2 z, double sqrt_mu0, int n_max = 200);

// ---------------------------------------------------------------- rectangle

// Rectangle measured on one opposite-side pair, described in strip
// coordinates: u across the measured pair (0 at the "low" side, hu at the
// "high" one), v along it in (-L, L).
struct RectStrip {
    double hu = 0.0;   // distance between the measured sides
    double L = 0.0;    // half-length of the sides
    bool measured_y = true;  // measured pair = {bottom, top} (u along y) or {left, right}
    double u_origin = 0.0;   // domain coordinate of u = 0
    double v_center = 0.0;   // domain coordinate of v = 0

    static RectStrip from(const DomainGeometry& geom);  // WrongDomain otherwise
    // (u, v) of a point given in domain coordinates.
    void to_uv(Vec2 p, double& u, double& v) const;
};

// Image of x under reflection class k in {1,2,3,4} and lattice offset
// (i1, i2), in (u, v) coordinates.
Vec2 rect_image_point(const RectStrip& s, double u, double v, int k, int i1, int i2);

// One raw image flux term at a boundary point (side u=hu when side_high,
// else u=0) with tangential coordinate vy.
double rect_eta_term(const RectStrip& s, double u, double v, bool side_high, double vy,
                     int k, int i1, int i2);

// Literal square truncation |i1|,|i2| <= n_img of the image flux sum.
// Reference only: the double sum converges conditionally and its square-
// truncation limit carries a shape offset; use rect_eta for real work.
double rect_eta_truncated(const RectStrip& s, Vec2 x, double vy, bool side_high, int n_img);

// Probing flux with each i1 ladder summed in closed form (cotangent identity)
// and i2 rows added until the shell falls below 1e-10 of the partial sum
// (TruncationNotConverged if n_img rows are not enough).
double rect_eta(const RectStrip& s, Vec2 x, double vy, bool side_high, int n_img = 20);

// Batch evaluation of the ladder-summed flux and its first and second
// tangential derivatives at many boundary points (hot path of the index).
void rect_eta_ladder(const RectStrip& s, double u, double v, bool side_high,
                     std::span<const double> vy, std::span<double> eta, std::span<double> deta,
                     std::span<double> lap_eta, int n_rows = 8);

} // namespace dsmdot
