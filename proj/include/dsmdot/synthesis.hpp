#pragma once

#include <cstdint>
#include <optional>

#include "dsmdot/dsm.hpp"
#include "dsmdot/geometry.hpp"
#include "dsmdot/solver.hpp"

// Synthetic experiments: forward solves on the fine mesh, scattered boundary
// potential, measurement noise, restriction to the reconstruction mesh.

namespace dsmdot {

enum class NoiseModel {
    // f_s + eps * delta * max|f_s| with one uniform [-1,1] draw per data set.
    Scalar,
    // Independent uniform [-1,1] draw per boundary node.
    Pointwise,
};

struct ExperimentConfig {
    DomainGeometry domain;
    Medium medium;
    double fine_h = 0.004;
    double recon_h = 0.011;
    double noise_level = 0.05;
    std::uint64_t rng_seed = 1;
    NoiseModel noise_model = NoiseModel::Scalar;

    void validate() const;  // fine_h < recon_h, inclusions inside, ...
};

struct CauchyPair {
    MeshPtr full_boundary;        // reconstruction-resolution mesh of the whole boundary
    MeshPtr gamma;                // reconstruction-resolution mesh of Gamma
    BoundaryData g;               // flux on the whole boundary
    BoundaryData f;               // trace of u on Gamma (restricted)
    BoundaryData f0;              // trace of u0 on Gamma (restricted)
    BoundaryData fs_noisy;        // noisy f - f0
};

// Uniform unit in/out-flow across the measured pair: +1 on the high side of
// the pair, -1 on the low side, 0 elsewhere. WrongDomain unless the domain is
// a rectangle with Gamma an opposite-side pair.
BoundaryFlux uniform_pair_flux(const Grid2D& grid);

BoundaryData add_noise(const BoundaryData& fs, double eps, std::uint64_t seed);
BoundaryData add_noise_pointwise(const BoundaryData& fs, double eps, std::uint64_t seed);

// The five experiment configurations of the numerical study.
ExperimentConfig example_catalog(int n);

CauchyPair synthesize(const ExperimentConfig& config, const SolverOptions& opts = {});

// Point-inclusion kernel: synthesize data for mu0 + 50 * chi_{B_eps(z)} with
// eps = 2 fine cells, then the modified index of that data.
IndexMap kernel_Ktilde(Vec2 z, const DomainGeometry& domain, double fine_h = 0.004,
                       double recon_h = 0.011, bool square = false, int threads = 0);

} // namespace dsmdot
