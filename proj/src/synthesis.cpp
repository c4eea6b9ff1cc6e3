#include "dsmdot/synthesis.hpp"

#include <cmath>
#include <random>

namespace dsmdot {

namespace {

double uniform_pm1(std::mt19937_64& rng) {
    // 53-bit mantissa draw in [0,1), mapped to [-1,1); bit-stable across platforms.
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return 2.0 * u - 1.0;
}

// The measured opposite-side pair, or WrongDomain.
std::pair<Side, Side> measured_pair(const DomainGeometry& geom) {
    if (geom.kind != DomainGeometry::Kind::Rectangle) throw WrongDomain("rectangle expected");
    const bool tb = geom.has_gamma(Side::Bottom) && geom.has_gamma(Side::Top) &&
                    !geom.has_gamma(Side::Left) && !geom.has_gamma(Side::Right);
    const bool lr = geom.has_gamma(Side::Left) && geom.has_gamma(Side::Right) &&
                    !geom.has_gamma(Side::Bottom) && !geom.has_gamma(Side::Top);
    if (tb) return {Side::Bottom, Side::Top};
    if (lr) return {Side::Left, Side::Right};
    throw WrongDomain("gamma must be one opposite-side pair");
}

} // namespace

void ExperimentConfig::validate() const {
    if (!(fine_h > 0) || !(recon_h > 0)) throw std::invalid_argument("mesh sizes must be positive");
    if (!(fine_h < recon_h)) {
        throw std::invalid_argument("fine mesh must be strictly finer than the reconstruction mesh");
    }
    if (noise_level < 0) throw std::invalid_argument("noise level must be non-negative");
    medium.validate(domain, fine_h);
}

BoundaryFlux uniform_pair_flux(const Grid2D& grid) {
    const auto [low, high] = measured_pair(grid.geom);
    BoundaryFlux f = BoundaryFlux::zero(grid);
    for (double& v : f[high]) v = 1.0;
    for (double& v : f[low]) v = -1.0;
    return f;
}

BoundaryData add_noise(const BoundaryData& fs, double eps, std::uint64_t seed) {
    if (eps < 0) throw std::invalid_argument("noise level must be non-negative");
    std::mt19937_64 rng(seed);
    const double delta = uniform_pm1(rng);
    const double amp = eps * fs.max_abs();
    BoundaryData out = fs;
    for (double& v : out.values) v += amp * delta;
    return out;
}

BoundaryData add_noise_pointwise(const BoundaryData& fs, double eps, std::uint64_t seed) {
    if (eps < 0) throw std::invalid_argument("noise level must be non-negative");
    std::mt19937_64 rng(seed);
    const double amp = eps * fs.max_abs();
    BoundaryData out = fs;
    for (double& v : out.values) v += amp * uniform_pm1(rng);
    return out;
}

ExperimentConfig example_catalog(int n) {
    ExperimentConfig cfg;
    cfg.domain = DomainGeometry::rectangle(-1, 1, 0, 0.4, {Side::Bottom, Side::Top});
    cfg.medium.mu0 = 0.0;
    const double mu = 50.0;
    const double r = 0.065;
    switch (n) {
        case 1:
            cfg.medium.inclusions = {Inclusion::disk({-0.5, 0.25}, r, mu),
                                     Inclusion::disk({0.25, 0.15}, r, mu)};
            break;
        case 2:
            cfg.medium.inclusions = {Inclusion::disk({-0.3, 0.1}, r, mu),
                                     Inclusion::disk({-0.3, 0.3}, r, mu),
                                     Inclusion::disk({0.3, 0.1}, r, mu),
                                     Inclusion::disk({0.3, 0.3}, r, mu)};
            break;
        case 3:
            cfg.medium.inclusions = {Inclusion::disk({-0.5, 0.3}, r, mu),
                                     Inclusion::disk({-0.3, 0.1}, r, mu),
                                     Inclusion::disk({0.0, 0.3}, r, mu),
                                     Inclusion::disk({0.3, 0.1}, r, mu)};
            break;
        case 4:
            // width 0.1, length 0.2: length runs along the slab
            cfg.medium.inclusions = {Inclusion::rect({0.0, 0.15}, 0.2, 0.1, mu)};
            break;
        case 5:
            cfg.medium.inclusions = {Inclusion::rect({-0.1, 0.125}, 0.4, 0.05, mu),
                                     Inclusion::rect({-0.1, 0.275}, 0.4, 0.05, mu)};
            break;
        default:
            throw UnknownExample("example " + std::to_string(n) + " (valid: 1..5)");
    }
    return cfg;
}

CauchyPair synthesize(const ExperimentConfig& config, const SolverOptions& opts) {
    config.validate();

    const Grid2D fine = build_grid(config.domain, config.fine_h);
    const Grid2D recon = build_grid(config.domain, config.recon_h);
    const BoundaryFlux g = uniform_pair_flux(fine);

    Medium background;
    background.mu0 = config.medium.mu0;
    const Field u0 = solve_neumann(fine, background, g, nullptr, opts);
    const Field u = solve_neumann(fine, config.medium, g, nullptr, opts);

    const MeshPtr gamma_fine = boundary_trace_shared(fine);
    BoundaryData fs_fine = BoundaryData::zeros(gamma_fine);
    BoundaryData f_fine = BoundaryData::zeros(gamma_fine);
    BoundaryData f0_fine = BoundaryData::zeros(gamma_fine);
    std::size_t pos = 0;
    for (const auto& seg : gamma_fine->segments) {
        for (int node : seg.grid_nodes) {
            f_fine.values[pos] = u.values[node];
            f0_fine.values[pos] = u0.values[node];
            fs_fine.values[pos] = u.values[node] - u0.values[node];
            ++pos;
        }
    }

    CauchyPair out;
    out.gamma = boundary_trace_shared(recon);
    out.full_boundary = full_boundary_trace_shared(recon);
    out.f = restrict_to(f_fine, out.gamma);
    out.f0 = restrict_to(f0_fine, out.gamma);
    BoundaryData fs = restrict_to(fs_fine, out.gamma);
    out.fs_noisy = config.noise_model == NoiseModel::Scalar
                       ? add_noise(fs, config.noise_level, config.rng_seed)
                       : add_noise_pointwise(fs, config.noise_level, config.rng_seed);

    const BoundaryFlux gr = uniform_pair_flux(recon);
    out.g = BoundaryData::zeros(out.full_boundary);
    pos = 0;
    for (const auto& seg : out.full_boundary->segments) {
        for (std::size_t k = 0; k < seg.size(); ++k) {
            out.g.values[pos++] = gr[seg.side][seg.side == Side::Bottom || seg.side == Side::Top
                                                   ? seg.grid_nodes[k] % recon.nx
                                                   : seg.grid_nodes[k] / recon.nx];
        }
    }
    return out;
}

IndexMap kernel_Ktilde(Vec2 z, const DomainGeometry& domain, double fine_h, double recon_h,
                       bool square, int threads) {
    if (!domain.contains(z)) throw PointOutsideDomain("sampling point z outside the domain");
    ExperimentConfig cfg;
    cfg.domain = domain;
    cfg.medium.mu0 = 0.0;
    cfg.medium.inclusions = {Inclusion::disk(z, 2 * fine_h, 50.0)};
    cfg.fine_h = fine_h;
    cfg.recon_h = recon_h;
    cfg.noise_level = 0.0;
    const CauchyPair data = synthesize(cfg);
    const Grid2D recon = build_grid(domain, recon_h);
    const Field phi = solve_phi(data.fs_noisy, recon, 0.0);
    return modified_index(phi, *data.gamma, 0.0, square, threads);
}

} // namespace dsmdot
