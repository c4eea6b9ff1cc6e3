// dsmdot: forward data synthesis, sampling-method reconstruction, and kernel
// maps for diffusive optical tomography on rectangles and the unit disk.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <string>

#include <CLI11.hpp>

#include "dsmdot/dsm.hpp"
#include "dsmdot/io.hpp"
#include "dsmdot/parallel.hpp"
#include "dsmdot/simd.hpp"
#include "dsmdot/synthesis.hpp"
#include "dsmdot/version.hpp"

namespace fs = std::filesystem;
using namespace dsmdot;

namespace {

constexpr double kPi = std::numbers::pi;

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double lap() {
        const auto t1 = std::chrono::steady_clock::now();
        const double s = std::chrono::duration<double>(t1 - t0).count();
        t0 = t1;
        return s;
    }
};

Vec2 parse_point(const std::string& s) {
    const auto comma = s.find(',');
    if (comma == std::string::npos) throw std::invalid_argument("--z expects \"x,y\"");
    return {std::stod(s.substr(0, comma)), std::stod(s.substr(comma + 1))};
}

void print_peaks(const IndexMap& map) {
    const Vec2 peak = argmax(map);
    std::cout << "argmax: (" << peak.x << ", " << peak.y << ")\n";
    for (const auto& m : local_maxima(map, 0.5)) {
        std::cout << "local maximum: (" << m.pos.x << ", " << m.pos.y << ") value " << m.value
                  << "\n";
    }
}

int run_forward(const ExperimentConfig& cfg, const std::string& out_dir, int threads) {
    (void)threads;
    fs::create_directories(out_dir);
    Timer timer;
    RunManifest manifest;
    manifest.command = "forward";
    manifest.config_json = config_to_json(cfg);
    manifest.seed = cfg.rng_seed;

    const CauchyPair data = synthesize(cfg);
    manifest.timings_sec["synthesize"] = timer.lap();

    write_boundary_csv(out_dir + "/g.csv", data.g);
    write_boundary_csv(out_dir + "/f.csv", data.f);
    write_boundary_csv(out_dir + "/f0.csv", data.f0);
    write_boundary_csv(out_dir + "/fs_noisy.csv", data.fs_noisy);
    manifest.timings_sec["write"] = timer.lap();
    for (const char* name : {"g.csv", "f.csv", "f0.csv", "fs_noisy.csv"}) {
        manifest.outputs.emplace_back(name, fnv1a64_file(out_dir + std::string("/") + name));
    }
    manifest.write(out_dir + "/run_manifest.json");
    std::cout << "forward data written to " << out_dir << " (max|fs| = " << data.fs_noisy.max_abs()
              << ")\n";
    return 0;
}

int run_reconstruct(const std::string& data_dir, const std::string& method,
                    const std::string& out_dir, int threads) {
    const RunManifest fwd = RunManifest::read(data_dir + "/run_manifest.json");
    if (!fwd.verify_outputs(data_dir)) {
        std::cerr << "error: checksum mismatch in " << data_dir << "\n";
        return 2;
    }
    const ExperimentConfig cfg = config_from_json(fwd.config_json);
    const Grid2D recon = build_grid(cfg.domain, cfg.recon_h);
    const MeshPtr gamma = boundary_trace_shared(recon);
    const BoundaryData fsd = read_boundary_csv(data_dir + "/fs_noisy.csv", gamma);

    fs::create_directories(out_dir);
    Timer timer;
    RunManifest manifest;
    manifest.command = "reconstruct --method " + method;
    manifest.config_json = fwd.config_json;
    manifest.seed = cfg.rng_seed;

    IndexMap map;
    if (fsd.max_abs() == 0.0) {
        std::cout << "warning: scattered data is identically zero; writing a zero map\n";
        map.grid = recon;
        map.kind = IndexKind::I;
        map.values.assign(recon.size(), 0.0);
    } else if (method == "I") {
        map = index_I(fsd, recon, Provider::RectImages, threads);
    } else if (method == "phi") {
        const Field phi = solve_phi(fsd, recon, cfg.medium.mu0);
        map = index_via_phi(phi, recon, Provider::RectImages, threads);
    } else {
        const Field phi = solve_phi(fsd, recon, cfg.medium.mu0);
        map = modified_index(phi, *gamma, cfg.medium.mu0, method == "modified2", threads);
    }
    manifest.timings_sec["reconstruct"] = timer.lap();

    const std::string stem = "index_" + method;
    write_index_csv(out_dir + "/" + stem + ".csv", map);
    write_pgm(out_dir + "/" + stem + ".pgm", map);
    manifest.outputs.emplace_back(stem + ".csv", fnv1a64_file(out_dir + "/" + stem + ".csv"));
    manifest.outputs.emplace_back(stem + ".pgm", fnv1a64_file(out_dir + "/" + stem + ".pgm"));
    manifest.write(out_dir + "/" + stem + "_manifest.json");
    print_peaks(map);
    return 0;
}

int run_kernel(const std::string& domain, Vec2 z, const std::string& out_dir, double grid_h,
               int arc_nodes, double fine_h, double recon_h, int threads) {
    fs::create_directories(out_dir);
    Timer timer;
    RunManifest manifest;
    manifest.command = "kernel --domain " + domain;
    manifest.extra["star"] = "(" + std::to_string(z.x) + ", " + std::to_string(z.y) + ")";

    IndexMap map;
    if (domain == "rect") {
        const DomainGeometry rect = DomainGeometry::rectangle(0, 1, -1, 1, {Side::Left, Side::Right});
        if (!rect.contains(z)) throw PointOutsideDomain("z outside (0,1)x(-1,1)");
        map = kernel_Ktilde(z, rect, fine_h, recon_h, false, threads);
        map.kind = IndexKind::Kernel;
    } else {
        if (std::hypot(z.x, z.y) >= 1.0) throw PointOutsideDomain("z outside the unit disk");
        const bool full = domain == "disk-full";
        const Grid2D grid = build_grid(
            full ? DomainGeometry::unit_disk() : DomainGeometry::unit_disk_arc(0, kPi), grid_h);
        // boundary quadrature resolution decoupled from the sampling grid
        const Grid2D bgrid =
            build_grid(grid.geom, full ? 2 * kPi / arc_nodes : kPi / (arc_nodes - 1));
        const BoundaryMesh gamma = boundary_trace(bgrid);
        map.grid = grid;
        map.kind = IndexKind::Kernel;
        map.values.assign(grid.size(), 0.0);
        parallel_for(static_cast<std::size_t>(grid.ny), threads,
                     [&](std::size_t jb, std::size_t je) {
                         for (std::size_t j = jb; j < je; ++j) {
                             for (int i = 0; i < grid.nx; ++i) {
                                 const Vec2 x = grid.node(i, static_cast<int>(j));
                                 if (std::hypot(x.x, x.y) >= 1.0 - grid_h) continue;
                                 double v = 0.0;
                                 try {
                                     v = disk_kernel_K(x, z, gamma);
                                 } catch (const TruncationNotConverged&) {
                                     v = 0.0;  // beyond the certified series radius
                                 }
                                 map.values[grid.index(i, static_cast<int>(j))] = v;
                             }
                         }
                     });
        double m = 0;
        for (double& v : map.values) {
            v = std::abs(v);
            m = std::max(m, v);
        }
        if (m > 0) {
            for (double& v : map.values) v /= m;
        }
    }
    manifest.timings_sec["kernel"] = timer.lap();

    write_index_csv(out_dir + "/kernel.csv", map);
    write_pgm(out_dir + "/kernel.pgm", map);
    manifest.outputs.emplace_back("kernel.csv", fnv1a64_file(out_dir + "/kernel.csv"));
    manifest.outputs.emplace_back("kernel.pgm", fnv1a64_file(out_dir + "/kernel.pgm"));
    manifest.write(out_dir + "/kernel_manifest.json");
    print_peaks(map);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{std::string(kVersion) + " - direct sampling for diffusive optical tomography"};
    app.require_subcommand(1);
    app.fallthrough();
    int threads = 0;
    app.add_option("--threads", threads, "worker threads (default: DSMDOT_THREADS or hardware)");

    auto* fwd = app.add_subcommand("forward", "synthesize boundary data");
    int example = 0;
    std::string config_path, out_dir;
    std::int64_t seed = -1;
    double noise = -1.0;
    std::string noise_model;
    fwd->add_option("--example", example, "built-in experiment 1..5");
    fwd->add_option("--config", config_path, "experiment config (json)");
    fwd->add_option("--seed", seed, "rng seed override");
    fwd->add_option("--noise", noise, "noise level override");
    fwd->add_option("--noise-model", noise_model, "scalar|pointwise");
    fwd->add_option("--out", out_dir, "output directory")->required();

    auto* rec = app.add_subcommand("reconstruct", "compute an index map from forward data");
    std::string data_dir, method = "modified2", rec_out;
    rec->add_option("--data", data_dir, "forward output directory")->required();
    rec->add_option("--method", method, "I|phi|modified|modified2")
        ->check(CLI::IsMember({"I", "phi", "modified", "modified2"}));
    rec->add_option("--out", rec_out, "output directory (default: data dir)");

    auto* ker = app.add_subcommand("kernel", "kernel map for one sampling point");
    std::string kdomain, zspec, ker_out;
    double grid_h = 0.01, fine_h = 0.004, recon_h = 0.011;
    int arc_nodes = 1024;
    ker->add_option("--domain", kdomain, "disk-full|disk-half|rect")
        ->required()
        ->check(CLI::IsMember({"disk-full", "disk-half", "rect"}));
    ker->add_option("--z", zspec, "sampling point \"x,y\"")->required();
    ker->add_option("--out", ker_out, "output directory")->required();
    ker->add_option("--grid-h", grid_h, "disk sampling resolution");
    ker->add_option("--arc-nodes", arc_nodes, "disk boundary quadrature nodes");
    ker->add_option("--fine-h", fine_h, "rect synthesis mesh");
    ker->add_option("--recon-h", recon_h, "rect reconstruction mesh");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*fwd) {
            if ((example == 0) == config_path.empty()) {
                std::cerr << "error: pass exactly one of --example or --config\n";
                return 2;
            }
            ExperimentConfig cfg =
                config_path.empty() ? example_catalog(example) : config_from_file(config_path);
            if (seed >= 0) cfg.rng_seed = static_cast<std::uint64_t>(seed);
            if (noise >= 0) cfg.noise_level = noise;
            if (!noise_model.empty()) {
                if (noise_model == "scalar") {
                    cfg.noise_model = NoiseModel::Scalar;
                } else if (noise_model == "pointwise") {
                    cfg.noise_model = NoiseModel::Pointwise;
                } else {
                    throw std::invalid_argument("unknown --noise-model " + noise_model);
                }
            }
            return run_forward(cfg, out_dir, threads);
        }
        if (*rec) {
            return run_reconstruct(data_dir, method, rec_out.empty() ? data_dir : rec_out, threads);
        }
        if (*ker) {
            return run_kernel(kdomain, parse_point(zspec), ker_out, grid_h, arc_nodes, fine_h,
                              recon_h, threads);
        }
    } catch (const SolverDivergence& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 1;
    } catch (const TruncationNotConverged& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 1;
    } catch (const IncompatibleFlux& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
