#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "dsmdot/dsm.hpp"
#include "dsmdot/io.hpp"
#include "dsmdot/synthesis.hpp"

namespace fs = std::filesystem;
using namespace dsmdot;

namespace {

int run(const std::string& args) {
    const std::string cmd = std::string(DSMDOT_BIN) + " " + args + " > /dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() / ("dsmdot_" + tag + "_" + std::to_string(::getpid()));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

} // namespace

TEST_CASE("forward writes the data files and a verifiable manifest") {
    TempDir dir("fwd");
    REQUIRE(run("forward --example 1 --seed 42 --out " + dir.path.string()) == 0);
    for (const char* name : {"g.csv", "f.csv", "f0.csv", "fs_noisy.csv", "run_manifest.json"}) {
        CHECK(fs::exists(dir.path / name));
    }
    const RunManifest m = RunManifest::read((dir.path / "run_manifest.json").string());
    CHECK(m.seed == 42);
    CHECK(m.rng == "mt19937_64");
    CHECK(m.verify_outputs(dir.path.string()));

    // identical config and seed reproduce the data byte for byte
    TempDir dir2("fwd2");
    REQUIRE(run("forward --example 1 --seed 42 --out " + dir2.path.string()) == 0);
    CHECK(slurp(dir.path / "fs_noisy.csv") == slurp(dir2.path / "fs_noisy.csv"));
}

TEST_CASE("unknown example exits with a usage error") {
    TempDir dir("bad");
    CHECK(run("forward --example 9 --out " + dir.path.string()) == 2);
    CHECK(run("forward --out " + dir.path.string()) == 2);
    CHECK(run("bogus-subcommand") == 2);
}

TEST_CASE("noise 0 reproduces the noise-free difference") {
    TempDir dir("nf");
    REQUIRE(run("forward --example 1 --noise 0.0 --seed 5 --out " + dir.path.string()) == 0);
    const ExperimentConfig cfg = example_catalog(1);
    const Grid2D recon = build_grid(cfg.domain, cfg.recon_h);
    const auto gamma = boundary_trace_shared(recon);
    const BoundaryData f = read_boundary_csv((dir.path / "f.csv").string(), gamma);
    const BoundaryData f0 = read_boundary_csv((dir.path / "f0.csv").string(), gamma);
    const BoundaryData fsn = read_boundary_csv((dir.path / "fs_noisy.csv").string(), gamma);
    double fmax = fsn.max_abs();
    for (std::size_t k = 0; k < fsn.values.size(); ++k) {
        CHECK(std::abs(fsn.values[k] - (f.values[k] - f0.values[k])) <= 1e-7 * fmax);
    }

    // the same forward run with another seed is byte-identical at eps = 0
    TempDir dir2("nf2");
    REQUIRE(run("forward --example 1 --noise 0.0 --seed 77 --out " + dir2.path.string()) == 0);
    CHECK(slurp(dir.path / "fs_noisy.csv") == slurp(dir2.path / "fs_noisy.csv"));
}

TEST_CASE("reconstruction finds the example-1 inclusions") {
    TempDir dir("rec");
    REQUIRE(run("forward --example 1 --seed 1 --out " + dir.path.string()) == 0);
    REQUIRE(run("reconstruct --data " + dir.path.string() + " --method modified2") == 0);
    REQUIRE(fs::exists(dir.path / "index_modified2.csv"));
    REQUIRE(fs::exists(dir.path / "index_modified2.pgm"));

    const ExperimentConfig cfg = example_catalog(1);
    const Grid2D recon = build_grid(cfg.domain, cfg.recon_h);
    IndexMap map;
    map.grid = recon;
    map.values.assign(recon.size(), 0.0);
    {
        std::ifstream in(dir.path / "index_modified2.csv");
        std::string line;
        std::getline(in, line);
        for (std::size_t k = 0; k < map.values.size(); ++k) {
            REQUIRE(static_cast<bool>(std::getline(in, line)));
            map.values[k] = std::strtod(line.c_str() + line.rfind(',') + 1, nullptr);
        }
    }
    const auto peaks = local_maxima(map, 0.5);
    REQUIRE(peaks.size() == 2);
    const Vec2 centers[] = {{-0.5, 0.25}, {0.25, 0.15}};
    for (const Vec2& c : centers) {
        double best = 1e9;
        for (const auto& p : peaks) best = std::min(best, std::hypot(p.pos.x - c.x, p.pos.y - c.y));
        CHECK(best < 0.1);
    }

    // PGM and CSV encode the same grid up to the 8-bit quantization
    const PgmImage img = read_pgm((dir.path / "index_modified2.pgm").string());
    REQUIRE(img.width == recon.nx);
    REQUIRE(img.height == recon.ny);
    for (int j = 0; j < recon.ny; ++j) {
        for (int i = 0; i < recon.nx; ++i) {
            const double pix = img.pixels[(recon.ny - 1 - j) * recon.nx + i] / 255.0;
            CHECK(std::abs(pix - map.at(i, j)) <= 1.0 / 255.0 + 1e-12);
        }
    }

    // methods I and phi locate the same argmax
    REQUIRE(run("reconstruct --data " + dir.path.string() + " --method I") == 0);
    REQUIRE(run("reconstruct --data " + dir.path.string() + " --method phi") == 0);
    auto read_map = [&](const char* name) {
        IndexMap m2;
        m2.grid = recon;
        m2.values.assign(recon.size(), 0.0);
        std::ifstream in(dir.path / name);
        std::string line;
        std::getline(in, line);
        for (std::size_t k = 0; k < m2.values.size(); ++k) {
            std::getline(in, line);
            m2.values[k] = std::strtod(line.c_str() + line.rfind(',') + 1, nullptr);
        }
        return m2;
    };
    const Vec2 ai = argmax(read_map("index_I.csv"));
    const Vec2 ap = argmax(read_map("index_phi.csv"));
    CHECK(std::abs(ai.x - ap.x) <= recon.hx + 1e-12);
    CHECK(std::abs(ai.y - ap.y) <= recon.hy + 1e-12);
}

TEST_CASE("zero data reconstructs to a zero map with exit 0") {
    TempDir dir("zero");
    const std::string cfg_path = (dir.path / "cfg.json").string();
    {
        ExperimentConfig cfg;
        cfg.domain = DomainGeometry::rectangle(-1, 1, 0, 0.4, {Side::Bottom, Side::Top});
        cfg.fine_h = 0.01;
        cfg.recon_h = 0.02;
        cfg.noise_level = 0.0;
        std::ofstream out(cfg_path);
        out << config_to_json(cfg);
    }
    REQUIRE(run("forward --config " + cfg_path + " --out " + dir.path.string()) == 0);
    REQUIRE(run("reconstruct --data " + dir.path.string() + " --method modified2") == 0);
    const Grid2D recon =
        build_grid(DomainGeometry::rectangle(-1, 1, 0, 0.4, {Side::Bottom, Side::Top}), 0.02);
    std::ifstream in(dir.path / "index_modified2.csv");
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
        CHECK(std::strtod(line.c_str() + line.rfind(',') + 1, nullptr) == 0.0);
    }
}

TEST_CASE("config rejects unknown keys") {
    TempDir dir("badcfg");
    const std::string cfg_path = (dir.path / "cfg.json").string();
    {
        std::ofstream out(cfg_path);
        out << R"({"domain":{"kind":"rectangle","x0":-1,"x1":1,"y0":0,"y1":0.4,)"
            << R"("gamma":["bottom","top"]},"fine_h":0.01,"recon_h":0.02,"frobnicate":1})";
    }
    CHECK(run("forward --config " + cfg_path + " --out " + dir.path.string()) == 2);
}

TEST_CASE("kernel map of the disk center is flat zero") {
    TempDir dir("ker");
    REQUIRE(run("kernel --domain disk-full --z 0,0 --grid-h 0.05 --out " + dir.path.string()) == 0);
    std::ifstream in(dir.path / "kernel.csv");
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
        CHECK(std::strtod(line.c_str() + line.rfind(',') + 1, nullptr) == 0.0);
    }
    CHECK(run("kernel --domain disk-full --z 2,0 --out " + dir.path.string()) == 2);
}

TEST_CASE("worker thread count does not change the output bytes") {
    TempDir dir("thr");
    REQUIRE(run("forward --example 1 --seed 3 --out " + dir.path.string()) == 0);
    fs::create_directories(dir.path / "a");
    fs::create_directories(dir.path / "b");
    REQUIRE(run("reconstruct --data " + dir.path.string() + " --method modified2 --threads 1 --out " +
                (dir.path / "a").string()) == 0);
    REQUIRE(run("reconstruct --data " + dir.path.string() + " --method modified2 --threads 2 --out " +
                (dir.path / "b").string()) == 0);
    CHECK(slurp(dir.path / "a" / "index_modified2.csv") == slurp(dir.path / "b" / "index_modified2.csv"));
}

TEST_CASE("corrupted data directory fails the checksum gate") {
    TempDir dir("crc");
    REQUIRE(run("forward --example 1 --seed 1 --noise 0 --out " + dir.path.string()) == 0);
    {
        std::ofstream out(dir.path / "fs_noisy.csv", std::ios::app);
        out << "0,0,999\n";
    }
    CHECK(run("reconstruct --data " + dir.path.string() + " --method modified2") == 2);
}
