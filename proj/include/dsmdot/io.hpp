#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "dsmdot/dsm.hpp"
#include "dsmdot/synthesis.hpp"

// CSV / PGM / manifest output. CSV: header "x1,x2,value", 9 significant
// digits. PGM: binary P5, maxval 255, rows top to bottom.

namespace dsmdot {

void write_index_csv(const std::string& path, const IndexMap& map);
void write_boundary_csv(const std::string& path, const BoundaryData& data);
// Reads values for a known mesh (node order and count must match).
BoundaryData read_boundary_csv(const std::string& path, MeshPtr mesh);

void write_pgm(const std::string& path, const IndexMap& map);
struct PgmImage {
    int width = 0, height = 0;
    std::vector<std::uint8_t> pixels;  // row-major, top to bottom
};
PgmImage read_pgm(const std::string& path);

std::uint64_t fnv1a64_file(const std::string& path);

struct RunManifest {
    std::string tool_version;
    std::string command;
    std::string config_json;          // echo of the experiment configuration
    std::uint64_t seed = 0;
    std::string rng = "mt19937_64";
    std::map<std::string, double> timings_sec;
    std::map<std::string, std::string> extra;            // e.g. star location
    std::vector<std::pair<std::string, std::uint64_t>> outputs;  // file, checksum

    void add_output(const std::string& path);
    void write(const std::string& path) const;
    static RunManifest read(const std::string& path);
    // Re-hash every listed file and compare.
    bool verify_outputs(const std::string& dir) const;
};

// Experiment config <-> strict JSON (unknown keys rejected).
std::string config_to_json(const ExperimentConfig& cfg);
ExperimentConfig config_from_json(const std::string& json_text);
ExperimentConfig config_from_file(const std::string& path);

} // namespace dsmdot
