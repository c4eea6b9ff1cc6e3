#include "dsmdot/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "dsmdot/version.hpp"

namespace dsmdot {

using nlohmann::json;

namespace {

std::string fmt9(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
}

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

void write_index_csv(const std::string& path, const IndexMap& map) {
    std::ostringstream out;
    out << "x1,x2,value\n";
    const Grid2D& g = map.grid;
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            out << fmt9(g.x(i)) << ',' << fmt9(g.y(j)) << ',' << fmt9(map.at(i, j)) << '\n';
        }
    }
    write_text(path, out.str());
}

void write_boundary_csv(const std::string& path, const BoundaryData& data) {
    std::ostringstream out;
    out << "x1,x2,value\n";
    std::size_t pos = 0;
    for (const auto& seg : data.mesh->segments) {
        for (std::size_t k = 0; k < seg.size(); ++k, ++pos) {
            out << fmt9(seg.points[k].x) << ',' << fmt9(seg.points[k].y) << ','
                << fmt9(data.values[pos]) << '\n';
        }
    }
    write_text(path, out.str());
}

BoundaryData read_boundary_csv(const std::string& path, MeshPtr mesh) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
    BoundaryData data = BoundaryData::zeros(std::move(mesh));
    std::size_t pos = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto c2 = line.rfind(',');
        if (c2 == std::string::npos || pos >= data.values.size()) {
            throw std::runtime_error(path + ": malformed row " + std::to_string(pos + 2));
        }
        data.values[pos++] = std::strtod(line.c_str() + c2 + 1, nullptr);
    }
    if (pos != data.values.size()) {
        throw MeshMismatch(path + ": row count " + std::to_string(pos) + " != mesh nodes " +
                           std::to_string(data.values.size()));
    }
    return data;
}

void write_pgm(const std::string& path, const IndexMap& map) {
    const Grid2D& g = map.grid;
    std::ostringstream out;
    out << "P5\n" << g.nx << ' ' << g.ny << "\n255\n";
    for (int j = g.ny - 1; j >= 0; --j) {
        for (int i = 0; i < g.nx; ++i) {
            const double v = std::clamp(map.at(i, j), 0.0, 1.0);
            out.put(static_cast<char>(static_cast<unsigned char>(std::lround(v * 255.0))));
        }
    }
    write_text(path, out.str());
}

PgmImage read_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::string magic;
    in >> magic;
    if (magic != "P5") throw std::runtime_error(path + ": not a P5 pgm");
    int w = 0, h = 0, maxval = 0;
    in >> w >> h >> maxval;
    in.get();  // single whitespace after the header
    PgmImage img;
    img.width = w;
    img.height = h;
    img.pixels.resize(static_cast<std::size_t>(w) * h);
    in.read(reinterpret_cast<char*>(img.pixels.data()), static_cast<std::streamsize>(img.pixels.size()));
    if (!in) throw std::runtime_error(path + ": truncated pixel data");
    return img;
}

std::uint64_t fnv1a64_file(const std::string& path) {
    const std::string bytes = read_text(path);
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

void RunManifest::add_output(const std::string& path) {
    outputs.emplace_back(path, fnv1a64_file(path));
}

void RunManifest::write(const std::string& path) const {
    json j;
    j["tool_version"] = tool_version.empty() ? kVersion : tool_version;
    j["command"] = command;
    j["config"] = config_json.empty() ? json(nullptr) : json::parse(config_json);
    j["seed"] = seed;
    j["rng"] = rng;
    j["timings_sec"] = timings_sec;
    j["extra"] = extra;
    json outs = json::array();
    for (const auto& [file, sum] : outputs) {
        char hex[20];
        std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(sum));
        outs.push_back({{"file", file}, {"fnv1a64", hex}});
    }
    j["outputs"] = outs;
    write_text(path, j.dump(2) + "\n");
}

RunManifest RunManifest::read(const std::string& path) {
    const json j = json::parse(read_text(path));
    RunManifest m;
    m.tool_version = j.value("tool_version", "");
    m.command = j.value("command", "");
    if (j.contains("config") && !j["config"].is_null()) m.config_json = j["config"].dump();
    m.seed = j.value("seed", 0ULL);
    m.rng = j.value("rng", "");
    if (j.contains("timings_sec")) m.timings_sec = j["timings_sec"].get<std::map<std::string, double>>();
    if (j.contains("extra")) m.extra = j["extra"].get<std::map<std::string, std::string>>();
    for (const auto& o : j.value("outputs", json::array())) {
        m.outputs.emplace_back(o.at("file").get<std::string>(),
                               std::stoull(o.at("fnv1a64").get<std::string>(), nullptr, 16));
    }
    return m;
}

bool RunManifest::verify_outputs(const std::string& dir) const {
    for (const auto& [file, sum] : outputs) {
        const std::string path = dir.empty() ? file : dir + "/" + file;
        if (fnv1a64_file(path) != sum) return false;
    }
    return true;
}

namespace {

void reject_unknown(const json& j, std::initializer_list<const char*> known, const char* where) {
    for (const auto& [key, _] : j.items()) {
        bool ok = false;
        for (const char* k : known) {
            if (key == k) {
                ok = true;
                break;
            }
        }
        if (!ok) throw std::invalid_argument(std::string("unknown key '") + key + "' in " + where);
    }
}

json domain_to_json(const DomainGeometry& d) {
    json j;
    if (d.kind == DomainGeometry::Kind::Rectangle) {
        j["kind"] = "rectangle";
        j["x0"] = d.x0;
        j["x1"] = d.x1;
        j["y0"] = d.y0;
        j["y1"] = d.y1;
        json sides = json::array();
        const char* names[] = {"bottom", "top", "left", "right"};
        for (Side s : {Side::Bottom, Side::Top, Side::Left, Side::Right}) {
            if (d.has_gamma(s)) sides.push_back(names[static_cast<int>(s)]);
        }
        j["gamma"] = sides;
    } else {
        j["kind"] = "disk";
        if (d.full_circle) {
            j["gamma"] = "full";
        } else {
            j["gamma"] = json::array({d.theta_lo, d.theta_hi});
        }
    }
    return j;
}

DomainGeometry domain_from_json(const json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "rectangle") {
        reject_unknown(j, {"kind", "x0", "x1", "y0", "y1", "gamma"}, "domain");
        std::vector<Side> sides;
        for (const auto& s : j.at("gamma")) {
            const std::string name = s.get<std::string>();
            if (name == "bottom") sides.push_back(Side::Bottom);
            else if (name == "top") sides.push_back(Side::Top);
            else if (name == "left") sides.push_back(Side::Left);
            else if (name == "right") sides.push_back(Side::Right);
            else throw std::invalid_argument("unknown gamma side '" + name + "'");
        }
        return DomainGeometry::rectangle(j.at("x0").get<double>(), j.at("x1").get<double>(),
                                         j.at("y0").get<double>(), j.at("y1").get<double>(), sides);
    }
    if (kind == "disk") {
        reject_unknown(j, {"kind", "gamma"}, "domain");
        if (j.at("gamma").is_string() && j.at("gamma").get<std::string>() == "full") {
            return DomainGeometry::unit_disk();
        }
        const auto arc = j.at("gamma");
        return DomainGeometry::unit_disk_arc(arc.at(0).get<double>(), arc.at(1).get<double>());
    }
    throw std::invalid_argument("unknown domain kind '" + kind + "'");
}

} // namespace

std::string config_to_json(const ExperimentConfig& cfg) {
    json j;
    j["domain"] = domain_to_json(cfg.domain);
    j["mu0"] = cfg.medium.mu0;
    json incs = json::array();
    for (const auto& inc : cfg.medium.inclusions) {
        json ji;
        ji["center"] = {inc.center.x, inc.center.y};
        ji["mu"] = inc.mu;
        if (inc.shape == Inclusion::Shape::Disk) {
            ji["shape"] = "disk";
            ji["radius"] = inc.radius;
        } else {
            ji["shape"] = "rect";
            ji["width"] = inc.width;
            ji["height"] = inc.height;
        }
        incs.push_back(ji);
    }
    j["inclusions"] = incs;
    j["fine_h"] = cfg.fine_h;
    j["recon_h"] = cfg.recon_h;
    j["noise_level"] = cfg.noise_level;
    j["rng_seed"] = cfg.rng_seed;
    j["noise_model"] = cfg.noise_model == NoiseModel::Scalar ? "scalar" : "pointwise";
    return j.dump(2);
}

ExperimentConfig config_from_json(const std::string& json_text) {
    const json j = json::parse(json_text);
    reject_unknown(j,
                   {"domain", "mu0", "inclusions", "fine_h", "recon_h", "noise_level", "rng_seed",
                    "noise_model"},
                   "config");
    ExperimentConfig cfg;
    cfg.domain = domain_from_json(j.at("domain"));
    cfg.medium.mu0 = j.value("mu0", 0.0);
    for (const auto& ji : j.value("inclusions", json::array())) {
        const std::string shape = ji.at("shape").get<std::string>();
        const Vec2 c{ji.at("center").at(0).get<double>(), ji.at("center").at(1).get<double>()};
        const double mu = ji.at("mu").get<double>();
        if (shape == "disk") {
            reject_unknown(ji, {"shape", "center", "radius", "mu"}, "inclusion");
            cfg.medium.inclusions.push_back(Inclusion::disk(c, ji.at("radius").get<double>(), mu));
        } else if (shape == "rect") {
            reject_unknown(ji, {"shape", "center", "width", "height", "mu"}, "inclusion");
            cfg.medium.inclusions.push_back(
                Inclusion::rect(c, ji.at("width").get<double>(), ji.at("height").get<double>(), mu));
        } else {
            throw std::invalid_argument("unknown inclusion shape '" + shape + "'");
        }
    }
    cfg.fine_h = j.value("fine_h", 0.004);
    cfg.recon_h = j.value("recon_h", 0.011);
    cfg.noise_level = j.value("noise_level", 0.05);
    cfg.rng_seed = j.value("rng_seed", 1ULL);
    const std::string nm = j.value("noise_model", "scalar");
    if (nm == "scalar") cfg.noise_model = NoiseModel::Scalar;
    else if (nm == "pointwise") cfg.noise_model = NoiseModel::Pointwise;
    else throw std::invalid_argument("unknown noise_model '" + nm + "'");
    return cfg;
}

ExperimentConfig config_from_file(const std::string& path) {
    return config_from_json(read_text(path));
}

} // namespace dsmdot
