#include "spinfield/io.hpp"

#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace spinfield {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

Config parse_config(const std::string& text) {
    Config cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": missing '=' in \"" +
                              line + "\"");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
        if (cfg.count(key))
            throw ConfigError("config line " + std::to_string(lineno) + ": duplicate key \"" +
                              key + "\"");
        cfg[key] = value;
    }
    return cfg;
}

Config load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string canonical_text(const Config& cfg) {
    std::string out;
    for (const auto& [k, v] : cfg) out += k + " = " + v + "\n";
    return out;
}

std::string config_get(const Config& cfg, const std::string& key, const std::string& fallback) {
    const auto it = cfg.find(key);
    return it == cfg.end() ? fallback : it->second;
}

double config_get_double(const Config& cfg, const std::string& key, double fallback) {
    const auto it = cfg.find(key);
    if (it == cfg.end()) return fallback;
    try {
        std::size_t pos = 0;
        const double v = std::stod(it->second, &pos);
        if (pos != it->second.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config key \"" + key + "\": not a number: \"" + it->second + "\"");
    }
}

int config_get_int(const Config& cfg, const std::string& key, int fallback) {
    const auto it = cfg.find(key);
    if (it == cfg.end()) return fallback;
    try {
        std::size_t pos = 0;
        const int v = std::stoi(it->second, &pos);
        if (pos != it->second.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config key \"" + key + "\": not an integer: \"" + it->second + "\"");
    }
}

std::string config_require(const Config& cfg, const std::string& key) {
    const auto it = cfg.find(key);
    if (it == cfg.end()) throw ConfigError("missing required config key \"" + key + "\"");
    return it->second;
}

ArrayRecord record_from_scalar(const std::string& name, const ScalarField& f) {
    ArrayRecord rec{name, "c128", {}};
    rec.data.reserve(2 * f.v.size());
    for (const Complex& c : f.v) {
        rec.data.push_back(c.real());
        rec.data.push_back(c.imag());
    }
    return rec;
}

ArrayRecord record_from_spin(const std::string& name, const SpinField& f) {
    ArrayRecord rec{name, "f64", {}};
    rec.data.reserve(3 * f.s.size());
    for (const MetricVector& p : f.s)
        for (int c = 0; c < 3; ++c) rec.data.push_back(p[c]);
    return rec;
}

ScalarField scalar_from_record(const Grid& g, const ArrayRecord& rec) {
    if (rec.dtype != "c128" || rec.data.size() != 2 * g.size())
        throw IoError("scalar_from_record: dtype/size mismatch for \"" + rec.name + "\"");
    ScalarField f(g);
    for (std::size_t i = 0; i < f.v.size(); ++i)
        f.v[i] = Complex{rec.data[2 * i], rec.data[2 * i + 1]};
    return f;
}

void write_snapshot(const std::string& path, const Snapshot& snap) {
    nlohmann::json header;
    header["grid"] = {{"n1", snap.grid.n1},
                      {"n2", snap.grid.n2},
                      {"L1", snap.grid.L1},
                      {"L2", snap.grid.L2}};
    header["signature"] = {{"mu", snap.sig.mu}, {"epsilon", snap.sig.epsilon}};
    header["time"] = snap.time;
    nlohmann::json fields = nlohmann::json::array();
    for (const ArrayRecord& rec : snap.arrays)
        fields.push_back({{"name", rec.name}, {"dtype", rec.dtype}, {"count", rec.data.size()}});
    header["fields"] = fields;

    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open snapshot for writing: " + path);
    out << header.dump() << "\n";
    for (const ArrayRecord& rec : snap.arrays)
        out.write(reinterpret_cast<const char*>(rec.data.data()),
                  static_cast<std::streamsize>(rec.data.size() * sizeof(double)));
    if (!out) throw IoError("write failure: " + path);
}

Snapshot read_snapshot(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open snapshot: " + path);
    std::string line;
    if (!std::getline(in, line)) throw IoError("missing snapshot header: " + path);
    nlohmann::json header;
    try {
        header = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        throw IoError("bad snapshot header in " + path + ": " + e.what());
    }
    Snapshot snap;
    snap.grid.n1 = header.at("grid").at("n1").get<int>();
    snap.grid.n2 = header.at("grid").at("n2").get<int>();
    snap.grid.L1 = header.at("grid").at("L1").get<double>();
    snap.grid.L2 = header.at("grid").at("L2").get<double>();
    snap.sig.mu = header.at("signature").at("mu").get<int>();
    snap.sig.epsilon = header.at("signature").at("epsilon").get<int>();
    snap.time = header.at("time").get<double>();
    for (const auto& f : header.at("fields")) {
        ArrayRecord rec;
        rec.name = f.at("name").get<std::string>();
        rec.dtype = f.at("dtype").get<std::string>();
        rec.data.resize(f.at("count").get<std::size_t>());
        in.read(reinterpret_cast<char*>(rec.data.data()),
                static_cast<std::streamsize>(rec.data.size() * sizeof(double)));
        if (!in) throw IoError("truncated snapshot array \"" + rec.name + "\" in " + path);
        snap.arrays.push_back(std::move(rec));
    }
    return snap;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open CSV for writing: " + path);
    for (std::size_t i = 0; i < header.size(); ++i)
        out << (i ? "," : "") << header[i];
    out << "\n";
    char buf[40];
    for (const auto& row : rows) {
        if (row.size() != header.size())
            throw IoError("CSV row width mismatch in " + path);
        for (std::size_t i = 0; i < row.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.17g", row[i]);
            out << (i ? "," : "") << buf;
        }
        out << "\n";
    }
    if (!out) throw IoError("write failure: " + path);
}

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::uint64_t file_checksum(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open file for checksum: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return fnv1a64(buf.str());
}

void write_manifest(const std::string& dir, const Config& cfg,
                    const std::vector<std::string>& artifacts) {
    nlohmann::json manifest;
    char hex[32];
    std::snprintf(hex, sizeof hex, "%016llx",
                  static_cast<unsigned long long>(fnv1a64(canonical_text(cfg))));
    manifest["config_hash"] = hex;
    manifest["format_version"] = 1;
    nlohmann::json files = nlohmann::json::object();
    for (const std::string& name : artifacts) {
        std::snprintf(hex, sizeof hex, "%016llx",
                      static_cast<unsigned long long>(file_checksum(dir + "/" + name)));
        files[name] = hex;
    }
    manifest["files"] = files;
    std::ofstream out(dir + "/manifest.json", std::ios::binary);
    if (!out) throw IoError("cannot open manifest for writing in " + dir);
    out << manifest.dump(2) << "\n";
    if (!out) throw IoError("write failure: manifest in " + dir);
}

}  // namespace spinfield
