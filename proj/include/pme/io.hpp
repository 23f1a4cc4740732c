#pragma once

#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pme/fem.hpp"
#include "pme/mesh.hpp"

namespace pme {

// Full-precision decimal text; round-trips doubles exactly.
inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

class io_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Plain-text nodal field file:
//   format: pme-field-1
//   name: <field name>
//   n: <mesh subdivisions>
//   nodes: <node count>
//   gamma: <optional>
//   T: <optional>
//   records:
//   <index> <x> <y> <value>   (one line per node)
struct FieldData {
    Mesh mesh;
    std::vector<double> values;
    std::string name;
    std::optional<double> gamma;
    std::optional<double> T;

    ScalarField field() const { return {&mesh, values}; }
};

inline void write_field(const std::string& path, const Mesh& mesh,
                        const std::vector<double>& values, const std::string& name,
                        std::optional<double> gamma = std::nullopt,
                        std::optional<double> T = std::nullopt) {
    if (static_cast<int>(values.size()) != mesh.node_count()) {
        throw io_error("write_field: value count does not match mesh");
    }
    std::ofstream f(path);
    if (!f) throw io_error("write_field: cannot open " + path);
    f << "format: pme-field-1\n";
    f << "name: " << name << "\n";
    f << "n: " << mesh.n << "\n";
    f << "nodes: " << mesh.node_count() << "\n";
    if (gamma) f << "gamma: " << format_double(*gamma) << "\n";
    if (T) f << "T: " << format_double(*T) << "\n";
    f << "records:\n";
    for (int i = 0; i < mesh.node_count(); ++i) {
        f << i << " " << format_double(mesh.nodes[i][0]) << " " << format_double(mesh.nodes[i][1])
          << " " << format_double(values[i]) << "\n";
    }
    if (!f) throw io_error("write_field: write failed for " + path);
}

inline FieldData read_field(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw io_error("read_field: cannot open " + path);
    std::string line;
    std::string name;
    int n = -1;
    int nodes = -1;
    std::optional<double> gamma;
    std::optional<double> T;
    bool in_header = true;
    while (in_header && std::getline(f, line)) {
        if (line == "records:") {
            in_header = false;
            break;
        }
        const auto pos = line.find(": ");
        if (pos == std::string::npos) throw io_error("read_field: malformed header line: " + line);
        const std::string key = line.substr(0, pos);
        const std::string val = line.substr(pos + 2);
        if (key == "format") {
            if (val != "pme-field-1") throw io_error("read_field: unknown format " + val);
        } else if (key == "name") {
            name = val;
        } else if (key == "n") {
            n = std::stoi(val);
        } else if (key == "nodes") {
            nodes = std::stoi(val);
        } else if (key == "gamma") {
            gamma = std::stod(val);
        } else if (key == "T") {
            T = std::stod(val);
        } else {
            throw io_error("read_field: unknown header key " + key);
        }
    }
    if (in_header) throw io_error("read_field: missing records section in " + path);
    if (n < 1 || nodes != (n + 1) * (n + 1)) {
        throw io_error("read_field: inconsistent mesh header in " + path);
    }
    FieldData out;
    out.mesh = build_unit_square_mesh(n);
    out.name = name;
    out.gamma = gamma;
    out.T = T;
    out.values.assign(nodes, 0.0);
    for (int i = 0; i < nodes; ++i) {
        if (!std::getline(f, line)) throw io_error("read_field: truncated records in " + path);
        std::istringstream ss(line);
        int idx;
        double x, y, v;
        if (!(ss >> idx >> x >> y >> v) || idx != i) {
            throw io_error("read_field: malformed record " + std::to_string(i) + " in " + path);
        }
        out.values[i] = v;
    }
    return out;
}

// Two-column comma-separated (alpha, value) rows; no header.
inline void write_curve(const std::string& path,
                        const std::vector<std::pair<double, double>>& curve) {
    std::ofstream f(path);
    if (!f) throw io_error("write_curve: cannot open " + path);
    for (const auto& [a, v] : curve) {
        f << format_double(a) << "," << format_double(v) << "\n";
    }
}

// Ordered key: value document used for run manifests and inversion reports.
struct Manifest {
    std::vector<std::pair<std::string, std::string>> entries;

    void set(const std::string& key, const std::string& value) { entries.emplace_back(key, value); }
    void set(const std::string& key, double value) { entries.emplace_back(key, format_double(value)); }
    void set(const std::string& key, int value) { entries.emplace_back(key, std::to_string(value)); }

    bool has(const std::string& key) const {
        for (const auto& [k, v] : entries) {
            if (k == key) return true;
        }
        return false;
    }

    std::string get(const std::string& key) const {
        for (const auto& [k, v] : entries) {
            if (k == key) return v;
        }
        throw io_error("Manifest: missing key " + key);
    }

    void write(const std::string& path) const {
        std::ofstream f(path);
        if (!f) throw io_error("Manifest: cannot open " + path);
        for (const auto& [k, v] : entries) f << k << ": " << v << "\n";
    }

    static Manifest read(const std::string& path) {
        std::ifstream f(path);
        if (!f) throw io_error("Manifest: cannot open " + path);
        Manifest m;
        std::string line;
        while (std::getline(f, line)) {
            if (line.empty()) continue;
            const auto pos = line.find(": ");
            if (pos == std::string::npos) throw io_error("Manifest: malformed line: " + line);
            m.set(line.substr(0, pos), line.substr(pos + 2));
        }
        return m;
    }
};

// Debug dump of nodes and elements.
inline void write_mesh_listing(const std::string& path, const Mesh& mesh) {
    std::ofstream f(path);
    if (!f) throw io_error("write_mesh_listing: cannot open " + path);
    f << "n: " << mesh.n << "\n";
    f << "nodes: " << mesh.node_count() << "\n";
    for (int i = 0; i < mesh.node_count(); ++i) {
        f << i << " " << format_double(mesh.nodes[i][0]) << " " << format_double(mesh.nodes[i][1])
          << " " << (mesh.boundary_mask[i] ? 1 : 0) << "\n";
    }
    f << "triangles: " << mesh.triangle_count() << "\n";
    for (int t = 0; t < mesh.triangle_count(); ++t) {
        const auto& tri = mesh.triangles[t];
        f << t << " " << tri[0] << " " << tri[1] << " " << tri[2] << "\n";
    }
}

}  // namespace pme
