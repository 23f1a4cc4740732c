#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pme/fem.hpp"
#include "pme/io.hpp"
#include "pme/mesh.hpp"
#include "pme/profile.hpp"

namespace pme {

struct ForwardConfig {
    double gamma = 0.0;
    int n = 0;
    double dt = 0.0;
    double T = 0.0;
    std::string u0_spec;
    std::vector<double> snapshot_times;

    // Step count implied by T and dt; T/dt must be an integer to 1e-9
    // relative slack (no partial final step).
    int step_count() const {
        const double ratio = T / dt;
        const double rounded = std::round(ratio);
        if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio)) {
            throw std::invalid_argument("ForwardConfig: T/dt is not an integer step count");
        }
        return static_cast<int>(rounded);
    }

    void validate() const {
        if (gamma <= 1.0) throw std::invalid_argument("ForwardConfig: gamma must exceed 1");
        if (n < 1) throw std::invalid_argument("ForwardConfig: n must be >= 1");
        if (dt <= 0.0) throw std::invalid_argument("ForwardConfig: dt must be positive");
        if (T <= 0.0) throw std::invalid_argument("ForwardConfig: T must be positive");
        (void)step_count();
    }
};

struct ForwardResult {
    Mesh mesh;
    std::vector<double> u_T;
    int step_count = 0;
    std::vector<double> max_history;   // entry 0 is the initial field
    std::vector<double> mass_history;  // lumped-L1 per step, entry 0 initial
    std::vector<std::pair<double, std::vector<double>>> snapshots;

    ScalarField field() const { return {&mesh, u_T}; }
};

class forward_error : public std::runtime_error {
public:
    forward_error(const std::string& what, int step, double time)
        : std::runtime_error(what), step(step), time(time) {}
    int step = 0;
    double time = 0.0;
};

// Nodal interpolation of a named initial-data formula, or a field file via
// "file:<path>". Always zero on boundary nodes and nonnegative.
inline ScalarField initial_field(const Mesh& mesh, const std::string& spec, double gamma) {
    std::vector<double> vals(mesh.node_count(), 0.0);
    auto fill = [&](auto&& fn) {
        for (int i = 0; i < mesh.node_count(); ++i) {
            if (mesh.boundary_mask[i]) continue;
            vals[i] = std::max(fn(mesh.nodes[i][0], mesh.nodes[i][1]), 0.0);
        }
    };

    if (spec.rfind("file:", 0) == 0) {
        FieldData data = read_field(spec.substr(5));
        if (data.mesh.n != mesh.n) {
            throw std::invalid_argument("initial_field: file mesh (n=" +
                                        std::to_string(data.mesh.n) + ") does not match n=" +
                                        std::to_string(mesh.n));
        }
        for (int i = 0; i < mesh.node_count(); ++i) {
            vals[i] = mesh.boundary_mask[i] ? 0.0 : std::max(data.values[i], 0.0);
        }
        return {&mesh, std::move(vals)};
    }

    const auto open = spec.find('(');
    const auto close = spec.rfind(')');
    if (open == std::string::npos || close == std::string::npos || close < open) {
        throw std::invalid_argument("initial_field: malformed spec: " + spec);
    }
    const std::string name = spec.substr(0, open);
    std::vector<double> args;
    {
        std::string inner = spec.substr(open + 1, close - open - 1);
        std::size_t pos = 0;
        while (pos < inner.size()) {
            auto comma = inner.find(',', pos);
            if (comma == std::string::npos) comma = inner.size();
            const std::string tok = inner.substr(pos, comma - pos);
            if (!tok.empty()) args.push_back(std::stod(tok));
            pos = comma + 1;
        }
    }

    if (name == "poly_bump") {
        if (args.size() != 1) throw std::invalid_argument("initial_field: poly_bump expects (c)");
        const double c = args[0];
        if (c < 0.0) throw std::invalid_argument("initial_field: poly_bump amplitude must be >= 0");
        fill([c](double x, double y) { return c * x * y * (1.0 - x) * (1.0 - y); });
        return {&mesh, std::move(vals)};
    }
    if (name == "scaled_profile") {
        if (args.empty() || args.size() > 2) {
            throw std::invalid_argument("initial_field: scaled_profile expects (tau[, gamma])");
        }
        const double tau = args[0];
        const double g = args.size() == 2 ? args[1] : gamma;
        ProfileResult prof = solve_profile(mesh, g);
        return separation_solution(prof, tau, 0.0);
    }
    throw std::invalid_argument("initial_field: unknown formula: " + name);
}

// One semi-implicit Euler step: solve
//   (M/dt + K diag(u_n^{gamma-1})) u_{n+1} = (M/dt) u_n
// on interior nodes with zero Dirichlet values, then clamp tiny negative
// undershoots to zero. The system is nonsymmetric.
inline ScalarField advance_step(const ScalarField& u_n, double dt, double gamma,
                                const SparseMatrix& K, const LumpedMass& M) {
    const Mesh& mesh = *u_n.mesh;
    const int nn = mesh.node_count();
    std::vector<double> d(nn);
    for (int i = 0; i < nn; ++i) {
        d[i] = std::pow(u_n.values[i], gamma - 1.0);
    }
    SparseMatrix A = K;
    for (std::size_t k = 0; k < A.values.size(); ++k) {
        A.values[k] *= d[A.col_indices[k]];
    }
    std::vector<double> rhs(nn);
    for (int i = 0; i < nn; ++i) {
        const double mdt = M.weights[i] / dt;
        rhs[i] = mdt * u_n.values[i];
        for (int k = A.row_offsets[i]; k < A.row_offsets[i + 1]; ++k) {
            if (A.col_indices[k] == i) {
                A.values[k] += mdt;
                break;
            }
        }
    }
    DirichletSolver solver(A, mesh.boundary_mask);
    std::vector<double> next = solver.solve(rhs);
    for (double& v : next) {
        if (std::isnan(v)) throw solver_error("advance_step: NaN in solution", 0.0);
        if (v < 0.0) v = 0.0;
    }
    return {&mesh, std::move(next)};
}

inline ForwardResult solve_forward(const ForwardConfig& config) {
    config.validate();
    const int steps = config.step_count();

    ForwardResult res;
    res.mesh = build_unit_square_mesh(config.n);
    const SparseMatrix K = assemble_stiffness(res.mesh);
    const LumpedMass M = assemble_lumped_mass(res.mesh);

    ScalarField u = initial_field(res.mesh, config.u0_spec, config.gamma);

    std::vector<int> snap_steps;
    for (double ts : config.snapshot_times) {
        int k = static_cast<int>(std::round(ts / config.dt));
        if (k < 0) k = 0;
        if (k > steps) k = steps;
        snap_steps.push_back(k);
    }

    auto record = [&](int step) {
        double mx = 0.0, mass = 0.0;
        for (int i = 0; i < res.mesh.node_count(); ++i) {
            mx = std::max(mx, u.values[i]);
            mass += M.weights[i] * u.values[i];
        }
        res.max_history.push_back(mx);
        res.mass_history.push_back(mass);
        for (std::size_t s = 0; s < snap_steps.size(); ++s) {
            if (snap_steps[s] == step) {
                res.snapshots.emplace_back(step * config.dt, u.values);
            }
        }
    };

    record(0);
    for (int k = 1; k <= steps; ++k) {
        try {
            u = advance_step(u, config.dt, config.gamma, K, M);
        } catch (const solver_error& e) {
            throw forward_error("solve_forward: step " + std::to_string(k) + " at t=" +
                                    std::to_string(k * config.dt) + " failed: " + e.what(),
                                k, k * config.dt);
        }
        record(k);
    }

    res.step_count = steps;
    res.u_T = u.values;
    return res;
}

}  // namespace pme
