#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "pme/fem.hpp"
#include "pme/mesh.hpp"

namespace pme {

class profile_error : public std::runtime_error {
public:
    profile_error(const std::string& what, double last_change)
        : std::runtime_error(what), last_change(last_change) {}
    double last_change = 0.0;
};

// Positive solution of -Laplace(f^gamma) = f/(gamma-1) with f = 0 on the
// boundary: the spatial profile of the separation-of-variables solutions.
struct ProfileResult {
    const Mesh* mesh = nullptr;
    std::vector<double> f;
    double gamma = 0.0;
    int iterations = 0;
    double residual = 0.0;  // lumped-L2 of the interior defect K v - M f/(gamma-1)

    ScalarField field() const { return {mesh, f}; }
};

// Fixed-point iteration on v = f^gamma:
//   v_{k+1} = (-Laplace)^{-1}(v_k^{1/gamma} / (gamma-1)),  v_0 = (-Laplace)^{-1} 1,
// stopped when the relative Linf change drops below tol. The sublinear power
// fixes the amplitude; no normalization step.
inline ProfileResult solve_profile(const Mesh& mesh, double gamma, double tol = 1e-10,
                                   int max_iter = 10000) {
    if (gamma <= 1.0) throw std::invalid_argument("solve_profile: gamma must exceed 1");
    if (tol <= 0.0) throw std::invalid_argument("solve_profile: tol must be positive");

    PoissonSolver poisson(mesh);
    const int nn = mesh.node_count();
    std::vector<double> v = poisson.solve(std::vector<double>(nn, 1.0));

    auto root = [&](const std::vector<double>& w) {
        std::vector<double> f(w.size());
        for (std::size_t i = 0; i < w.size(); ++i) {
            f[i] = std::pow(std::max(w[i], 0.0), 1.0 / gamma);
        }
        return f;
    };

    double change = 0.0;
    int it = 0;
    bool converged = false;
    for (it = 1; it <= max_iter; ++it) {
        std::vector<double> f = root(v);
        for (double& x : f) x /= (gamma - 1.0);
        std::vector<double> vn = poisson.solve(f);
        double diff = 0.0, scale = 0.0;
        for (int i = 0; i < nn; ++i) {
            diff = std::max(diff, std::abs(vn[i] - v[i]));
            scale = std::max(scale, std::abs(vn[i]));
        }
        change = scale > 0.0 ? diff / scale : diff;
        v = std::move(vn);
        if (change <= tol) {
            converged = true;
            break;
        }
    }
    if (!converged) {
        throw profile_error("solve_profile: no convergence after " + std::to_string(max_iter) +
                                " iterations (last relative change " + std::to_string(change) + ")",
                            change);
    }

    ProfileResult out;
    out.mesh = &mesh;
    out.gamma = gamma;
    out.iterations = it;
    out.f = root(v);

    const std::vector<double> kv = poisson.stiffness().apply(v);
    const auto& w = poisson.mass().weights;
    double acc = 0.0;
    for (int i = 0; i < nn; ++i) {
        if (mesh.boundary_mask[i]) continue;
        const double d = kv[i] - w[i] * out.f[i] / (gamma - 1.0);
        acc += w[i] * d * d;
    }
    out.residual = std::sqrt(acc);
    return out;
}

// U_tau(x, t) = (tau + t)^{-1/(gamma-1)} f(x).
inline ScalarField separation_solution(const ProfileResult& profile, double tau, double t) {
    if (tau <= 0.0) throw std::invalid_argument("separation_solution: tau must be positive");
    if (t < 0.0) throw std::invalid_argument("separation_solution: t must be nonnegative");
    const double factor = std::pow(tau + t, -1.0 / (profile.gamma - 1.0));
    ScalarField out{profile.mesh, profile.f};
    for (double& v : out.values) v *= factor;
    return out;
}

}  // namespace pme
