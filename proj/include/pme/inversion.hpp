#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pme/fem.hpp"
#include "pme/mesh.hpp"

namespace pme {

struct InversionConfig {
    double alpha_min = 1.001;
    double gamma_c = 20.0;
    double grid_step = 0.05;
    double refine_tol = 1e-4;
    Norm norm = Norm::L1;
    bool clamp_negative_measurements = true;

    void validate() const {
        if (!(alpha_min > 1.0) || !(gamma_c > alpha_min)) {
            throw std::invalid_argument("InversionConfig: need 1 < alpha_min < gamma_c");
        }
        if (grid_step <= 0.0) throw std::invalid_argument("InversionConfig: grid_step must be positive");
        if (refine_tol <= 0.0) throw std::invalid_argument("InversionConfig: refine_tol must be positive");
    }
};

struct InversionReport {
    double gamma_m = 0.0;
    double objective_at_min = 0.0;
    std::vector<std::pair<double, double>> curve;   // coarse scan samples
    std::vector<std::pair<double, double>> probes;  // golden-section evaluations
    std::vector<double> w;                          // (-Laplace)^{-1} u_T
    Norm norm_used = Norm::L1;
    double T = 0.0;
};

class gamma_range_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// F(alpha) = (alpha-1)(1+T) u_T^alpha - w, powers taken nodally.
inline ScalarField objective_field(double alpha, const ScalarField& u_T, const ScalarField& w,
                                   double T) {
    if (!(alpha > 1.0)) throw std::invalid_argument("objective_field: alpha must exceed 1");
    if (u_T.values.size() != w.values.size()) {
        throw std::invalid_argument("objective_field: field size mismatch");
    }
    const double scale = (alpha - 1.0) * (1.0 + T);
    ScalarField out{u_T.mesh, std::vector<double>(u_T.values.size())};
    for (std::size_t i = 0; i < u_T.values.size(); ++i) {
        const double u = u_T.values[i];
        if (u < 0.0) {
            throw std::domain_error("objective_field: negative measurement value at node " +
                                    std::to_string(i));
        }
        out.values[i] = scale * std::pow(u, alpha) - w.values[i];
    }
    return out;
}

inline double objective_norm(double alpha, const ScalarField& u_T, const ScalarField& w, double T,
                             const LumpedMass& mass, Norm norm) {
    return field_norm(objective_field(alpha, u_T, w, T), mass, norm);
}

inline std::vector<std::pair<double, double>> sample_curve(const ScalarField& u_T,
                                                           const ScalarField& w, double T,
                                                           const std::vector<double>& alphas,
                                                           const LumpedMass& mass, Norm norm) {
    std::vector<std::pair<double, double>> out;
    out.reserve(alphas.size());
    for (double a : alphas) {
        out.emplace_back(a, objective_norm(a, u_T, w, T, mass, norm));
    }
    return out;
}

// Algorithm: compute w once, coarse-scan the objective norm over
// [alpha_min, gamma_c], then golden-section refine inside the bracketing
// triple of the coarse minimum until the bracket width drops below
// refine_tol. Deterministic for fixed inputs.
inline InversionReport recover_gamma(const ScalarField& u_T, double T,
                                     const InversionConfig& config) {
    config.validate();
    if (!(T > 0.0)) throw std::invalid_argument("recover_gamma: T must be positive");
    const Mesh& mesh = *u_T.mesh;

    ScalarField measurement = u_T;
    for (double& v : measurement.values) {
        if (v < 0.0) {
            if (!config.clamp_negative_measurements) {
                throw std::domain_error("recover_gamma: negative measurement value");
            }
            v = 0.0;
        }
    }

    PoissonSolver poisson(mesh);
    InversionReport rep;
    rep.T = T;
    rep.norm_used = config.norm;
    rep.w = poisson.solve(measurement.values);
    const ScalarField w{&mesh, rep.w};
    const LumpedMass& mass = poisson.mass();

    auto eval = [&](double a) { return objective_norm(a, measurement, w, T, mass, config.norm); };

    std::vector<double> grid;
    for (double a = config.alpha_min; a < config.gamma_c - 1e-12; a += config.grid_step) {
        grid.push_back(a);
    }
    grid.push_back(config.gamma_c);

    rep.curve = sample_curve(measurement, w, T, grid, mass, config.norm);

    // Coarse argmin; ties within 1e-14 resolve to the smallest alpha.
    std::size_t imin = 0;
    for (std::size_t i = 1; i < rep.curve.size(); ++i) {
        const double tie = 1e-14 * std::max(1.0, std::abs(rep.curve[imin].second));
        if (rep.curve[i].second < rep.curve[imin].second - tie) imin = i;
    }
    if (imin == rep.curve.size() - 1) {
        throw gamma_range_error("recover_gamma: objective minimum at the gamma_c endpoint; "
                                "gamma_c too small");
    }

    double a = rep.curve[imin > 0 ? imin - 1 : 0].first;
    double b = rep.curve[imin + 1].first;

    constexpr double invphi = 0.6180339887498949;
    double c = b - invphi * (b - a);
    double d = a + invphi * (b - a);
    double fc = eval(c);
    double fd = eval(d);
    rep.probes.emplace_back(c, fc);
    rep.probes.emplace_back(d, fd);
    while (b - a > config.refine_tol) {
        if (fc <= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = eval(c);
            rep.probes.emplace_back(c, fc);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = eval(d);
            rep.probes.emplace_back(d, fd);
        }
    }
    const double mid = 0.5 * (a + b);
    rep.probes.emplace_back(mid, eval(mid));

    // Final answer: best evaluated point over scan and probes, smallest
    // alpha on ties.
    std::vector<std::pair<double, double>> candidates = rep.curve;
    candidates.insert(candidates.end(), rep.probes.begin(), rep.probes.end());
    std::sort(candidates.begin(), candidates.end());
    rep.gamma_m = candidates.front().first;
    rep.objective_at_min = candidates.front().second;
    for (const auto& [alpha, value] : candidates) {
        if (value < rep.objective_at_min) {
            rep.gamma_m = alpha;
            rep.objective_at_min = value;
        }
    }
    return rep;
}

}  // namespace pme
