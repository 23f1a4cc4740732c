#pragma once

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "pme/mesh.hpp"
#include "pme/sparse.hpp"

namespace pme {

// Nodal values of a P1 function over a mesh.
struct ScalarField {
    const Mesh* mesh = nullptr;
    std::vector<double> values;
};

// Diagonal (vertex-quadrature) mass: weight_i = 1/3 of the area of the
// triangles touching node i. Weights sum to the domain area.
struct LumpedMass {
    std::vector<double> weights;
};

enum class Norm { L1, L2, Linf };

inline std::string norm_name(Norm n) {
    switch (n) {
        case Norm::L1: return "l1";
        case Norm::L2: return "l2";
        default: return "linf";
    }
}

inline Norm parse_norm(const std::string& s) {
    if (s == "l1" || s == "L1") return Norm::L1;
    if (s == "l2" || s == "L2") return Norm::L2;
    if (s == "linf" || s == "Linf" || s == "LINF") return Norm::Linf;
    throw std::invalid_argument("unknown norm: " + s);
}

class solver_error : public std::runtime_error {
public:
    solver_error(const std::string& what, double achieved_residual)
        : std::runtime_error(what), residual(achieved_residual) {}
    double residual = 0.0;
};

// P1 stiffness matrix K_ij = int grad(phi_i).grad(phi_j) over the whole
// square (no boundary conditions applied).
inline SparseMatrix assemble_stiffness(const Mesh& mesh) {
    std::vector<Triplet> ts;
    ts.reserve(9 * mesh.triangles.size());
    for (const auto& tri : mesh.triangles) {
        const auto& p0 = mesh.nodes[tri[0]];
        const auto& p1 = mesh.nodes[tri[1]];
        const auto& p2 = mesh.nodes[tri[2]];
        const double b[3] = {p1[1] - p2[1], p2[1] - p0[1], p0[1] - p1[1]};
        const double c[3] = {p2[0] - p1[0], p0[0] - p2[0], p1[0] - p0[0]};
        const double area =
            0.5 * ((p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]));
        for (int a = 0; a < 3; ++a) {
            for (int d = 0; d < 3; ++d) {
                ts.push_back({tri[a], tri[d], (b[a] * b[d] + c[a] * c[d]) / (4.0 * area)});
            }
        }
    }
    return sparse_from_triplets(mesh.node_count(), mesh.node_count(), std::move(ts));
}

inline LumpedMass assemble_lumped_mass(const Mesh& mesh) {
    LumpedMass m;
    m.weights.assign(mesh.node_count(), 0.0);
    for (int t = 0; t < mesh.triangle_count(); ++t) {
        const double third = triangle_signed_area(mesh, t) / 3.0;
        for (int v : mesh.triangles[t]) m.weights[v] += third;
    }
    return m;
}

// Dirichlet solve via elimination: the system is reduced to the interior
// block, factorized once, and can then be applied to many right-hand sides.
// Residual contract: ||A_int x - b~||_2 <= max(1e-10 ||b~||_2, 1e-14).
class DirichletSolver {
public:
    static constexpr double kRelTol = 1e-10;
    static constexpr double kAbsTol = 1e-14;

    DirichletSolver(const SparseMatrix& A, const std::vector<bool>& on_boundary)
        : A_(A), mask_(on_boundary) {
        if (A.rows != A.cols || static_cast<int>(mask_.size()) != A.rows) {
            throw std::invalid_argument("DirichletSolver: shape mismatch");
        }
        local_.assign(A.rows, -1);
        for (int i = 0; i < A.rows; ++i) {
            if (!mask_[i]) {
                local_[i] = static_cast<int>(interior_.size());
                interior_.push_back(i);
            }
        }
        const int ni = static_cast<int>(interior_.size());
        std::vector<Eigen::Triplet<double>> ts;
        for (int i : interior_) {
            for (int k = A.row_offsets[i]; k < A.row_offsets[i + 1]; ++k) {
                const int j = A.col_indices[k];
                if (!mask_[j]) {
                    ts.emplace_back(local_[i], local_[j], A.values[k]);
                }
            }
        }
        Ai_.resize(ni, ni);
        Ai_.setFromTriplets(ts.begin(), ts.end());
        if (ni > 0) {
            lu_.compute(Ai_);
            if (lu_.info() != Eigen::Success) {
                throw solver_error("DirichletSolver: interior block factorization failed",
                                   std::numeric_limits<double>::infinity());
            }
        }
    }

    // x = boundary_values on boundary nodes (zero when null); interior block
    // equation satisfied to the residual contract.
    std::vector<double> solve(const std::vector<double>& b,
                              const std::vector<double>* boundary_values = nullptr) const {
        if (static_cast<int>(b.size()) != A_.rows) {
            throw std::invalid_argument("DirichletSolver::solve: rhs size mismatch");
        }
        const int ni = static_cast<int>(interior_.size());
        Eigen::VectorXd bt(ni);
        for (int r = 0; r < ni; ++r) {
            const int i = interior_[r];
            double s = b[i];
            if (boundary_values != nullptr) {
                for (int k = A_.row_offsets[i]; k < A_.row_offsets[i + 1]; ++k) {
                    const int j = A_.col_indices[k];
                    if (mask_[j]) s -= A_.values[k] * (*boundary_values)[j];
                }
            }
            bt[r] = s;
        }
        std::vector<double> x(A_.rows, 0.0);
        if (boundary_values != nullptr) {
            for (int i = 0; i < A_.rows; ++i) {
                if (mask_[i]) x[i] = (*boundary_values)[i];
            }
        }
        if (ni == 0) return x;
        Eigen::VectorXd xi = lu_.solve(bt);
        const double resid = (Ai_ * xi - bt).norm();
        const double tol = std::max(kRelTol * bt.norm(), kAbsTol);
        if (lu_.info() != Eigen::Success || !xi.allFinite() || resid > tol) {
            throw solver_error("DirichletSolver: solve did not meet tolerance (residual " +
                                   std::to_string(resid) + ")",
                               resid);
        }
        for (int r = 0; r < ni; ++r) x[interior_[r]] = xi[r];
        return x;
    }

private:
    SparseMatrix A_;
    std::vector<bool> mask_;
    std::vector<int> interior_;
    std::vector<int> local_;
    Eigen::SparseMatrix<double> Ai_;
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu_;
};

inline std::vector<double> solve_dirichlet_system(const SparseMatrix& A,
                                                  const std::vector<double>& b,
                                                  const std::vector<int>& boundary,
                                                  const std::vector<double>& boundary_values) {
    std::vector<bool> mask(A.rows, false);
    for (int i : boundary) mask[i] = true;
    return DirichletSolver(A, mask).solve(b, &boundary_values);
}

// Discrete (-Laplace)^{-1} with homogeneous Dirichlet data:
// K w = M source on interior nodes, w = 0 on the boundary.
class PoissonSolver {
public:
    explicit PoissonSolver(const Mesh& mesh)
        : mesh_(&mesh),
          stiffness_(assemble_stiffness(mesh)),
          mass_(assemble_lumped_mass(mesh)),
          solver_(stiffness_, mesh.boundary_mask) {}

    const SparseMatrix& stiffness() const { return stiffness_; }
    const LumpedMass& mass() const { return mass_; }
    const Mesh& mesh() const { return *mesh_; }

    std::vector<double> solve(const std::vector<double>& source) const {
        if (source.size() != mass_.weights.size()) {
            throw std::invalid_argument("PoissonSolver::solve: source size mismatch");
        }
        std::vector<double> rhs(source.size());
        for (std::size_t i = 0; i < source.size(); ++i) {
            rhs[i] = mass_.weights[i] * source[i];
        }
        return solver_.solve(rhs);
    }

private:
    const Mesh* mesh_;
    SparseMatrix stiffness_;
    LumpedMass mass_;
    DirichletSolver solver_;
};

inline ScalarField solve_poisson(const Mesh& mesh, const ScalarField& source) {
    PoissonSolver ps(mesh);
    return {&mesh, ps.solve(source.values)};
}

// Vertex-quadrature norms of the P1 interpolant.
inline double field_norm(const ScalarField& field, const LumpedMass& mass, Norm which) {
    if (field.values.size() != mass.weights.size()) {
        throw std::invalid_argument("field_norm: size mismatch");
    }
    double acc = 0.0;
    switch (which) {
        case Norm::L1:
            for (std::size_t i = 0; i < field.values.size(); ++i) {
                acc += mass.weights[i] * std::abs(field.values[i]);
            }
            return acc;
        case Norm::L2:
            for (std::size_t i = 0; i < field.values.size(); ++i) {
                acc += mass.weights[i] * field.values[i] * field.values[i];
            }
            return std::sqrt(acc);
        default:
            for (double v : field.values) acc = std::max(acc, std::abs(v));
            return acc;
    }
}

}  // namespace pme
