#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cmath>
#include <random>
#include <vector>

#include "pme/fem.hpp"
#include "pme/mesh.hpp"

using namespace pme;

namespace {

int center_index(const Mesh& m) {
    const int np = m.n + 1;
    return (m.n / 2) * np + m.n / 2;
}

// Independent oracle for -Laplace(w) = 1 on the unit square, w = 0 on the
// boundary: double Fourier sine series, summed over odd modes.
double poisson_constant_source_center() {
    const double pi4 = std::pow(std::acos(-1.0), 4);
    double s = 0.0;
    for (int m = 1; m < 2001; m += 2) {
        for (int n = 1; n < 2001; n += 2) {
            const double sgn = (((m - 1) / 2) % 2 ? -1.0 : 1.0) * (((n - 1) / 2) % 2 ? -1.0 : 1.0);
            s += 16.0 * sgn / (pi4 * m * n * (static_cast<double>(m) * m + static_cast<double>(n) * n));
        }
    }
    return s;
}

}  // namespace

TEST_CASE("stiffness row sums, symmetry, stencil") {
    for (int n : {2, 5, 10}) {
        Mesh mesh = build_unit_square_mesh(n);
        SparseMatrix K = assemble_stiffness(mesh);

        std::vector<double> ones(mesh.node_count(), 1.0);
        for (double r : K.apply(ones)) CHECK(std::abs(r) < 1e-13);

        for (int i = 0; i < K.rows; ++i) {
            for (int k = K.row_offsets[i]; k < K.row_offsets[i + 1]; ++k) {
                CHECK(K.values[k] == K.at(K.col_indices[k], i));
            }
        }
    }

    // Hand-assembled 5-point stencil on the n=2 mesh.
    Mesh mesh = build_unit_square_mesh(2);
    SparseMatrix K = assemble_stiffness(mesh);
    const int c = center_index(mesh);  // node at (0.5, 0.5), index 4
    CHECK(K.at(c, c) == Catch::Approx(4.0).epsilon(1e-14));
    CHECK(K.at(c, 1) == Catch::Approx(-1.0).epsilon(1e-14));  // south
    CHECK(K.at(c, 3) == Catch::Approx(-1.0).epsilon(1e-14));  // west
    CHECK(K.at(c, 5) == Catch::Approx(-1.0).epsilon(1e-14));  // east
    CHECK(K.at(c, 7) == Catch::Approx(-1.0).epsilon(1e-14));  // north
    CHECK(std::abs(K.at(c, 0)) < 1e-14);
    CHECK(std::abs(K.at(c, 2)) < 1e-14);
    CHECK(std::abs(K.at(c, 6)) < 1e-14);
    CHECK(std::abs(K.at(c, 8)) < 1e-14);
}

TEST_CASE("stiffness energy is nonnegative and kills linear fields") {
    Mesh mesh = build_unit_square_mesh(6);
    SparseMatrix K = assemble_stiffness(mesh);
    std::mt19937 rng(12345);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> v(mesh.node_count());
        for (double& x : v) x = dist(rng);
        const std::vector<double> kv = K.apply(v);
        double energy = 0.0;
        for (int i = 0; i < K.rows; ++i) energy += v[i] * kv[i];
        CHECK(energy >= -1e-12);
    }

    // Interior rows annihilate nodal interpolants of a + bx + cy.
    for (auto [a, b, c] : {std::array<double, 3>{1.0, 0.0, 0.0},
                           std::array<double, 3>{0.3, -2.0, 0.7},
                           std::array<double, 3>{0.0, 1.0, 1.0}}) {
        std::vector<double> lin(mesh.node_count());
        for (int i = 0; i < mesh.node_count(); ++i) {
            lin[i] = a + b * mesh.nodes[i][0] + c * mesh.nodes[i][1];
        }
        const std::vector<double> klin = K.apply(lin);
        for (int i = 0; i < mesh.node_count(); ++i) {
            if (!mesh.boundary_mask[i]) CHECK(std::abs(klin[i]) < 1e-12);
        }
    }
}

TEST_CASE("lumped mass weights") {
    for (int n : {1, 2, 4, 10}) {
        Mesh mesh = build_unit_square_mesh(n);
        LumpedMass M = assemble_lumped_mass(mesh);
        double total = 0.0;
        for (double w : M.weights) {
            CHECK(w > 0.0);
            total += w;
        }
        CHECK(total == Catch::Approx(1.0).epsilon(1e-12));
    }

    Mesh mesh = build_unit_square_mesh(2);
    LumpedMass M = assemble_lumped_mass(mesh);
    CHECK(M.weights[4] == Catch::Approx(0.25).epsilon(1e-14));           // center, 6 triangles
    CHECK(M.weights[0] == Catch::Approx(1.0 / 12.0).epsilon(1e-14));     // (0,0), 2 triangles
    CHECK(M.weights[2] == Catch::Approx(1.0 / 24.0).epsilon(1e-14));     // (1,0), 1 triangle
}

TEST_CASE("dirichlet solve basics") {
    Mesh mesh = build_unit_square_mesh(2);
    SparseMatrix K = assemble_stiffness(mesh);
    LumpedMass M = assemble_lumped_mass(mesh);
    const auto boundary = boundary_nodes(mesh);
    const std::vector<double> zero_bc(mesh.node_count(), 0.0);

    SECTION("zero data gives zero") {
        std::vector<double> x =
            solve_dirichlet_system(K, std::vector<double>(mesh.node_count(), 0.0), boundary, zero_bc);
        for (double v : x) CHECK(v == 0.0);
    }

    SECTION("single-unknown hand solve: 4 x = 1/4") {
        std::vector<double> b(mesh.node_count());
        for (int i = 0; i < mesh.node_count(); ++i) b[i] = M.weights[i];
        std::vector<double> x = solve_dirichlet_system(K, b, boundary, zero_bc);
        CHECK(x[4] == Catch::Approx(1.0 / 16.0).epsilon(1e-12));
        for (int i : boundary) CHECK(x[i] == 0.0);
    }

    SECTION("identity diagonal returns rhs on interior") {
        std::vector<Triplet> ts;
        for (int i = 0; i < mesh.node_count(); ++i) ts.push_back({i, i, 1.0});
        SparseMatrix I = sparse_from_triplets(mesh.node_count(), mesh.node_count(), ts);
        std::vector<double> b(mesh.node_count(), 0.7);
        std::vector<double> x = solve_dirichlet_system(I, b, boundary, zero_bc);
        CHECK(x[4] == Catch::Approx(0.7).epsilon(1e-14));
    }

    SECTION("nonzero boundary data: discrete harmonic extension of a linear field") {
        std::vector<double> bc(mesh.node_count(), 0.0);
        for (int i : boundary) bc[i] = 0.5 - mesh.nodes[i][0] + 2.0 * mesh.nodes[i][1];
        std::vector<double> x =
            solve_dirichlet_system(K, std::vector<double>(mesh.node_count(), 0.0), boundary, bc);
        CHECK(x[4] == Catch::Approx(0.5 - 0.5 + 1.0).epsilon(1e-12));
    }

    SECTION("singular interior block is an explicit failure") {
        std::vector<Triplet> ts;
        for (int i : boundary) ts.push_back({i, i, 1.0});
        ts.push_back({4, 4, 0.0});
        SparseMatrix A = sparse_from_triplets(mesh.node_count(), mesh.node_count(), ts);
        CHECK_THROWS_AS(
            solve_dirichlet_system(A, std::vector<double>(mesh.node_count(), 1.0), boundary, zero_bc),
            solver_error);
    }
}

TEST_CASE("poisson solve: zero source, linearity, maximum principle") {
    Mesh mesh = build_unit_square_mesh(8);
    PoissonSolver poisson(mesh);

    std::vector<double> w0 = poisson.solve(std::vector<double>(mesh.node_count(), 0.0));
    for (double v : w0) CHECK(v == 0.0);

    std::mt19937 rng(777);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> s1(mesh.node_count()), s2(mesh.node_count());
        for (int i = 0; i < mesh.node_count(); ++i) {
            s1[i] = dist(rng);
            s2[i] = dist(rng);
        }
        const double a = dist(rng), b = dist(rng);
        std::vector<double> combo(mesh.node_count());
        for (int i = 0; i < mesh.node_count(); ++i) combo[i] = a * s1[i] + b * s2[i];
        std::vector<double> w1 = poisson.solve(s1);
        std::vector<double> w2 = poisson.solve(s2);
        std::vector<double> wc = poisson.solve(combo);
        for (int i = 0; i < mesh.node_count(); ++i) {
            CHECK(std::abs(wc[i] - a * w1[i] - b * w2[i]) < 1e-10);
        }

        // Discrete maximum principle on the 5-point stencil.
        std::vector<double> nonneg(mesh.node_count());
        for (int i = 0; i < mesh.node_count(); ++i) nonneg[i] = std::abs(s1[i]);
        for (double v : poisson.solve(nonneg)) CHECK(v >= -1e-14);
    }
}

TEST_CASE("poisson manufactured solution converges at second order") {
    const double pi = std::acos(-1.0);
    double prev_err = 0.0;
    for (int n : {8, 16, 32}) {
        Mesh mesh = build_unit_square_mesh(n);
        std::vector<double> src(mesh.node_count());
        for (int i = 0; i < mesh.node_count(); ++i) {
            src[i] = 2.0 * pi * pi * std::sin(pi * mesh.nodes[i][0]) * std::sin(pi * mesh.nodes[i][1]);
        }
        ScalarField w = solve_poisson(mesh, {&mesh, src});
        double err = 0.0;
        for (int i = 0; i < mesh.node_count(); ++i) {
            err = std::max(err, std::abs(w.values[i] - std::sin(pi * mesh.nodes[i][0]) *
                                                           std::sin(pi * mesh.nodes[i][1])));
        }
        if (prev_err > 0.0) {
            CHECK(std::log2(prev_err / err) >= 1.8);
        }
        prev_err = err;
    }
}

TEST_CASE("poisson against the Fourier-series oracle") {
    const double oracle = poisson_constant_source_center();
    CHECK(oracle == Catch::Approx(0.0736713).margin(1e-6));
    Mesh mesh = build_unit_square_mesh(32);
    ScalarField w = solve_poisson(mesh, {&mesh, std::vector<double>(mesh.node_count(), 1.0)});
    CHECK(std::abs(w.values[center_index(mesh)] - oracle) < 1.2e-4);  // O(h^2) at h = 1/32
}

TEST_CASE("field norms") {
    Mesh mesh = build_unit_square_mesh(2);
    LumpedMass M = assemble_lumped_mass(mesh);

    ScalarField one{&mesh, std::vector<double>(mesh.node_count(), 1.0)};
    CHECK(field_norm(one, M, Norm::L1) == Catch::Approx(1.0).epsilon(1e-14));
    CHECK(field_norm(one, M, Norm::L2) == Catch::Approx(1.0).epsilon(1e-14));
    CHECK(field_norm(one, M, Norm::Linf) == 1.0);

    ScalarField neg{&mesh, std::vector<double>(mesh.node_count(), -3.0)};
    CHECK(field_norm(neg, M, Norm::L1) == Catch::Approx(3.0).epsilon(1e-14));
    CHECK(field_norm(neg, M, Norm::Linf) == 3.0);

    ScalarField spike{&mesh, std::vector<double>(mesh.node_count(), 0.0)};
    spike.values[4] = -2.5;  // interior node carries weight 1/4
    CHECK(field_norm(spike, M, Norm::L1) == Catch::Approx(2.5 / 4.0).epsilon(1e-14));
}
