#include <doctest.h>

#include <random>
#include <sstream>

#include "stabcheck/simplicial.hpp"

using namespace stabcheck;

namespace {

SimplicialComplex triangle_boundary() {
    return SimplicialComplex::build({{0, 1}, {1, 2}, {2, 0}});
}

SimplicialComplex tetra_boundary() {
    // coherently oriented boundary of [0,1,2,3]
    return SimplicialComplex::build({{1, 2, 3}, {0, 3, 2}, {0, 1, 3}, {0, 2, 1}});
}

// Cyclic 7-vertex torus triangulation: triangles {i, i+1, i+3}, {i, i+2, i+3} mod 7.
SimplicialComplex torus7() {
    std::vector<Simplex> tris;
    for (int i = 0; i < 7; ++i) {
        tris.push_back({i, (i + 1) % 7, (i + 3) % 7});
        tris.push_back({i, (i + 2) % 7, (i + 3) % 7});
    }
    return SimplicialComplex::build(tris);
}

SimplicialComplex moebius_strip() {
    return SimplicialComplex::build({{0, 1, 2}, {1, 2, 3}, {2, 3, 4}, {3, 4, 0}, {4, 0, 1}});
}

bool matrix_is_zero(const IntegerMatrix& m) {
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            if (m(i, j) != 0) return false;
    return true;
}

long long alt_simplex_sum(const SimplicialComplex& K) {
    long long s = 0;
    for (int k = 0; k <= K.dimension(); ++k)
        s += (k % 2 == 0 ? 1LL : -1LL) * (long long)K.count(k);
    return s;
}

long long alt_betti_sum(const HomologyProfile& H) {
    long long s = 0;
    for (std::size_t k = 0; k < H.betti.size(); ++k)
        s += (k % 2 == 0 ? 1LL : -1LL) * (long long)H.betti[k];
    return s;
}

// small corpus for the property checks
std::vector<SimplicialComplex> corpus() {
    std::vector<SimplicialComplex> out;
    out.push_back(SimplicialComplex::build({{0}}));
    out.push_back(triangle_boundary());
    out.push_back(tetra_boundary());
    out.push_back(torus7());
    out.push_back(moebius_strip());
    out.push_back(SimplicialComplex::build({{0, 1, 2}}));                 // filled triangle
    out.push_back(SimplicialComplex::build({{0, 1, 2, 3}}));              // solid tetrahedron
    out.push_back(SimplicialComplex::build({{0, 1}, {1, 2}, {2, 3}}));    // path
    out.push_back(SimplicialComplex::build({{0}, {1}, {2}}));             // three points
    out.push_back(SimplicialComplex::build({{0, 1}, {1, 2}, {2, 0}, {3, 4}, {4, 5}, {5, 3}}));
    // wedge-like: two triangles sharing an edge
    out.push_back(SimplicialComplex::build({{0, 1, 2}, {1, 2, 3}}));
    // annulus: triangulated band between two triangles
    out.push_back(SimplicialComplex::build(
        {{0, 1, 3}, {1, 4, 3}, {1, 2, 4}, {2, 5, 4}, {2, 0, 5}, {0, 3, 5}}));
    // random-ish 2-complexes on 6 vertices
    std::mt19937 rng(5);
    std::uniform_int_distribution<int> v(0, 5);
    for (int c = 0; c < 8; ++c) {
        std::vector<Simplex> tris;
        for (int t = 0; t < 5; ++t) {
            int a = v(rng), b = v(rng), cc = v(rng);
            if (a == b || b == cc || a == cc) {
                --t;
                continue;
            }
            tris.push_back({a, b, cc});
        }
        try {
            out.push_back(SimplicialComplex::build(tris));
        } catch (const ComplexError&) {
            --c;  // duplicate with clashing orientation; reroll
        }
    }
    return out;
}

} // namespace

TEST_CASE("build: triangle boundary, tetra boundary, single vertex") {
    auto tri = triangle_boundary();
    CHECK(tri.count(0) == 3);
    CHECK(tri.count(1) == 3);
    CHECK(tri.dimension() == 1);

    auto tet = tetra_boundary();
    CHECK(tet.count(0) == 4);
    CHECK(tet.count(1) == 6);
    CHECK(tet.count(2) == 4);

    auto pt = SimplicialComplex::build({{0}});
    CHECK(pt.count(0) == 1);
    CHECK(pt.dimension() == 0);
}

TEST_CASE("build: inconsistent duplicate orientations rejected") {
    CHECK_THROWS_AS(SimplicialComplex::build({{0, 1, 2}, {1, 0, 2}}), ComplexError);
    // even permutation of the same simplex is fine (deduplicated)
    auto K = SimplicialComplex::build({{0, 1, 2}, {1, 2, 0}});
    CHECK(K.count(2) == 1);
}

TEST_CASE("build: dangling vertex id") {
    std::map<int, std::vector<double>> coords{{0, {0, 0}}, {1, {1, 0}}};
    CHECK_THROWS_AS(SimplicialComplex::build({{0, 1, 7}}, coords), ComplexError);
}

TEST_CASE("boundary_matrix: triangle boundary columns sum to zero") {
    auto M = triangle_boundary().boundary_matrix(1);
    REQUIRE(M.rows() == 3);
    REQUIRE(M.cols() == 3);
    for (std::size_t j = 0; j < 3; ++j) {
        BigInt s = 0;
        int nonzero = 0;
        for (std::size_t i = 0; i < 3; ++i) {
            s += M(i, j);
            if (M(i, j) != 0) ++nonzero;
        }
        CHECK(s == 0);
        CHECK(nonzero == 2);
    }
}

TEST_CASE("boundary_matrix: dd = 0 and degree range") {
    auto tet = tetra_boundary();
    CHECK(matrix_is_zero(tet.boundary_matrix(1).multiply(tet.boundary_matrix(2))));
    CHECK_THROWS_AS(tet.boundary_matrix(5), ComplexError);
}

TEST_CASE("property: dd = 0 over the corpus") {
    for (const auto& K : corpus())
        for (int k = 2; k <= K.dimension(); ++k)
            CHECK(matrix_is_zero(K.boundary_matrix(k - 1).multiply(K.boundary_matrix(k))));
}

TEST_CASE("homology: point") {
    auto H = homology_profile(SimplicialComplex::build({{0}}));
    REQUIRE(H.betti.size() == 1);
    CHECK(H.betti[0] == 1);
    CHECK(H.euler == 1);
}

TEST_CASE("homology: tetrahedron boundary is a 2-sphere") {
    auto H = homology_profile(tetra_boundary());
    REQUIRE(H.betti.size() == 3);
    CHECK(H.betti[0] == 1);
    CHECK(H.betti[1] == 0);
    CHECK(H.betti[2] == 1);
    CHECK(H.euler == 2);
    for (const auto& t : H.torsion) CHECK(t.empty());
}

TEST_CASE("homology: 7-vertex torus") {
    auto K = torus7();
    CHECK(K.count(0) == 7);
    CHECK(K.count(1) == 21);
    CHECK(K.count(2) == 14);
    auto H = homology_profile(K);
    REQUIRE(H.betti.size() == 3);
    CHECK(H.betti[0] == 1);
    CHECK(H.betti[1] == 2);
    CHECK(H.betti[2] == 1);
    CHECK(H.euler == 0);
}

TEST_CASE("homology: projective-plane style torsion shows up exactly") {
    // minimal RP^2 triangulation (6 vertices): torsion Z/2 in degree 1
    std::vector<Simplex> tris = {{1, 2, 4}, {1, 2, 5}, {1, 3, 4}, {1, 3, 6}, {1, 5, 6},
                                 {2, 3, 5}, {2, 3, 6}, {2, 4, 6}, {3, 4, 5}, {4, 5, 6}};
    auto H = homology_profile(SimplicialComplex::build(tris));
    CHECK(H.betti[0] == 1);
    CHECK(H.betti[1] == 0);
    CHECK(H.betti[2] == 0);
    REQUIRE(H.torsion[1].size() == 1);
    CHECK(H.torsion[1][0] == 2);
    CHECK(H.euler == 1);
}

TEST_CASE("property: Euler-Poincare identity on the corpus") {
    for (const auto& K : corpus()) {
        auto H = homology_profile(K);
        CHECK(alt_simplex_sum(K) == H.euler);
        CHECK(alt_betti_sum(H) == H.euler);
    }
}

TEST_CASE("property: barycentric subdivision preserves homology") {
    int done = 0;
    for (const auto& K : corpus()) {
        auto H = homology_profile(K);
        auto S = K.barycentric_subdivision();
        auto HS = homology_profile(S);
        REQUIRE(H.betti.size() == HS.betti.size());
        for (std::size_t k = 0; k < H.betti.size(); ++k) {
            CHECK(H.betti[k] == HS.betti[k]);
            CHECK(H.torsion[k] == HS.torsion[k]);
        }
        CHECK(H.euler == HS.euler);
        ++done;
    }
    CHECK(done >= 20);
}

TEST_CASE("fundamental_cycle: oriented triangle boundary") {
    auto K = triangle_boundary();
    auto c = fundamental_cycle(K);
    CHECK(c.degree == 1);
    CHECK(c.coefficients.size() == 3);
    CHECK(boundary(K, c).coefficients.empty());
}

TEST_CASE("fundamental_cycle: tetra boundary with coherent orientations") {
    auto K = tetra_boundary();
    auto c = fundamental_cycle(K);
    CHECK(c.coefficients.size() == 4);
    CHECK(boundary(K, c).coefficients.empty());
}

TEST_CASE("fundamental_cycle: Moebius strip is non-orientable") {
    try {
        fundamental_cycle(moebius_strip());
        FAIL("expected ComplexError");
    } catch (const ComplexError& e) {
        CHECK(std::string(e.what()).find("non-orientable") != std::string::npos);
    }
}

TEST_CASE("fundamental_cycle: incoherent orientation reported distinctly") {
    // sphere with one triangle flipped
    auto K = SimplicialComplex::build({{1, 2, 3}, {0, 3, 2}, {0, 1, 3}, {0, 1, 2}});
    try {
        fundamental_cycle(K);
        FAIL("expected ComplexError");
    } catch (const ComplexError& e) {
        CHECK(std::string(e.what()).find("coherently") != std::string::npos);
    }
}

TEST_CASE("mesh format round trip") {
    std::map<int, std::vector<double>> coords{
        {0, {0.0, 0.0}}, {1, {1.0, 0.0}}, {2, {0.5, 1.0}}};
    auto K = SimplicialComplex::build({{0, 1}, {1, 2}, {2, 0}}, coords);
    std::stringstream ss;
    write_mesh(ss, K);
    auto K2 = read_mesh(ss);
    CHECK(K2.count(0) == 3);
    CHECK(K2.count(1) == 3);
    CHECK(homology_profile(K2).betti[1] == 1);
}

TEST_CASE("mesh format errors") {
    std::stringstream bad1("not a header");
    CHECK_THROWS_AS(read_mesh(bad1), ComplexError);
    std::stringstream bad2("2 1 2\n0 0\n1 0\n0 5\n");
    CHECK_THROWS_AS(read_mesh(bad2), ComplexError);
}
