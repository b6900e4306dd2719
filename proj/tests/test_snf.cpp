#include <doctest.h>

#include <random>

#include "stabcheck/snf.hpp"

using namespace stabcheck;

namespace {

IntegerMatrix from_rows(const std::vector<std::vector<long>>& rows) {
    IntegerMatrix m(rows.size(), rows.empty() ? 0 : rows[0].size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
    return m;
}

bool is_unimodular(const IntegerMatrix& m) {
    BigInt d = m.determinant();
    return d == 1 || d == -1;
}

void check_snf_contract(const IntegerMatrix& A, const SNFResult& r) {
    // U * A * V = D exactly
    CHECK(r.U.multiply(A).multiply(r.V) == r.D);
    CHECK(is_unimodular(r.U));
    CHECK(is_unimodular(r.V));
    // diagonal, positive, divisibility chain
    for (std::size_t i = 0; i < r.D.rows(); ++i)
        for (std::size_t j = 0; j < r.D.cols(); ++j)
            if (i != j) CHECK(r.D(i, j) == 0);
    for (std::size_t i = 0; i < r.rank; ++i) {
        CHECK(r.D(i, i) > 0);
        if (i + 1 < r.rank) CHECK(r.D(i + 1, i + 1) % r.D(i, i) == 0);
    }
    for (std::size_t i = r.rank; i < std::min(r.D.rows(), r.D.cols()); ++i)
        CHECK(r.D(i, i) == 0);
}

// Brute-force oracle: elementary row/column reduction without transform
// tracking, structured independently of the production pivoting strategy
// (always reduces against the top-left entry after moving any nonzero there).
std::vector<BigInt> oracle_invariant_factors(IntegerMatrix a) {
    std::vector<BigInt> out;
    std::size_t t = 0;
    const std::size_t m = a.rows(), n = a.cols();
    while (t < std::min(m, n)) {
        std::size_t pr = t, pc = t;
        bool found = false;
        for (std::size_t i = t; i < m && !found; ++i)
            for (std::size_t j = t; j < n && !found; ++j)
                if (a(i, j) != 0) {
                    pr = i;
                    pc = j;
                    found = true;
                }
        if (!found) break;
        for (std::size_t j = 0; j < n; ++j) std::swap(a(t, j), a(pr, j));
        for (std::size_t i = 0; i < m; ++i) std::swap(a(i, t), a(i, pc));
        bool again = true;
        while (again) {
            again = false;
            for (std::size_t i = t + 1; i < m; ++i)
                while (a(i, t) != 0) {
                    BigInt q = a(i, t) / a(t, t);
                    for (std::size_t j = 0; j < n; ++j) a(i, j) -= q * a(t, j);
                    if (a(i, t) != 0)
                        for (std::size_t j = 0; j < n; ++j) std::swap(a(t, j), a(i, j));
                }
            for (std::size_t j = t + 1; j < n; ++j)
                while (a(t, j) != 0) {
                    BigInt q = a(t, j) / a(t, t);
                    for (std::size_t i = 0; i < m; ++i) a(i, j) -= q * a(i, t);
                    if (a(t, j) != 0)
                        for (std::size_t i = 0; i < m; ++i) std::swap(a(i, t), a(i, j));
                }
            for (std::size_t i = t + 1; i < m && !again; ++i)
                for (std::size_t j = t + 1; j < n && !again; ++j)
                    if (a(i, j) % a(t, t) != 0) {
                        for (std::size_t jj = 0; jj < n; ++jj) a(t, jj) += a(i, jj);
                        again = true;
                    }
        }
        BigInt d = a(t, t);
        out.push_back(d < 0 ? BigInt(-d) : d);
        ++t;
    }
    return out;
}

} // namespace

TEST_CASE("snf: identity") {
    auto A = IntegerMatrix::identity(3);
    auto r = smith_normal_form(A);
    check_snf_contract(A, r);
    CHECK(r.rank == 3);
    CHECK(r.D == IntegerMatrix::identity(3));
}

TEST_CASE("snf: zero matrix") {
    IntegerMatrix A(3, 4);
    auto r = smith_normal_form(A);
    check_snf_contract(A, r);
    CHECK(r.rank == 0);
}

TEST_CASE("snf: [[2,4],[6,8]] has invariant factors 2, 4") {
    auto A = from_rows({{2, 4}, {6, 8}});
    auto r = smith_normal_form(A);
    check_snf_contract(A, r);
    REQUIRE(r.rank == 2);
    CHECK(r.diagonal[0] == 2);
    CHECK(r.diagonal[1] == 4);
    auto oracle = oracle_invariant_factors(A);
    REQUIRE(oracle.size() == 2);
    CHECK(oracle[0] == 2);
    CHECK(oracle[1] == 4);
}

TEST_CASE("snf: property suite over 200 random matrices") {
    std::mt19937 rng(2024);
    std::uniform_int_distribution<int> dim(1, 6);
    std::uniform_int_distribution<int> entry(-9, 9);
    for (int it = 0; it < 200; ++it) {
        const std::size_t m = dim(rng), n = dim(rng);
        IntegerMatrix A(m, n);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < n; ++j) A(i, j) = entry(rng);
        auto r = smith_normal_form(A);
        check_snf_contract(A, r);
        if (m == 3 && n == 3) {
            auto oracle = oracle_invariant_factors(A);
            REQUIRE(oracle.size() == r.diagonal.size());
            for (std::size_t i = 0; i < oracle.size(); ++i) CHECK(oracle[i] == r.diagonal[i]);
        }
    }
}

TEST_CASE("snf: all 3x3 oracle agreement, dedicated pass") {
    std::mt19937 rng(99);
    std::uniform_int_distribution<int> entry(-9, 9);
    for (int it = 0; it < 100; ++it) {
        IntegerMatrix A(3, 3);
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 3; ++j) A(i, j) = entry(rng);
        auto r = smith_normal_form(A);
        auto oracle = oracle_invariant_factors(A);
        REQUIRE(oracle.size() == r.diagonal.size());
        for (std::size_t i = 0; i < oracle.size(); ++i) CHECK(oracle[i] == r.diagonal[i]);
    }
}

TEST_CASE("determinant: Bareiss vs known values") {
    CHECK(from_rows({{2, 4}, {6, 8}}).determinant() == -8);
    CHECK(IntegerMatrix::identity(4).determinant() == 1);
    CHECK(from_rows({{1, 2, 3}, {4, 5, 6}, {7, 8, 9}}).determinant() == 0);
}

TEST_CASE("invariant_factors: sparse path agrees with dense reduction") {
    std::mt19937 rng(123);
    std::uniform_int_distribution<int> entry(-6, 6);
    std::uniform_int_distribution<std::size_t> dim(1, 7);
    std::bernoulli_distribution sparse_entry(0.4);
    for (int it = 0; it < 150; ++it) {
        IntegerMatrix A(dim(rng), dim(rng));
        for (std::size_t i = 0; i < A.rows(); ++i)
            for (std::size_t j = 0; j < A.cols(); ++j)
                if (sparse_entry(rng)) A(i, j) = entry(rng);
        auto fast = invariant_factors(A);
        auto dense = smith_normal_form(A).diagonal;
        REQUIRE(fast.size() == dense.size());
        for (std::size_t i = 0; i < fast.size(); ++i) CHECK(fast[i] == dense[i]);
    }
}
