#include "stabcheck/snf.hpp"

#include <limits>
#include <map>
#include <set>
#include <stdexcept>

namespace stabcheck {

IntegerMatrix IntegerMatrix::multiply(const IntegerMatrix& o) const {
    if (cols_ != o.rows_) throw std::invalid_argument("IntegerMatrix: dimension mismatch");
    IntegerMatrix r(rows_, o.cols_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t k = 0; k < cols_; ++k) {
            const BigInt& a = (*this)(i, k);
            if (a == 0) continue;
            for (std::size_t j = 0; j < o.cols_; ++j) r(i, j) += a * o(k, j);
        }
    return r;
}

BigInt IntegerMatrix::determinant() const {
    if (rows_ != cols_) throw std::invalid_argument("determinant: matrix not square");
    const std::size_t n = rows_;
    IntegerMatrix a = *this;
    // Bareiss fraction-free elimination
    BigInt prev = 1;
    int sign = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (a(k, k) == 0) {
            std::size_t p = k + 1;
            while (p < n && a(p, k) == 0) ++p;
            if (p == n) return 0;
            for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(p, j));
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i)
            for (std::size_t j = k + 1; j < n; ++j)
                a(i, j) = (a(i, j) * a(k, k) - a(i, k) * a(k, j)) / prev;
        prev = a(k, k);
    }
    return sign > 0 ? a(n - 1, n - 1) : -a(n - 1, n - 1);
}

namespace {

BigInt big_abs(const BigInt& x) { return x < 0 ? BigInt(-x) : x; }

struct Reducer {
    IntegerMatrix A, U, V;
    std::size_t m, n;

    explicit Reducer(const IntegerMatrix& a)
        : A(a), U(IntegerMatrix::identity(a.rows())), V(IntegerMatrix::identity(a.cols())),
          m(a.rows()), n(a.cols()) {}

    void swap_rows(std::size_t i, std::size_t j) {
        if (i == j) return;
        for (std::size_t c = 0; c < n; ++c) std::swap(A(i, c), A(j, c));
        for (std::size_t c = 0; c < m; ++c) std::swap(U(i, c), U(j, c));
    }
    void swap_cols(std::size_t i, std::size_t j) {
        if (i == j) return;
        for (std::size_t r = 0; r < m; ++r) std::swap(A(r, i), A(r, j));
        for (std::size_t r = 0; r < n; ++r) std::swap(V(r, i), V(r, j));
    }
    // row i -= q * row j
    void row_op(std::size_t i, std::size_t j, const BigInt& q) {
        if (q == 0) return;
        for (std::size_t c = 0; c < n; ++c) A(i, c) -= q * A(j, c);
        for (std::size_t c = 0; c < m; ++c) U(i, c) -= q * U(j, c);
    }
    // col i -= q * col j
    void col_op(std::size_t i, std::size_t j, const BigInt& q) {
        if (q == 0) return;
        for (std::size_t r = 0; r < m; ++r) A(r, i) -= q * A(r, j);
        for (std::size_t r = 0; r < n; ++r) V(r, i) -= q * V(r, j);
    }
    void negate_row(std::size_t i) {
        for (std::size_t c = 0; c < n; ++c) A(i, c) = -A(i, c);
        for (std::size_t c = 0; c < m; ++c) U(i, c) = -U(i, c);
    }

    // smallest-nonzero-magnitude pivot in the trailing block at (t, t)
    bool find_pivot(std::size_t t, std::size_t& pr, std::size_t& pc) {
        bool found = false;
        BigInt best;
        for (std::size_t i = t; i < m; ++i)
            for (std::size_t j = t; j < n; ++j) {
                if (A(i, j) == 0) continue;
                BigInt a = big_abs(A(i, j));
                if (!found || a < best) {
                    found = true;
                    best = a;
                    pr = i;
                    pc = j;
                }
            }
        return found;
    }

    SNFResult run() {
        std::size_t t = 0;
        const std::size_t limit = std::min(m, n);
        while (t < limit) {
            std::size_t pr = 0, pc = 0;
            if (!find_pivot(t, pr, pc)) break;
            swap_rows(t, pr);
            swap_cols(t, pc);

            // clear row t and column t; pivoting again if a remainder appears
            for (;;) {
                bool dirty = false;
                for (std::size_t i = t + 1; i < m; ++i) {
                    if (A(i, t) == 0) continue;
                    BigInt q = A(i, t) / A(t, t);
                    row_op(i, t, q);
                    if (A(i, t) != 0) {
                        swap_rows(t, i);  // remainder is smaller; make it the pivot
                        dirty = true;
                    }
                }
                for (std::size_t j = t + 1; j < n; ++j) {
                    if (A(t, j) == 0) continue;
                    BigInt q = A(t, j) / A(t, t);
                    col_op(j, t, q);
                    if (A(t, j) != 0) {
                        swap_cols(t, j);
                        dirty = true;
                    }
                }
                if (!dirty) break;
            }

            // divisibility: pivot must divide everything in the trailing block
            bool retry = false;
            for (std::size_t i = t + 1; i < m && !retry; ++i)
                for (std::size_t j = t + 1; j < n && !retry; ++j)
                    if (A(i, j) % A(t, t) != 0) {
                        // fold row i into row t and redo the elimination step
                        row_op(t, i, BigInt(-1));
                        retry = true;
                    }
            if (retry) continue;

            if (A(t, t) < 0) negate_row(t);
            ++t;
        }

        SNFResult res;
        res.U = std::move(U);
        res.V = std::move(V);
        res.D = std::move(A);
        res.rank = t;
        for (std::size_t i = 0; i < t; ++i) res.diagonal.push_back(res.D(i, i));
        return res;
    }
};

} // namespace

SNFResult smith_normal_form(const IntegerMatrix& A) { return Reducer(A).run(); }

std::vector<BigInt> invariant_factors(const IntegerMatrix& A) {
    const std::size_t m = A.rows(), n = A.cols();
    std::vector<std::map<std::size_t, BigInt>> rows(m);
    std::vector<std::set<std::size_t>> cols(n);
    for (std::size_t r = 0; r < m; ++r)
        for (std::size_t c = 0; c < n; ++c)
            if (A(r, c) != 0) {
                rows[r][c] = A(r, c);
                cols[c].insert(r);
            }
    std::vector<bool> row_done(m, false), col_done(n, false);

    std::size_t units = 0;
    while (true) {
        // Markowitz-style: unit pivot with least fill-in
        std::size_t pr = m, pc = n;
        std::size_t best = std::numeric_limits<std::size_t>::max();
        for (std::size_t c = 0; c < n && best > 0; ++c) {
            if (col_done[c]) continue;
            for (std::size_t r : cols[c]) {
                const BigInt& v = rows[r].at(c);
                if (v != 1 && v != -1) continue;
                const std::size_t score = (rows[r].size() - 1) * (cols[c].size() - 1);
                if (score < best) {
                    best = score;
                    pr = r;
                    pc = c;
                    if (best == 0) break;
                }
            }
        }
        if (pr == m) break;

        const BigInt s = rows[pr].at(pc);  // +-1
        const auto pivot_row = rows[pr];
        const std::vector<std::size_t> col_rows(cols[pc].begin(), cols[pc].end());
        for (std::size_t r : col_rows) {
            if (r == pr) continue;
            const BigInt factor = rows[r].at(pc) * s;
            for (const auto& [c, v] : pivot_row) {
                BigInt& cell = rows[r][c];
                cell -= factor * v;
                if (cell == 0) {
                    rows[r].erase(c);
                    cols[c].erase(r);
                } else {
                    cols[c].insert(r);
                }
            }
        }
        for (const auto& [c, v] : pivot_row) cols[c].erase(pr);
        rows[pr].clear();
        row_done[pr] = true;
        col_done[pc] = true;
        ++units;
    }

    // dense Smith reduction of what is left
    std::vector<std::size_t> live_rows, live_cols;
    for (std::size_t r = 0; r < m; ++r)
        if (!row_done[r] && !rows[r].empty()) live_rows.push_back(r);
    std::map<std::size_t, std::size_t> col_pos;
    for (std::size_t r : live_rows)
        for (const auto& [c, v] : rows[r])
            if (!col_pos.count(c)) {
                col_pos[c] = col_pos.size();
            }
    IntegerMatrix residual(live_rows.size(), col_pos.size());
    for (std::size_t i = 0; i < live_rows.size(); ++i)
        for (const auto& [c, v] : rows[live_rows[i]]) residual(i, col_pos[c]) = v;

    std::vector<BigInt> factors(units, 1);
    for (const auto& d : smith_normal_form(residual).diagonal) factors.push_back(d);
    return factors;
}

std::size_t integer_rank(const IntegerMatrix& A) { return invariant_factors(A).size(); }

} // namespace stabcheck
