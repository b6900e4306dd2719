#ifndef STABCHECK_SNF_HPP
#define STABCHECK_SNF_HPP

#include <boost/multiprecision/cpp_int.hpp>
#include <cstddef>
#include <vector>

namespace stabcheck {

using BigInt = boost::multiprecision::cpp_int;

/// Dense matrix of arbitrary-precision integers.
class IntegerMatrix {
  public:
    IntegerMatrix() = default;
    IntegerMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols) {}

    static IntegerMatrix identity(std::size_t n) {
        IntegerMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    BigInt& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const BigInt& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    bool operator==(const IntegerMatrix& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
    }

    IntegerMatrix multiply(const IntegerMatrix& o) const;
    BigInt determinant() const;  // exact, fraction-free elimination

  private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<BigInt> data_;
};

/// U * A * V = D with U, V unimodular and D diagonal with positive entries
/// d_1 | d_2 | ... | d_r.
struct SNFResult {
    IntegerMatrix D, U, V;
    std::size_t rank = 0;
    std::vector<BigInt> diagonal;  // the r nonzero invariant factors
};

SNFResult smith_normal_form(const IntegerMatrix& A);

/// Invariant factors of A (the diagonal of its Smith normal form): sparse
/// elimination on unit pivots first, dense reduction of the small residual.
std::vector<BigInt> invariant_factors(const IntegerMatrix& A);

std::size_t integer_rank(const IntegerMatrix& A);

} // namespace stabcheck

#endif
