#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "qtoda/multipoly.hpp"
#include "qtoda/rational.hpp"

namespace qtoda {

struct RankError : std::runtime_error {
    int rank;
    explicit RankError(int r)
        : std::runtime_error("singular system, rank " + std::to_string(r)), rank(r) {}
};

struct ResourceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

template <class T>
class Mat {
public:
    Mat() = default;
    Mat(std::size_t rows, std::size_t cols, T fill = T())
        : rows_(rows), cols_(cols), a_(rows * cols, fill) {}

    static Mat identity(std::size_t n, T one) {
        Mat m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = one;
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    T& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
    const T& operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

    bool operator==(const Mat& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_ && a_ == o.a_;
    }

    friend Mat operator*(const Mat& a, const Mat& b) {
        Mat out(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i)
            for (std::size_t k = 0; k < a.cols_; ++k) {
                const T& aik = a(i, k);
                for (std::size_t j = 0; j < b.cols_; ++j) out(i, j) += aik * b(k, j);
            }
        return out;
    }
    friend Mat operator+(Mat a, const Mat& b) {
        for (std::size_t i = 0; i < a.a_.size(); ++i) a.a_[i] += b.a_[i];
        return a;
    }
    friend Mat operator-(Mat a, const Mat& b) {
        for (std::size_t i = 0; i < a.a_.size(); ++i) a.a_[i] -= b.a_[i];
        return a;
    }

    std::vector<T> apply(const std::vector<T>& x) const {
        std::vector<T> y(rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) y[i] += operator()(i, j) * x[j];
        return y;
    }

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<T> a_;
};

// Exact determinant by Laplace expansion memoized on column subsets;
// exponential in size, capped at 12.
MultiPoly det(const Mat<MultiPoly>& m);
Rat det(const Mat<Rat>& m);

// Row echelon form over the rationals with leftmost pivoting and full
// back-substitution (RREF).  Rows are the echelon basis of the row space.
struct Echelon {
    std::vector<std::vector<Rat>> rows;
    std::vector<int> pivot_cols;  // ascending, one per row
    int rank() const { return static_cast<int>(rows.size()); }
};

Echelon rref(std::vector<std::vector<Rat>> rows);

// Eliminates the pivot coordinates of v against the echelon rows.
std::vector<Rat> reduce_against(const Echelon& e, std::vector<Rat> v);

// Exact solve of a square nonsingular system; throws RankError with the rank.
std::vector<Rat> solve_exact(const Mat<Rat>& a, const std::vector<Rat>& b);

// Complex double solvers (square solve / overdetermined least squares).
using Cd = std::complex<double>;
std::vector<Cd> solve_complex(const Mat<Cd>& a, const std::vector<Cd>& b);
struct LstSqResult {
    std::vector<Cd> x;
    double residual;  // |Ax - b|_2
    double condition;
};
LstSqResult lstsq_complex(const Mat<Cd>& a, const std::vector<Cd>& b);

}  // namespace qtoda
