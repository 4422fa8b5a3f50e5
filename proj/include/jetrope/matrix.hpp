#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "jetrope/complex.hpp"

namespace jetrope {

// Dense row-major matrix. Used for the small per-frequency blocks (m x m
// complex, 2m x 2m realified); nothing here is tuned for large sizes.
template <typename T>
class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

    static DenseMatrix identity(std::size_t n) {
        DenseMatrix out(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            out(i, i) = T(1.0);
        }
        return out;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const T& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<const T> data() const { return data_; }
    std::span<T> data() { return data_; }

    friend DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b) {
        if (a.cols_ != b.rows_) {
            throw std::invalid_argument("matrix product: inner dimensions differ");
        }
        DenseMatrix out(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i) {
            for (std::size_t k = 0; k < a.cols_; ++k) {
                const T aik = a(i, k);
                for (std::size_t j = 0; j < b.cols_; ++j) {
                    out(i, j) += aik * b(k, j);
                }
            }
        }
        return out;
    }

    friend DenseMatrix operator-(const DenseMatrix& a, const DenseMatrix& b) {
        if (a.rows_ != b.rows_ || a.cols_ != b.cols_) {
            throw std::invalid_argument("matrix difference: shapes differ");
        }
        DenseMatrix out = a;
        for (std::size_t i = 0; i < out.data_.size(); ++i) {
            out.data_[i] -= b.data_[i];
        }
        return out;
    }

    DenseMatrix transposed() const {
        DenseMatrix out(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i) {
            for (std::size_t j = 0; j < cols_; ++j) {
                out(j, i) = (*this)(i, j);
            }
        }
        return out;
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<T> data_;
};

/// m x m complex matrix: generators and exponentials of one Jordan block.
using ComplexMatrix = DenseMatrix<Complex>;
/// 2m x 2m real matrix obtained by realification.
using RealMatrix = DenseMatrix<double>;

double frobenius_norm(const ComplexMatrix& m);
double frobenius_norm(const RealMatrix& m);

/// y = M x for a real matrix and a real vector.
std::vector<double> multiply(const RealMatrix& m, std::span<const double> x);

} // namespace jetrope
