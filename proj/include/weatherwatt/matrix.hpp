#pragma once

#include <cstddef>
#include <initializer_list>
#include <vector>

namespace ww {

/// Dense row-major matrix of 64-bit reals. Construction from data
/// validates that every entry is finite.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols);
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);
    Matrix(std::initializer_list<std::initializer_list<double>> rows);

    static Matrix identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    const std::vector<double>& data() const { return data_; }

    bool operator==(const Matrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

Matrix transpose(const Matrix& a);

/// Standard product; throws DimensionError when a.cols != b.rows.
Matrix matmul(const Matrix& a, const Matrix& b);

/// Gauss-Jordan elimination with partial pivoting. Throws
/// SingularMatrixError when a pivot magnitude drops below 1e-10.
Matrix invert(const Matrix& a);

/// theta = (X^T X)^-1 X^T y. x is n x p with n >= p, y is n x 1.
Matrix solve_normal(const Matrix& x, const Matrix& y);

/// Pivot magnitude below this is treated as singular.
inline constexpr double kSingularPivotTolerance = 1e-10;

} // namespace ww
