#pragma once

#include <cstddef>
#include <vector>

namespace debtlab {

/// Small dense row-major matrix. Sized for this project's problems
/// (design matrices up to ~10^4 x ~40, correlation matrices up to ~30x30).
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double value = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, value) {}

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

    const double* row_ptr(std::size_t r) const { return data_.data() + r * cols_; }
    double* row_ptr(std::size_t r) { return data_.data() + r * cols_; }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

std::vector<double> matvec(const Matrix& a, const std::vector<double>& x);
Matrix matmul(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& a);

struct LeastSquares {
    std::vector<double> coef;
    bool rank_deficient = false;
    std::size_t deficient_col = 0;  // valid when rank_deficient
};

/// Linear least squares min ||A x - y|| via Householder QR (no pivoting).
/// A column whose R diagonal falls below rank_tol * max|R_jj| marks the
/// system rank deficient; no solution is produced in that case.
LeastSquares qr_least_squares(Matrix a, std::vector<double> y, double rank_tol = 1e-10);

struct SymEigen {
    std::vector<double> values;  // descending
    Matrix vectors;              // column j pairs with values[j]; orthonormal
};

/// Symmetric eigendecomposition by cyclic Jacobi rotations. Converges when
/// the off-diagonal Frobenius norm drops below off_tol.
SymEigen jacobi_eigen(Matrix a, double off_tol = 1e-12, int max_sweeps = 100);

/// Inverse standard-normal CDF (Acklam's rational approximation, |eps| < 1.2e-9).
double inverse_normal_cdf(double p);

double mean(const std::vector<double>& v);
double variance(const std::vector<double>& v);  // population variance (divides by n)

}  // namespace debtlab
