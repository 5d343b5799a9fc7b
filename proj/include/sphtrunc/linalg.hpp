#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace sphtrunc {

/// Dense row-major matrix.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);

    static Matrix identity(std::size_t n);

    [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
    [[nodiscard]] std::size_t cols() const noexcept { return cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    [[nodiscard]] std::span<const double> data() const noexcept { return data_; }

    [[nodiscard]] Matrix transposed() const;

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

Matrix operator*(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);

/// Square matrix whose writes go to both triangles, so S(i,j) == S(j,i) exactly.
class SymMatrix {
public:
    SymMatrix() = default;
    explicit SymMatrix(std::size_t dim);

    /// Symmetrizes (m + mᵀ)/2; m must be square.
    static SymMatrix from_dense(const Matrix& m);
    static SymMatrix diagonal(std::span<const double> diag);

    [[nodiscard]] std::size_t dim() const noexcept { return m_.rows(); }
    double operator()(std::size_t i, std::size_t j) const { return m_(i, j); }
    void set(std::size_t i, std::size_t j, double value);

    [[nodiscard]] const Matrix& dense() const noexcept { return m_; }

private:
    Matrix m_;
};

/// Eigen-decomposition S = R diag(values) Rᵀ, values ascending, R's columns the eigenvectors.
struct EigDecomp {
    std::vector<double> values;
    Matrix vectors;
};

/// Cyclic Jacobi eigensolver. Stops once the off-diagonal Frobenius norm is below
/// 1e-13 times the Frobenius norm of the input.
EigDecomp eigh(const SymMatrix& s);

/// R diag(values) Rᵀ, symmetrized.
SymMatrix compose(std::span<const double> values, const Matrix& r);

/// Maximum absolute row sum.
double inf_norm(const Matrix& m);

double frobenius_norm(const Matrix& m);

/// max |a_ij - b_ij|
double max_abs_diff(const Matrix& a, const Matrix& b);

}  // namespace sphtrunc
