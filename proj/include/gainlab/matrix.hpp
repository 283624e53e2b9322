#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <iosfwd>
#include <span>
#include <vector>

namespace gainlab {

/// Dense real matrix with row-major storage.
///
/// Shapes are fixed at construction and always have at least one row and one
/// column. Arithmetic operators check shapes and throw DimensionMismatch.
class Matrix {
public:
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);

    /// Builds a matrix from nested row lists; every row must have the same length.
    static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);
    static Matrix identity(std::size_t n);
    static Matrix diagonal(std::span<const double> values);
    static Matrix diagonal(std::initializer_list<double> values);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool is_square() const noexcept { return rows_ == cols_; }

    double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }

    std::span<double> values() noexcept { return data_; }
    std::span<const double> values() const noexcept { return data_; }

    bool all_finite() const noexcept;
    Matrix transpose() const;

    Matrix& operator+=(const Matrix& other);
    Matrix& operator-=(const Matrix& other);
    Matrix& operator*=(double s) noexcept;

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_;
    std::size_t cols_;
    std::vector<double> data_;
};

Matrix operator+(Matrix a, const Matrix& b);
Matrix operator-(Matrix a, const Matrix& b);
Matrix operator-(Matrix a);
Matrix operator*(const Matrix& a, const Matrix& b);
Matrix operator*(double s, Matrix a);
Matrix operator*(Matrix a, double s);

std::ostream& operator<<(std::ostream& os, const Matrix& m);

double frobenius_norm(const Matrix& m);
/// Sum of elementwise products, tr(aᵀb).
double frobenius_inner(const Matrix& a, const Matrix& b);
double max_abs_entry(const Matrix& m);
/// ‖a − b‖_F / max(‖b‖_F, tiny); b is the reference.
double relative_frobenius_error(const Matrix& a, const Matrix& b);

/// Sum of the diagonal. Throws DimensionMismatch for non-square input.
double trace(const Matrix& m);

/// (m + mᵀ)/2. Throws DimensionMismatch for non-square input.
Matrix symmetrize(const Matrix& m);

inline constexpr double kSymmetryTol = 1e-9;
inline constexpr double kPivotFloor = 1e-12;

/// True when |m(i,j) − m(j,i)| ≤ kSymmetryTol·max(1, |m(i,j)|) for every pair.
bool is_symmetric(const Matrix& m, double tol = kSymmetryTol);

/// Lower-triangular Cholesky factor L with L·Lᵀ = m.
struct LowerTriangularFactor {
    Matrix lower;
};

/// Factorizes a symmetric matrix. Throws NotPositiveDefinite when the matrix
/// is asymmetric beyond kSymmetryTol or a pivot falls to kPivotFloor or below.
LowerTriangularFactor cholesky(const Matrix& m);

/// Solves (L·Lᵀ)·X = B for X.
Matrix cholesky_solve(const LowerTriangularFactor& factor, const Matrix& rhs);

/// Symmetric positive-definite matrix, validated once at construction.
///
/// The Cholesky factor computed during validation is kept and reused for
/// determinants, inverses and solves.
class CovarianceMatrix {
public:
    explicit CovarianceMatrix(Matrix m);

    std::size_t dim() const noexcept { return matrix_.rows(); }
    const Matrix& matrix() const noexcept { return matrix_; }
    const LowerTriangularFactor& factor() const noexcept { return factor_; }
    double operator()(std::size_t i, std::size_t j) const noexcept { return matrix_(i, j); }

private:
    Matrix matrix_;
    LowerTriangularFactor factor_;
};

LowerTriangularFactor cholesky(const CovarianceMatrix& m);

/// log det(m) = 2·Σ log(L_ii), computed from the stored factor.
double log_det(const CovarianceMatrix& m);
double det(const CovarianceMatrix& m);
CovarianceMatrix inverse(const CovarianceMatrix& m);
/// Solves m·X = rhs through the stored factor.
Matrix solve(const CovarianceMatrix& m, const Matrix& rhs);

/// Σ log m_ii. Hadamard's inequality gives log_det(m) ≤ log_diagonal_product(m).
double log_diagonal_product(const CovarianceMatrix& m);

/// Matrix of independent standard-normal entries drawn from a generator seeded with `seed`.
Matrix random_gaussian(std::size_t rows, std::size_t cols, std::uint64_t seed);

/// Q·Λ·Qᵀ with Q the orthogonal QR factor of a seeded Gaussian matrix and Λ
/// log-uniformly spaced on [1/√cond_target, √cond_target].
CovarianceMatrix random_spd(std::size_t dim, std::uint64_t seed, double cond_target);

}  // namespace gainlab
