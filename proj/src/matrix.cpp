#include "gainlab/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <random>
#include <string>

#include "gainlab/errors.hpp"

namespace gainlab {

namespace {

std::string shape(const Matrix& m) {
    return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

void require_same_shape(const Matrix& a, const Matrix& b, const char* op) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw DimensionMismatch(std::string(op) + ": " + shape(a) + " vs " + shape(b));
    }
}

void require_square(const Matrix& m, const char* op) {
    if (!m.is_square()) {
        throw DimensionMismatch(std::string(op) + ": expected square matrix, got " + shape(m));
    }
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {
    if (rows == 0 || cols == 0) {
        throw DimensionMismatch("Matrix: rows and cols must be positive");
    }
}

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    if (rows.size() == 0 || rows.begin()->size() == 0) {
        throw DimensionMismatch("Matrix::from_rows: empty input");
    }
    Matrix m(rows.size(), rows.begin()->size());
    std::size_t i = 0;
    for (const auto& row : rows) {
        if (row.size() != m.cols()) {
            throw DimensionMismatch("Matrix::from_rows: ragged rows");
        }
        std::copy(row.begin(), row.end(), m.data_.begin() + static_cast<std::ptrdiff_t>(i * m.cols()));
        ++i;
    }
    return m;
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::diagonal(std::span<const double> values) {
    Matrix m(values.size(), values.size());
    for (std::size_t i = 0; i < values.size(); ++i) m(i, i) = values[i];
    return m;
}

Matrix Matrix::diagonal(std::initializer_list<double> values) {
    return diagonal(std::span<const double>(values.begin(), values.size()));
}

bool Matrix::all_finite() const noexcept {
    return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

Matrix Matrix::transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

Matrix& Matrix::operator+=(const Matrix& other) {
    require_same_shape(*this, other, "operator+");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += other.data_[k];
    return *this;
}

Matrix& Matrix::operator-=(const Matrix& other) {
    require_same_shape(*this, other, "operator-");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= other.data_[k];
    return *this;
}

Matrix& Matrix::operator*=(double s) noexcept {
    for (double& v : data_) v *= s;
    return *this;
}

Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
Matrix operator-(Matrix a) { return a *= -1.0; }
Matrix operator*(double s, Matrix a) { return a *= s; }
Matrix operator*(Matrix a, double s) { return a *= s; }

Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) {
        throw DimensionMismatch("operator*: " + shape(a) + " times " + shape(b));
    }
    Matrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
        }
    }
    return c;
}

std::ostream& operator<<(std::ostream& os, const Matrix& m) {
    os << '[';
    for (std::size_t i = 0; i < m.rows(); ++i) {
        os << (i == 0 ? "[" : " [");
        for (std::size_t j = 0; j < m.cols(); ++j) {
            if (j > 0) os << ", ";
            os << m(i, j);
        }
        os << ']';
        if (i + 1 < m.rows()) os << '\n';
    }
    return os << ']';
}

double frobenius_norm(const Matrix& m) {
    return std::sqrt(frobenius_inner(m, m));
}

double frobenius_inner(const Matrix& a, const Matrix& b) {
    require_same_shape(a, b, "frobenius_inner");
    double sum = 0.0;
    const auto av = a.values();
    const auto bv = b.values();
    for (std::size_t k = 0; k < av.size(); ++k) sum += av[k] * bv[k];
    return sum;
}

double max_abs_entry(const Matrix& m) {
    double best = 0.0;
    for (double v : m.values()) best = std::max(best, std::abs(v));
    return best;
}

double relative_frobenius_error(const Matrix& a, const Matrix& b) {
    const double ref = std::max(frobenius_norm(b), std::numeric_limits<double>::min());
    return frobenius_norm(a - b) / ref;
}

double trace(const Matrix& m) {
    require_square(m, "trace");
    double sum = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i) sum += m(i, i);
    return sum;
}

Matrix symmetrize(const Matrix& m) {
    require_square(m, "symmetrize");
    Matrix s(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) s(i, j) = 0.5 * (m(i, j) + m(j, i));
    return s;
}

bool is_symmetric(const Matrix& m, double tol) {
    if (!m.is_square()) return false;
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = i + 1; j < m.cols(); ++j) {
            if (std::abs(m(i, j) - m(j, i)) > tol * std::max(1.0, std::abs(m(i, j)))) return false;
        }
    }
    return true;
}

LowerTriangularFactor cholesky(const Matrix& m) {
    require_square(m, "cholesky");
    if (!m.all_finite()) throw NotPositiveDefinite("cholesky: non-finite entry");
    if (!is_symmetric(m)) throw NotPositiveDefinite("cholesky: matrix is not symmetric");

    const std::size_t n = m.rows();
    Matrix l(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double pivot = m(j, j);
        for (std::size_t k = 0; k < j; ++k) pivot -= l(j, k) * l(j, k);
        if (!(pivot > kPivotFloor)) {
            throw NotPositiveDefinite("cholesky: pivot " + std::to_string(j) + " = " +
                                      std::to_string(pivot) + " is not positive");
        }
        const double ljj = std::sqrt(pivot);
        l(j, j) = ljj;
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = m(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
            l(i, j) = s / ljj;
        }
    }
    return {std::move(l)};
}

Matrix cholesky_solve(const LowerTriangularFactor& factor, const Matrix& rhs) {
    const Matrix& l = factor.lower;
    const std::size_t n = l.rows();
    if (rhs.rows() != n) {
        throw DimensionMismatch("cholesky_solve: factor " + shape(l) + ", rhs " + shape(rhs));
    }
    Matrix x = rhs;
    for (std::size_t c = 0; c < x.cols(); ++c) {
        // L·y = b
        for (std::size_t i = 0; i < n; ++i) {
            double s = x(i, c);
            for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * x(k, c);
            x(i, c) = s / l(i, i);
        }
        // Lᵀ·x = y
        for (std::size_t ii = n; ii-- > 0;) {
            double s = x(ii, c);
            for (std::size_t k = ii + 1; k < n; ++k) s -= l(k, ii) * x(k, c);
            x(ii, c) = s / l(ii, ii);
        }
    }
    return x;
}

CovarianceMatrix::CovarianceMatrix(Matrix m) : matrix_(std::move(m)), factor_(cholesky(matrix_)) {}

LowerTriangularFactor cholesky(const CovarianceMatrix& m) { return m.factor(); }

double log_det(const CovarianceMatrix& m) {
    const Matrix& l = m.factor().lower;
    double sum = 0.0;
    for (std::size_t i = 0; i < l.rows(); ++i) sum += std::log(l(i, i));
    return 2.0 * sum;
}

double det(const CovarianceMatrix& m) { return std::exp(log_det(m)); }

CovarianceMatrix inverse(const CovarianceMatrix& m) {
    return CovarianceMatrix(symmetrize(cholesky_solve(m.factor(), Matrix::identity(m.dim()))));
}

Matrix solve(const CovarianceMatrix& m, const Matrix& rhs) { return cholesky_solve(m.factor(), rhs); }

double log_diagonal_product(const CovarianceMatrix& m) {
    double sum = 0.0;
    for (std::size_t i = 0; i < m.dim(); ++i) sum += std::log(m(i, i));
    return sum;
}

Matrix random_gaussian(std::size_t rows, std::size_t cols, std::uint64_t seed) {
    std::mt19937_64 engine(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix g(rows, cols);
    for (double& v : g.values()) v = normal(engine);
    return g;
}

namespace {

// Householder QR of a square matrix; returns Q normalized so that R has a
// positive diagonal.
Matrix orthogonal_factor(Matrix r) {
    const std::size_t n = r.rows();
    Matrix q = Matrix::identity(n);
    std::vector<double> v(n);
    for (std::size_t k = 0; k + 1 < n; ++k) {
        double norm_x = 0.0;
        for (std::size_t i = k; i < n; ++i) norm_x += r(i, k) * r(i, k);
        norm_x = std::sqrt(norm_x);
        if (norm_x == 0.0) continue;
        const double alpha = r(k, k) > 0.0 ? -norm_x : norm_x;
        std::fill(v.begin(), v.end(), 0.0);
        for (std::size_t i = k; i < n; ++i) v[i] = r(i, k);
        v[k] -= alpha;
        double norm_v = 0.0;
        for (std::size_t i = k; i < n; ++i) norm_v += v[i] * v[i];
        norm_v = std::sqrt(norm_v);
        if (norm_v == 0.0) continue;
        for (std::size_t i = k; i < n; ++i) v[i] /= norm_v;

        for (std::size_t j = 0; j < n; ++j) {
            double dot = 0.0;
            for (std::size_t i = k; i < n; ++i) dot += v[i] * r(i, j);
            for (std::size_t i = k; i < n; ++i) r(i, j) -= 2.0 * v[i] * dot;
        }
        for (std::size_t i = 0; i < n; ++i) {
            double dot = 0.0;
            for (std::size_t j = k; j < n; ++j) dot += q(i, j) * v[j];
            for (std::size_t j = k; j < n; ++j) q(i, j) -= 2.0 * dot * v[j];
        }
    }
    for (std::size_t k = 0; k < n; ++k) {
        if (r(k, k) < 0.0) {
            for (std::size_t i = 0; i < n; ++i) q(i, k) = -q(i, k);
        }
    }
    return q;
}

}  // namespace

CovarianceMatrix random_spd(std::size_t dim, std::uint64_t seed, double cond_target) {
    if (dim == 0) throw InvalidParameter("random_spd: dim must be positive");
    if (!(cond_target >= 1.0) || !std::isfinite(cond_target)) {
        throw InvalidParameter("random_spd: cond_target must be a finite value >= 1");
    }
    const Matrix q = orthogonal_factor(random_gaussian(dim, dim, seed));

    std::vector<double> eigenvalues(dim, 1.0);
    if (dim > 1) {
        const double half_log = 0.5 * std::log(cond_target);
        for (std::size_t i = 0; i < dim; ++i) {
            const double t = static_cast<double>(i) / static_cast<double>(dim - 1);
            eigenvalues[i] = std::exp(-half_log + 2.0 * half_log * t);
        }
    }

    Matrix scaled = q;
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < dim; ++j) scaled(i, j) *= eigenvalues[j];
    return CovarianceMatrix(symmetrize(scaled * q.transpose()));
}

}  // namespace gainlab
