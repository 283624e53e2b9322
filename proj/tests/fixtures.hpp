#pragma once

// Shared generators and independent oracles for the test suites. The oracles
// go through Eigen or brute-force expansion, never through gainlab's own
// Cholesky path.

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "gainlab/experiment.hpp"
#include "gainlab/kalman.hpp"
#include "gainlab/matrix.hpp"

namespace gainlab::testing {

inline Eigen::MatrixXd to_eigen(const Matrix& m) {
    Eigen::MatrixXd e(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) e(i, j) = m(i, j);
    return e;
}

inline Matrix from_eigen(const Eigen::MatrixXd& e) {
    Matrix m(static_cast<std::size_t>(e.rows()), static_cast<std::size_t>(e.cols()));
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) m(i, j) = e(i, j);
    return m;
}

/// Laplace cofactor expansion; exponential cost, fine for dim ≤ 7.
inline double cofactor_det(const std::vector<std::vector<double>>& a) {
    const std::size_t n = a.size();
    if (n == 1) return a[0][0];
    double sum = 0.0;
    for (std::size_t col = 0; col < n; ++col) {
        std::vector<std::vector<double>> minor;
        for (std::size_t i = 1; i < n; ++i) {
            std::vector<double> row;
            for (std::size_t j = 0; j < n; ++j)
                if (j != col) row.push_back(a[i][j]);
            minor.push_back(row);
        }
        const double sign = col % 2 == 0 ? 1.0 : -1.0;
        sum += sign * a[0][col] * cofactor_det(minor);
    }
    return sum;
}

inline double cofactor_det(const Matrix& m) {
    std::vector<std::vector<double>> a(m.rows(), std::vector<double>(m.cols()));
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) a[i][j] = m(i, j);
    return cofactor_det(a);
}

inline Eigen::VectorXd eigenvalues(const Matrix& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(to_eigen(m));
    return solver.eigenvalues();
}

/// Partial-pivot LU log|det| through Eigen.
inline double lu_log_abs_det(const Matrix& m) {
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(to_eigen(m));
    const Eigen::MatrixXd u = lu.matrixLU().triangularView<Eigen::Upper>();
    double sum = 0.0;
    for (Eigen::Index i = 0; i < u.rows(); ++i) sum += std::log(std::abs(u(i, i)));
    return sum;
}

inline Matrix lu_inverse(const Matrix& m) { return from_eigen(to_eigen(m).inverse()); }

/// Seeded random problem with n, m ∈ [1, max_dim] and cond ∈ {1, 10, 100}.
struct RandomInstance {
    std::uint64_t seed;
    std::size_t state_dim;
    std::size_t obs_dim;
    double cond;
    FilterProblem problem;
};

inline RandomInstance random_instance(std::uint64_t seed, std::size_t max_dim) {
    constexpr double kConds[] = {1.0, 10.0, 100.0};
    const std::size_t n = 1 + trial_seed(seed, 101) % max_dim;
    const std::size_t m = 1 + trial_seed(seed, 102) % max_dim;
    const double cond = kConds[trial_seed(seed, 103) % 3];
    return {seed, n, m, cond, generate_problem(n, m, cond, seed)};
}

/// Entries drawn N(0, scale²) from the given seed.
inline Matrix random_direction(std::size_t rows, std::size_t cols, std::uint64_t seed, double scale = 1.0) {
    return scale * random_gaussian(rows, cols, seed);
}

/// Random matrix rescaled to the given Frobenius norm.
inline Matrix random_with_norm(std::size_t rows, std::size_t cols, std::uint64_t seed, double norm) {
    Matrix d = random_gaussian(rows, cols, seed);
    return (norm / frobenius_norm(d)) * d;
}

inline FilterProblem scalar_problem(double pf, double h, double r) {
    return FilterProblem(CovarianceMatrix(Matrix::from_rows({{pf}})), ObservationOperator(Matrix::from_rows({{h}})),
                         CovarianceMatrix(Matrix::from_rows({{r}})));
}

inline GainMatrix scalar_gain(double k) { return GainMatrix(Matrix::from_rows({{k}})); }

}  // namespace gainlab::testing
