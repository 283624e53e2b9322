#pragma once

#include <cstddef>

#include "gainlab/matrix.hpp"

namespace gainlab {

/// Linear observation operator H mapping state space (n) to observation space (m).
class ObservationOperator {
public:
    explicit ObservationOperator(Matrix h);

    std::size_t obs_dim() const noexcept { return matrix_.rows(); }
    std::size_t state_dim() const noexcept { return matrix_.cols(); }
    const Matrix& matrix() const noexcept { return matrix_; }

private:
    Matrix matrix_;
};

/// Gain K of shape state_dim × obs_dim. Any finite matrix is a valid gain.
class GainMatrix {
public:
    explicit GainMatrix(Matrix k);
    static GainMatrix zero(std::size_t state_dim, std::size_t obs_dim);

    std::size_t state_dim() const noexcept { return matrix_.rows(); }
    std::size_t obs_dim() const noexcept { return matrix_.cols(); }
    const Matrix& matrix() const noexcept { return matrix_; }

    friend bool operator==(const GainMatrix&, const GainMatrix&) = default;

private:
    Matrix matrix_;
};

/// The triple (P^f, H, R) of one analysis step, with consistent shapes.
class FilterProblem {
public:
    FilterProblem(CovarianceMatrix prior, ObservationOperator obs_op, CovarianceMatrix obs_noise);

    const CovarianceMatrix& prior() const noexcept { return prior_; }
    const ObservationOperator& obs_op() const noexcept { return obs_op_; }
    const CovarianceMatrix& obs_noise() const noexcept { return obs_noise_; }
    std::size_t state_dim() const noexcept { return prior_.dim(); }
    std::size_t obs_dim() const noexcept { return obs_noise_.dim(); }

    /// P^f·Hᵀ (n × m).
    const Matrix& cross_covariance() const noexcept { return cross_; }
    /// H·P^f·Hᵀ + R, symmetrized and validated.
    const CovarianceMatrix& innovation() const noexcept { return innovation_; }

private:
    CovarianceMatrix prior_;
    ObservationOperator obs_op_;
    CovarianceMatrix obs_noise_;
    Matrix cross_;
    CovarianceMatrix innovation_;
};

/// Throws DimensionMismatch unless k is state_dim × obs_dim for p.
void require_gain_shape(const FilterProblem& p, const Matrix& k);

CovarianceMatrix innovation_covariance(const FilterProblem& p);

/// K = P^f·Hᵀ·(H·P^f·Hᵀ + R)^{-1}, obtained by solving S·Kᵀ = H·P^f.
GainMatrix analytic_gain(const FilterProblem& p);

/// Joseph-form update (I − K·H)·P^f·(I − K·H)ᵀ + K·R·Kᵀ, valid for any gain.
///
/// The result is symmetrized before validation; a numerically indefinite
/// result throws NotPositiveDefinite.
CovarianceMatrix joseph_update(const FilterProblem& p, const GainMatrix& k);

}  // namespace gainlab
