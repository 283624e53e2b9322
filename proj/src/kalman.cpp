#include "gainlab/kalman.hpp"

#include <string>

#include "gainlab/errors.hpp"

namespace gainlab {

namespace {

Matrix require_finite(Matrix m, const char* what) {
    if (!m.all_finite()) throw InvalidParameter(std::string(what) + ": non-finite entry");
    return m;
}

}  // namespace

ObservationOperator::ObservationOperator(Matrix h) : matrix_(require_finite(std::move(h), "ObservationOperator")) {}

GainMatrix::GainMatrix(Matrix k) : matrix_(require_finite(std::move(k), "GainMatrix")) {}

GainMatrix GainMatrix::zero(std::size_t state_dim, std::size_t obs_dim) {
    return GainMatrix(Matrix(state_dim, obs_dim));
}

namespace {

const ObservationOperator& checked(const ObservationOperator& h, const CovarianceMatrix& prior,
                                   const CovarianceMatrix& noise) {
    if (h.state_dim() != prior.dim() || h.obs_dim() != noise.dim()) {
        throw DimensionMismatch("FilterProblem: H is " + std::to_string(h.obs_dim()) + "x" +
                                std::to_string(h.state_dim()) + " but P^f is " + std::to_string(prior.dim()) +
                                "x" + std::to_string(prior.dim()) + " and R is " + std::to_string(noise.dim()) +
                                "x" + std::to_string(noise.dim()));
    }
    return h;
}

}  // namespace

FilterProblem::FilterProblem(CovarianceMatrix prior, ObservationOperator obs_op, CovarianceMatrix obs_noise)
    : prior_(std::move(prior)),
      obs_op_(checked(obs_op, prior_, obs_noise)),
      obs_noise_(std::move(obs_noise)),
      cross_(prior_.matrix() * obs_op_.matrix().transpose()),
      innovation_(symmetrize(obs_op_.matrix() * cross_ + obs_noise_.matrix())) {}

void require_gain_shape(const FilterProblem& p, const Matrix& k) {
    if (k.rows() != p.state_dim() || k.cols() != p.obs_dim()) {
        throw DimensionMismatch("gain is " + std::to_string(k.rows()) + "x" + std::to_string(k.cols()) +
                                ", expected " + std::to_string(p.state_dim()) + "x" +
                                std::to_string(p.obs_dim()));
    }
}

CovarianceMatrix innovation_covariance(const FilterProblem& p) { return p.innovation(); }

GainMatrix analytic_gain(const FilterProblem& p) {
    // S is symmetric, so S·X = H·P^f = (P^f·Hᵀ)ᵀ gives X = Kᵀ.
    return GainMatrix(solve(p.innovation(), p.cross_covariance().transpose()).transpose());
}

CovarianceMatrix joseph_update(const FilterProblem& p, const GainMatrix& k) {
    require_gain_shape(p, k.matrix());
    const Matrix& gain = k.matrix();
    const Matrix residual_map = Matrix::identity(p.state_dim()) - gain * p.obs_op().matrix();
    Matrix updated = residual_map * p.prior().matrix() * residual_map.transpose();
    updated += gain * p.obs_noise().matrix() * gain.transpose();
    return CovarianceMatrix(symmetrize(updated));
}

}  // namespace gainlab
