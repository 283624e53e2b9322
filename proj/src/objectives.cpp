#include "gainlab/objectives.hpp"

#include <cmath>
#include <exception>
#include <numbers>
#include <string>
#include <vector>

#include "gainlab/errors.hpp"

namespace gainlab {

std::string_view to_string(ObjectiveKind kind) noexcept {
    switch (kind) {
        case ObjectiveKind::TotalVariance: return "trace";
        case ObjectiveKind::LogGeneralizedVariance: return "logdet";
        case ObjectiveKind::DifferentialEntropy: return "entropy";
    }
    return "unknown";
}

std::optional<ObjectiveKind> parse_objective(std::string_view name) noexcept {
    for (ObjectiveKind kind : kAllObjectives) {
        if (to_string(kind) == name) return kind;
    }
    return std::nullopt;
}

GradientMatrix::GradientMatrix(Matrix g) : matrix_(std::move(g)) {
    if (!matrix_.all_finite()) throw InvalidParameter("GradientMatrix: non-finite entry");
}

double total_variance(const FilterProblem& p, const GainMatrix& k) { return trace(joseph_update(p, k).matrix()); }

double log_generalized_variance(const FilterProblem& p, const GainMatrix& k) { return log_det(joseph_update(p, k)); }

double entropy_offset(std::size_t dim) {
    return 0.5 * static_cast<double>(dim) * std::log(2.0 * std::numbers::pi * std::numbers::e);
}

double differential_entropy(const FilterProblem& p, const GainMatrix& k) {
    return entropy_offset(p.state_dim()) + 0.5 * log_generalized_variance(p, k);
}

double evaluate_objective(const FilterProblem& p, ObjectiveKind kind, const GainMatrix& k) {
    switch (kind) {
        case ObjectiveKind::TotalVariance: return total_variance(p, k);
        case ObjectiveKind::LogGeneralizedVariance: return log_generalized_variance(p, k);
        case ObjectiveKind::DifferentialEntropy: return differential_entropy(p, k);
    }
    throw InvalidParameter("evaluate_objective: unknown objective");
}

Matrix stationarity_matrix(const FilterProblem& p, const GainMatrix& k) {
    require_gain_shape(p, k.matrix());
    return k.matrix() * p.innovation().matrix() - p.cross_covariance();
}

Matrix analysis_cov_differential(const FilterProblem& p, const GainMatrix& k, const GainMatrix& dk) {
    require_gain_shape(p, k.matrix());
    require_gain_shape(p, dk.matrix());
    const Matrix& gain = k.matrix();
    const Matrix& d = dk.matrix();
    const Matrix& h = p.obs_op().matrix();
    const Matrix& pf = p.prior().matrix();
    const Matrix& r = p.obs_noise().matrix();
    const Matrix& pf_ht = p.cross_covariance();
    const Matrix h_pf = h * pf;
    const Matrix h_pf_ht = h * pf_ht;
    const Matrix gain_t = gain.transpose();
    const Matrix d_t = d.transpose();

    Matrix out = -(pf_ht * d_t);
    out -= d * h_pf;
    out += d * h_pf_ht * gain_t;
    out += gain * h_pf_ht * d_t;
    out += d * r * gain_t;
    out += gain * r * d_t;
    return out;
}

double directional_logdet_differential(const FilterProblem& p, const GainMatrix& k, const GainMatrix& dk) {
    const CovarianceMatrix analysis = joseph_update(p, k);
    return trace(solve(analysis, analysis_cov_differential(p, k, dk)));
}

GradientMatrix logdet_gradient(const FilterProblem& p, const GainMatrix& k) {
    const CovarianceMatrix analysis = joseph_update(p, k);
    return GradientMatrix(solve(analysis, 2.0 * stationarity_matrix(p, k)));
}

GradientMatrix trace_gradient(const FilterProblem& p, const GainMatrix& k) {
    return GradientMatrix(2.0 * stationarity_matrix(p, k));
}

GradientMatrix objective_gradient(const FilterProblem& p, ObjectiveKind kind, const GainMatrix& k) {
    switch (kind) {
        case ObjectiveKind::TotalVariance: return trace_gradient(p, k);
        case ObjectiveKind::LogGeneralizedVariance: return logdet_gradient(p, k);
        case ObjectiveKind::DifferentialEntropy: return GradientMatrix(0.5 * logdet_gradient(p, k).matrix());
    }
    throw InvalidParameter("objective_gradient: unknown objective");
}

namespace {

// Solves L·X = B for lower-triangular L.
Matrix forward_solve(const Matrix& l, const Matrix& b) {
    Matrix x = b;
    const std::size_t n = l.rows();
    for (std::size_t c = 0; c < x.cols(); ++c) {
        for (std::size_t i = 0; i < n; ++i) {
            double s = x(i, c);
            for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * x(k, c);
            x(i, c) = s / l(i, i);
        }
    }
    return x;
}

// log det(I + e) for symmetric e with I + e positive definite. Pivots are
// carried as offsets from one so that small perturbations keep full accuracy.
double log_det_unit_shift(const Matrix& e) {
    const std::size_t n = e.rows();
    Matrix l(n, n);
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        double offset = e(j, j);
        for (std::size_t k = 0; k < j; ++k) offset -= l(j, k) * l(j, k);
        const double pivot = 1.0 + offset;
        if (!(pivot > kPivotFloor)) {
            throw NotPositiveDefinite("objective_change: updated covariance is not positive definite (pivot " +
                                      std::to_string(j) + ")");
        }
        const double ljj = std::sqrt(pivot);
        l(j, j) = ljj;
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = e(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
            l(i, j) = s / ljj;
        }
        sum += std::log1p(offset);
    }
    return sum;
}

}  // namespace

double objective_change(const FilterProblem& p, ObjectiveKind kind, const GainMatrix& k, const Matrix& step) {
    require_gain_shape(p, step);
    if (!step.all_finite()) throw InvalidParameter("objective_change: non-finite step");
    const Matrix g = stationarity_matrix(p, k);
    const Matrix step_s = step * p.innovation().matrix();

    if (kind == ObjectiveKind::TotalVariance) {
        return 2.0 * frobenius_inner(g, step) + frobenius_inner(step_s, step);
    }

    Matrix change = step * g.transpose();
    change += g * step.transpose();
    change += step_s * step.transpose();
    change = symmetrize(change);

    const CovarianceMatrix analysis = joseph_update(p, k);
    const Matrix& l = analysis.factor().lower;
    const Matrix half = forward_solve(l, change);
    const Matrix whitened = symmetrize(forward_solve(l, half.transpose()));
    const double logdet_change = log_det_unit_shift(whitened);
    return kind == ObjectiveKind::DifferentialEntropy ? 0.5 * logdet_change : logdet_change;
}

double finite_difference_step(double entry) noexcept { return 1e-6 * (1.0 + std::abs(entry)); }

namespace {

double central_difference(const FilterProblem& p, const Matrix& k, ObjectiveKind objective, std::size_t i,
                          std::size_t j) {
    const double h = finite_difference_step(k(i, j));
    Matrix plus = k;
    Matrix minus = k;
    plus(i, j) += h;
    minus(i, j) -= h;
    const double f_plus = evaluate_objective(p, objective, GainMatrix(std::move(plus)));
    const double f_minus = evaluate_objective(p, objective, GainMatrix(std::move(minus)));
    return (f_plus - f_minus) / (2.0 * h);
}

}  // namespace

GradientMatrix finite_difference_gradient_serial(const FilterProblem& p, const GainMatrix& k,
                                                 ObjectiveKind objective) {
    require_gain_shape(p, k.matrix());
    Matrix grad(k.state_dim(), k.obs_dim());
    for (std::size_t i = 0; i < grad.rows(); ++i)
        for (std::size_t j = 0; j < grad.cols(); ++j) grad(i, j) = central_difference(p, k.matrix(), objective, i, j);
    return GradientMatrix(std::move(grad));
}

GradientMatrix finite_difference_gradient(const FilterProblem& p, const GainMatrix& k, ObjectiveKind objective) {
    require_gain_shape(p, k.matrix());
    Matrix grad(k.state_dim(), k.obs_dim());
    const std::size_t cols = grad.cols();
    const auto count = static_cast<std::ptrdiff_t>(grad.rows() * cols);
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(count));

#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t idx = 0; idx < count; ++idx) {
        const auto flat = static_cast<std::size_t>(idx);
        try {
            grad(flat / cols, flat % cols) = central_difference(p, k.matrix(), objective, flat / cols, flat % cols);
        } catch (...) {
            errors[flat] = std::current_exception();
        }
    }
    // Rethrow the lowest-index failure so the reported error matches the serial path.
    for (const auto& error : errors) {
        if (error) std::rethrow_exception(error);
    }
    return GradientMatrix(std::move(grad));
}

}  // namespace gainlab
