#pragma once

#include <array>
#include <optional>
#include <string_view>

#include "gainlab/kalman.hpp"
#include "gainlab/matrix.hpp"

namespace gainlab {

enum class ObjectiveKind { TotalVariance, LogGeneralizedVariance, DifferentialEntropy };

inline constexpr std::array<ObjectiveKind, 3> kAllObjectives{
    ObjectiveKind::TotalVariance, ObjectiveKind::LogGeneralizedVariance, ObjectiveKind::DifferentialEntropy};

std::string_view to_string(ObjectiveKind kind) noexcept;
std::optional<ObjectiveKind> parse_objective(std::string_view name) noexcept;

/// Partial derivatives of an objective with respect to each gain entry (n × m).
class GradientMatrix {
public:
    explicit GradientMatrix(Matrix g);

    const Matrix& matrix() const noexcept { return matrix_; }
    double norm() const { return frobenius_norm(matrix_); }

private:
    Matrix matrix_;
};

/// tr(P^a) for P^a = joseph_update(p, k).
double total_variance(const FilterProblem& p, const GainMatrix& k);
/// log det(P^a).
double log_generalized_variance(const FilterProblem& p, const GainMatrix& k);
/// Gaussian differential entropy of the analysis, in nats.
double differential_entropy(const FilterProblem& p, const GainMatrix& k);
/// (N/2)·log(2πe), the additive constant of the Gaussian entropy.
double entropy_offset(std::size_t dim);

double evaluate_objective(const FilterProblem& p, ObjectiveKind kind, const GainMatrix& k);

/// K·(H·P^f·Hᵀ + R) − P^f·Hᵀ. Vanishes exactly at the analytic gain.
Matrix stationarity_matrix(const FilterProblem& p, const GainMatrix& k);

/// First-order change of P^a along dk, term by term:
///   −P^f·Hᵀ·dKᵀ − dK·H·P^f + dK·H·P^f·Hᵀ·Kᵀ + K·H·P^f·Hᵀ·dKᵀ + dK·R·Kᵀ + K·R·dKᵀ
Matrix analysis_cov_differential(const FilterProblem& p, const GainMatrix& k, const GainMatrix& dk);

/// tr((P^a)^{-1}·dP^a) with dP^a from analysis_cov_differential.
double directional_logdet_differential(const FilterProblem& p, const GainMatrix& k, const GainMatrix& dk);

/// d log det(P^a) / dK = (P^a)^{-1}·(2K·H·P^f·Hᵀ + 2K·R − 2P^f·Hᵀ).
///
/// The prefactor is applied on the left as written; the result is not
/// symmetric in any sense and is only compared against finite differences.
GradientMatrix logdet_gradient(const FilterProblem& p, const GainMatrix& k);

/// d tr(P^a) / dK = 2K·(H·P^f·Hᵀ + R) − 2P^f·Hᵀ.
///
/// This is the log-det gradient without the (P^a)^{-1} prefactor, so both
/// objectives share the root K·(H·P^f·Hᵀ + R) = P^f·Hᵀ.
GradientMatrix trace_gradient(const FilterProblem& p, const GainMatrix& k);

/// Analytic gradient of the requested objective. The entropy gradient is
/// exactly half the log-det gradient.
GradientMatrix objective_gradient(const FilterProblem& p, ObjectiveKind kind, const GainMatrix& k);

/// f(k + step) − f(k), evaluated without cancellation between two large
/// objective values.
///
/// P^a is quadratic in K, so the change D = P^a(k + step) − P^a(k) is formed
/// directly. The trace change is tr(D); the log-det change is
/// log det(I + L⁻¹·D·L⁻ᵀ) with P^a(k) = L·Lᵀ, accumulated as Σ log1p of
/// unit-shifted Cholesky pivots. Throws NotPositiveDefinite when P^a(k + step)
/// is not positive definite.
double objective_change(const FilterProblem& p, ObjectiveKind kind, const GainMatrix& k, const Matrix& step);

/// Central differences [f(k + h·E_ij) − f(k − h·E_ij)]/(2h), h = 1e-6·(1 + |k_ij|).
///
/// Entries are evaluated in parallel with OpenMP. Each entry is written by
/// exactly one iteration, so the result is bit-identical to the serial
/// reference below.
GradientMatrix finite_difference_gradient(const FilterProblem& p, const GainMatrix& k, ObjectiveKind objective);

/// Single-threaded reference for finite_difference_gradient.
GradientMatrix finite_difference_gradient_serial(const FilterProblem& p, const GainMatrix& k,
                                                 ObjectiveKind objective);

double finite_difference_step(double entry) noexcept;

}  // namespace gainlab
