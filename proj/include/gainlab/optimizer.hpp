#pragma once

#include <array>
#include <cstddef>
#include <variant>
#include <vector>

#include "gainlab/kalman.hpp"
#include "gainlab/objectives.hpp"

namespace gainlab {

struct ZeroGain {};
struct AnalyticGain {};
using InitialGain = std::variant<ZeroGain, AnalyticGain, GainMatrix>;

/// How the first trial step of each line search is chosen.
enum class StepRule {
    /// Every line search starts from initial_step.
    Fixed,
    /// initial_step on the first iteration, then a Barzilai-Borwein step
    /// computed from the previous accepted step s and gradient change y.
    /// Backtracking still enforces Armijo from that trial value.
    BarzilaiBorwein,
};

struct OptimizerConfig {
    std::size_t max_iters = 5000;
    double grad_tol = 1e-9;
    double armijo_c = 1e-4;
    double backtrack_factor = 0.5;
    double initial_step = 1.0;
    InitialGain init_gain = ZeroGain{};
    StepRule step_rule = StepRule::BarzilaiBorwein;

    /// Throws InvalidParameter if any field is out of range.
    void validate() const;
};

/// Backtracking gives up once the trial step drops below this.
inline constexpr double kMinStep = 1e-16;

struct OptimizationReport {
    GainMatrix final_gain;
    double final_objective = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
    /// ‖∇f‖_F at the initial gain and after every accepted step.
    std::vector<double> gradient_norm_trajectory;
    /// Accepted step length and objective change for each iteration.
    std::vector<double> step_trajectory;
    std::vector<double> objective_change_trajectory;
    /// ‖K·H·P^f·Hᵀ + K·R − P^f·Hᵀ‖_F at final_gain.
    double stationarity_residual = 0.0;
    ObjectiveKind objective_kind = ObjectiveKind::LogGeneralizedVariance;
};

/// Gradient descent with Armijo backtracking over the gain matrix.
///
/// Trial points whose analysis covariance is not positive definite are
/// rejected exactly like Armijo failures. Throws LineSearchFailed when the
/// step falls below kMinStep.
OptimizationReport minimize_objective(const FilterProblem& p, ObjectiveKind objective,
                                      const OptimizerConfig& config = {});

/// ‖K·H·P^f·Hᵀ + K·R − P^f·Hᵀ‖_F.
double stationarity_residual(const FilterProblem& p, const GainMatrix& k);

struct EquivalenceReport {
    GainMatrix analytic;
    /// Indexed in kAllObjectives order.
    std::array<OptimizationReport, 3> runs;
    std::array<double, 3> distance_to_analytic{};
    double trace_vs_logdet = 0.0;
    double trace_vs_entropy = 0.0;
    double logdet_vs_entropy = 0.0;

    const OptimizationReport& run(ObjectiveKind kind) const;
    double distance(ObjectiveKind kind) const;
    double max_distance_to_analytic() const;
    double max_pairwise_distance() const;
};

/// Minimizes all three objectives from the zero gain (the configured
/// init_gain is ignored) and compares the minimizers with each other and
/// with the analytic gain.
EquivalenceReport cross_objective_equivalence(const FilterProblem& p, const OptimizerConfig& config = {});

}  // namespace gainlab
