#include "gainlab/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include "gainlab/errors.hpp"

namespace gainlab {

void OptimizerConfig::validate() const {
    if (max_iters == 0) throw InvalidParameter("max_iters must be positive");
    if (!(grad_tol > 0.0)) throw InvalidParameter("grad_tol must be positive");
    if (!(armijo_c > 0.0 && armijo_c < 1.0)) throw InvalidParameter("armijo_c must lie in (0, 1)");
    if (!(backtrack_factor > 0.0 && backtrack_factor < 1.0)) {
        throw InvalidParameter("backtrack_factor must lie in (0, 1)");
    }
    if (!(initial_step > 0.0) || !std::isfinite(initial_step)) {
        throw InvalidParameter("initial_step must be positive and finite");
    }
}

namespace {

GainMatrix starting_gain(const FilterProblem& p, const InitialGain& init) {
    struct Visitor {
        const FilterProblem& p;
        GainMatrix operator()(ZeroGain) const { return GainMatrix::zero(p.state_dim(), p.obs_dim()); }
        GainMatrix operator()(AnalyticGain) const { return analytic_gain(p); }
        GainMatrix operator()(const GainMatrix& k) const {
            require_gain_shape(p, k.matrix());
            return k;
        }
    };
    return std::visit(Visitor{p}, init);
}

// Keeps Barzilai-Borwein trial steps inside a range where backtracking from
// them stays cheap.
constexpr double kMaxTrialStep = 1e12;
constexpr double kMinTrialStep = 1e-12;

// Adaptive choice between the long step ⟨s,s⟩/⟨s,y⟩ and the short step
// ⟨s,y⟩/⟨y,y⟩: the short one is taken when it is less than half the long one.
double barzilai_borwein_step(const Matrix& s, const Matrix& y, double sy) {
    const double long_step = frobenius_inner(s, s) / sy;
    const double short_step = sy / frobenius_inner(y, y);
    return short_step < 0.5 * long_step ? short_step : long_step;
}

struct Iterate {
    GainMatrix gain;
    GradientMatrix gradient;
};

}  // namespace

OptimizationReport minimize_objective(const FilterProblem& p, ObjectiveKind objective, const OptimizerConfig& config) {
    config.validate();

    Iterate current{starting_gain(p, config.init_gain), GradientMatrix(Matrix(p.state_dim(), p.obs_dim()))};
    current.gradient = objective_gradient(p, objective, current.gain);
    double grad_norm = current.gradient.norm();

    std::vector<double> grad_norms{grad_norm};
    std::vector<double> steps;
    std::vector<double> changes;
    double trial_step = config.initial_step;
    bool converged = grad_norm <= config.grad_tol;
    std::size_t iterations = 0;

    while (!converged && iterations < config.max_iters) {
        const double required_slope = config.armijo_c * grad_norm * grad_norm;
        double step = trial_step;
        std::optional<Iterate> next;
        double change = 0.0;
        while (!next) {
            if (step < kMinStep) {
                throw LineSearchFailed("minimize_objective(" + std::string(to_string(objective)) +
                                       "): no Armijo step above 1e-16 at iteration " + std::to_string(iterations) +
                                       ", gradient norm " + std::to_string(grad_norm));
            }
            const Matrix displacement = -step * current.gradient.matrix();
            try {
                change = objective_change(p, objective, current.gain, displacement);
                if (change <= -step * required_slope) {
                    GainMatrix candidate(current.gain.matrix() + displacement);
                    GradientMatrix gradient = objective_gradient(p, objective, candidate);
                    next.emplace(Iterate{std::move(candidate), std::move(gradient)});
                    break;
                }
            } catch (const NotPositiveDefinite&) {
                // Outside the numerically valid region; shrink like an Armijo failure.
            }
            step *= config.backtrack_factor;
        }

        if (config.step_rule == StepRule::BarzilaiBorwein) {
            const Matrix s = next->gain.matrix() - current.gain.matrix();
            const Matrix y = next->gradient.matrix() - current.gradient.matrix();
            const double sy = frobenius_inner(s, y);
            trial_step = sy > 0.0 ? std::clamp(barzilai_borwein_step(s, y, sy), kMinTrialStep, kMaxTrialStep)
                                  : config.initial_step;
        }

        current = std::move(*next);
        grad_norm = current.gradient.norm();
        grad_norms.push_back(grad_norm);
        steps.push_back(step);
        changes.push_back(change);
        ++iterations;
        converged = grad_norm <= config.grad_tol;
    }

    const double final_objective = evaluate_objective(p, objective, current.gain);
    const double residual = stationarity_residual(p, current.gain);
    return OptimizationReport{
        .final_gain = std::move(current.gain),
        .final_objective = final_objective,
        .iterations = iterations,
        .converged = converged,
        .gradient_norm_trajectory = std::move(grad_norms),
        .step_trajectory = std::move(steps),
        .objective_change_trajectory = std::move(changes),
        .stationarity_residual = residual,
        .objective_kind = objective,
    };
}

double stationarity_residual(const FilterProblem& p, const GainMatrix& k) {
    return frobenius_norm(stationarity_matrix(p, k));
}

namespace {

std::size_t index_of(ObjectiveKind kind) {
    for (std::size_t i = 0; i < kAllObjectives.size(); ++i) {
        if (kAllObjectives[i] == kind) return i;
    }
    throw InvalidParameter("unknown objective");
}

double gain_distance(const GainMatrix& a, const GainMatrix& b) { return frobenius_norm(a.matrix() - b.matrix()); }

}  // namespace

const OptimizationReport& EquivalenceReport::run(ObjectiveKind kind) const { return runs[index_of(kind)]; }

double EquivalenceReport::distance(ObjectiveKind kind) const { return distance_to_analytic[index_of(kind)]; }

double EquivalenceReport::max_distance_to_analytic() const {
    return *std::max_element(distance_to_analytic.begin(), distance_to_analytic.end());
}

double EquivalenceReport::max_pairwise_distance() const {
    return std::max({trace_vs_logdet, trace_vs_entropy, logdet_vs_entropy});
}

EquivalenceReport cross_objective_equivalence(const FilterProblem& p, const OptimizerConfig& config) {
    OptimizerConfig from_zero = config;
    from_zero.init_gain = ZeroGain{};

    GainMatrix analytic = analytic_gain(p);
    std::array<OptimizationReport, 3> runs{
        minimize_objective(p, kAllObjectives[0], from_zero),
        minimize_objective(p, kAllObjectives[1], from_zero),
        minimize_objective(p, kAllObjectives[2], from_zero),
    };
    std::array<double, 3> distances{};
    for (std::size_t i = 0; i < runs.size(); ++i) distances[i] = gain_distance(runs[i].final_gain, analytic);

    EquivalenceReport report{
        .analytic = std::move(analytic),
        .runs = std::move(runs),
        .distance_to_analytic = distances,
    };
    const auto& trace_gain = report.run(ObjectiveKind::TotalVariance).final_gain;
    const auto& logdet_gain = report.run(ObjectiveKind::LogGeneralizedVariance).final_gain;
    const auto& entropy_gain = report.run(ObjectiveKind::DifferentialEntropy).final_gain;
    report.trace_vs_logdet = gain_distance(trace_gain, logdet_gain);
    report.trace_vs_entropy = gain_distance(trace_gain, entropy_gain);
    report.logdet_vs_entropy = gain_distance(logdet_gain, entropy_gain);
    return report;
}

}  // namespace gainlab
