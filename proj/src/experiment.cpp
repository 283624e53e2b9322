#include "gainlab/experiment.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>

#include "gainlab/errors.hpp"
#include "gainlab/objectives.hpp"

namespace gainlab {

void ExperimentConfig::validate() const {
    if (state_dim == 0 || obs_dim == 0) throw InvalidParameter("state and observation dimensions must be >= 1");
    if (trials == 0) throw InvalidParameter("trials must be >= 1");
    if (!(cond_target >= 1.0) || !std::isfinite(cond_target)) throw InvalidParameter("cond must be >= 1");
    optimizer_config().validate();
}

OptimizerConfig ExperimentConfig::optimizer_config() const {
    OptimizerConfig config;
    config.grad_tol = grad_tol;
    config.max_iters = max_iters;
    return config;
}

double TrialRecord::max_gain_distance() const {
    return std::max({gain_distance_logdet, gain_distance_trace, gain_distance_entropy});
}

bool TrialRecord::passed() const { return !failed && max_gain_distance() <= kGainDistanceTol; }

namespace {

std::uint64_t splitmix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace

std::uint64_t trial_seed(std::uint64_t master_seed, std::uint64_t trial_index) noexcept {
    return splitmix64(master_seed + 0x9e3779b97f4a7c15ULL * trial_index);
}

FilterProblem generate_problem(std::size_t state_dim, std::size_t obs_dim, double cond_target, std::uint64_t seed) {
    return FilterProblem(random_spd(state_dim, trial_seed(seed, 0), cond_target),
                         ObservationOperator(random_gaussian(obs_dim, state_dim, trial_seed(seed, 2))),
                         random_spd(obs_dim, trial_seed(seed, 1), cond_target));
}

TrialRecord run_trial(const ExperimentConfig& config, std::size_t trial_index) {
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    TrialRecord record;
    record.trial_index = trial_index;
    record.seed_used = trial_seed(config.master_seed, trial_index);
    try {
        const FilterProblem problem =
            generate_problem(config.state_dim, config.obs_dim, config.cond_target, record.seed_used);
        const EquivalenceReport report = cross_objective_equivalence(problem, config.optimizer_config());
        const auto& trace_run = report.run(ObjectiveKind::TotalVariance);
        const auto& logdet_run = report.run(ObjectiveKind::LogGeneralizedVariance);
        const auto& entropy_run = report.run(ObjectiveKind::DifferentialEntropy);

        record.gain_distance_logdet = report.distance(ObjectiveKind::LogGeneralizedVariance);
        record.gain_distance_trace = report.distance(ObjectiveKind::TotalVariance);
        record.gain_distance_entropy = report.distance(ObjectiveKind::DifferentialEntropy);
        record.stationarity_residual = logdet_run.stationarity_residual;
        record.objective_at_analytic = {total_variance(problem, report.analytic),
                                        log_generalized_variance(problem, report.analytic),
                                        differential_entropy(problem, report.analytic)};
        record.iterations = {trace_run.iterations, logdet_run.iterations, entropy_run.iterations};
        record.converged = {trace_run.converged, logdet_run.converged, entropy_run.converged};
    } catch (const std::exception& e) {
        record.failed = true;
        record.error = e.what();
        record.gain_distance_logdet = record.gain_distance_trace = record.gain_distance_entropy = nan;
        record.stationarity_residual = nan;
        record.objective_at_analytic = {nan, nan, nan};
    }
    return record;
}

SummaryRecord summarize(const std::vector<TrialRecord>& trials) {
    SummaryRecord summary;
    summary.trials = trials.size();
    std::size_t ok = 0;
    for (const TrialRecord& t : trials) {
        if (!t.passed()) ++summary.failures;
        if (t.failed) continue;
        ++ok;
        summary.unconverged_runs += !t.converged.trace + !t.converged.logdet + !t.converged.entropy;
        summary.max_gain_distance = std::max(summary.max_gain_distance, t.max_gain_distance());
        summary.max_stationarity_residual = std::max(summary.max_stationarity_residual, t.stationarity_residual);
        summary.mean_gain_distance_logdet += t.gain_distance_logdet;
        summary.mean_gain_distance_trace += t.gain_distance_trace;
        summary.mean_gain_distance_entropy += t.gain_distance_entropy;
    }
    if (ok > 0) {
        const auto count = static_cast<double>(ok);
        summary.mean_gain_distance_logdet /= count;
        summary.mean_gain_distance_trace /= count;
        summary.mean_gain_distance_entropy /= count;
    }
    return summary;
}

ExperimentResult run_experiment_serial(const ExperimentConfig& config) {
    config.validate();
    std::vector<TrialRecord> trials;
    trials.reserve(config.trials);
    for (std::size_t i = 0; i < config.trials; ++i) trials.push_back(run_trial(config, i));
    SummaryRecord summary = summarize(trials);
    return {config, std::move(trials), summary};
}

ExperimentResult run_experiment(const ExperimentConfig& config, int workers) {
    config.validate();
    std::vector<TrialRecord> trials(config.trials);
    const int threads = workers > 0 ? workers : omp_get_max_threads();
    const auto count = static_cast<std::ptrdiff_t>(config.trials);

    // run_trial never throws; each slot is written by one iteration only.
#pragma omp parallel for schedule(dynamic) num_threads(threads)
    for (std::ptrdiff_t i = 0; i < count; ++i) {
        trials[static_cast<std::size_t>(i)] = run_trial(config, static_cast<std::size_t>(i));
    }
    SummaryRecord summary = summarize(trials);
    return {config, std::move(trials), summary};
}

std::vector<GradientCheckRecord> run_gradient_check(std::size_t instances, std::uint64_t master_seed,
                                                    std::size_t max_dim) {
    if (max_dim == 0) throw InvalidParameter("run_gradient_check: max_dim must be >= 1");
    constexpr double kConds[] = {1.0, 10.0, 100.0};
    std::vector<GradientCheckRecord> records;
    records.reserve(instances);
    for (std::size_t i = 0; i < instances; ++i) {
        GradientCheckRecord rec;
        rec.instance = i;
        rec.seed_used = trial_seed(master_seed, i);
        rec.state_dim = 1 + trial_seed(rec.seed_used, 10) % max_dim;
        rec.obs_dim = 1 + trial_seed(rec.seed_used, 11) % max_dim;
        rec.cond_target = kConds[trial_seed(rec.seed_used, 12) % 3];

        const FilterProblem p = generate_problem(rec.state_dim, rec.obs_dim, rec.cond_target, rec.seed_used);
        const Matrix perturbation = random_gaussian(rec.state_dim, rec.obs_dim, trial_seed(rec.seed_used, 13));
        const GainMatrix gain(analytic_gain(p).matrix() + 0.1 * perturbation);

        const GradientMatrix analytic = logdet_gradient(p, gain);
        const GradientMatrix numeric = finite_difference_gradient(p, gain, ObjectiveKind::LogGeneralizedVariance);
        rec.analytic_norm = analytic.norm();
        rec.relative_error = frobenius_norm(analytic.matrix() - numeric.matrix()) / (1.0 + rec.analytic_norm);
        records.push_back(rec);
    }
    return records;
}

}  // namespace gainlab
