#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "gainlab/kalman.hpp"
#include "gainlab/optimizer.hpp"

namespace gainlab {

enum class OutputFormat { Json, Csv };

/// Output path that selects standard output.
inline constexpr const char* kStdoutPath = "-";

/// A trial passes when every optimized gain is this close (Frobenius) to the analytic gain.
inline constexpr double kGainDistanceTol = 1e-5;

struct ExperimentConfig {
    std::size_t state_dim = 4;
    std::size_t obs_dim = 3;
    std::size_t trials = 50;
    std::uint64_t master_seed = 0;
    double cond_target = 10.0;
    double grad_tol = 1e-9;
    std::size_t max_iters = 5000;
    OutputFormat output_format = OutputFormat::Json;
    std::string output_path = kStdoutPath;

    void validate() const;
    OptimizerConfig optimizer_config() const;
};

template <typename T>
struct PerObjective {
    T trace{};
    T logdet{};
    T entropy{};
};

struct TrialRecord {
    std::size_t trial_index = 0;
    std::uint64_t seed_used = 0;
    double gain_distance_logdet = 0.0;
    double gain_distance_trace = 0.0;
    double gain_distance_entropy = 0.0;
    /// ‖K·(H·P^f·Hᵀ + R) − P^f·Hᵀ‖_F at the log-det minimizer.
    double stationarity_residual = 0.0;
    PerObjective<double> objective_at_analytic;
    PerObjective<std::size_t> iterations;
    PerObjective<bool> converged;
    /// Set when the trial threw; numeric fields are NaN in that case.
    bool failed = false;
    std::string error;

    double max_gain_distance() const;
    bool converged_all() const { return converged.trace && converged.logdet && converged.entropy; }
    /// No error and every gain distance within kGainDistanceTol.
    bool passed() const;
};

struct SummaryRecord {
    std::size_t trials = 0;
    std::size_t failures = 0;
    std::size_t unconverged_runs = 0;
    double max_gain_distance = 0.0;
    double mean_gain_distance_logdet = 0.0;
    double mean_gain_distance_trace = 0.0;
    double mean_gain_distance_entropy = 0.0;
    double max_stationarity_residual = 0.0;
};

struct ExperimentResult {
    ExperimentConfig config;
    std::vector<TrialRecord> trials;
    SummaryRecord summary;
};

/// splitmix64 finalizer applied to the master seed advanced by the trial index.
std::uint64_t trial_seed(std::uint64_t master_seed, std::uint64_t trial_index) noexcept;

/// P^f = random_spd(n), R = random_spd(m), H standard Gaussian (m × n), each
/// from its own stream derived from `seed`.
FilterProblem generate_problem(std::size_t state_dim, std::size_t obs_dim, double cond_target, std::uint64_t seed);

TrialRecord run_trial(const ExperimentConfig& config, std::size_t trial_index);

/// Runs every trial with OpenMP. `workers` = 0 keeps the OpenMP default.
/// Output is independent of the worker count.
ExperimentResult run_experiment(const ExperimentConfig& config, int workers = 0);

/// Single-threaded reference for run_experiment.
ExperimentResult run_experiment_serial(const ExperimentConfig& config);

/// Max/mean statistics over successful trials; failures counts trials that did not pass.
SummaryRecord summarize(const std::vector<TrialRecord>& trials);

std::string render_json(const ExperimentResult& result);
std::string render_csv(const ExperimentResult& result);

/// Writes the report to `path` (or stdout for "-") in `format`.
/// Throws InvalidParameter for an empty trial list and IoError when the file
/// cannot be written.
void emit_report(const ExperimentResult& result, OutputFormat format, const std::string& path);

/// Shortest decimal string that round-trips to the same double.
std::string format_double(double value);

inline constexpr const char* kCsvHeader =
    "trial_index,seed_used,gain_distance_logdet,gain_distance_trace,gain_distance_entropy,"
    "stationarity_residual,iter_logdet,iter_trace,iter_entropy,converged_all";

/// One row of the analytic-vs-finite-difference gradient suite.
struct GradientCheckRecord {
    std::size_t instance = 0;
    std::uint64_t seed_used = 0;
    std::size_t state_dim = 0;
    std::size_t obs_dim = 0;
    double cond_target = 1.0;
    double analytic_norm = 0.0;
    /// ‖analytic − finite difference‖_F / (1 + ‖analytic‖_F).
    double relative_error = 0.0;
};

inline constexpr double kGradientCheckTol = 1e-5;

/// Random problems with n, m ≤ max_dim and cond ∈ {1, 10, 100}, evaluated at
/// a gain K* + 0.1·E with E standard Gaussian.
std::vector<GradientCheckRecord> run_gradient_check(std::size_t instances, std::uint64_t master_seed,
                                                    std::size_t max_dim = 6);

}  // namespace gainlab
