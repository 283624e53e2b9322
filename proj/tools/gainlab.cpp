// gainlab: batch and single-instance checks that the Kalman gain minimizes
// total variance, generalized variance and Gaussian entropy of the analysis.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdint>
#include <iomanip>
#include <iostream>
#include <map>
#include <string>

#include "gainlab/errors.hpp"
#include "gainlab/experiment.hpp"
#include "gainlab/objectives.hpp"
#include "gainlab/optimizer.hpp"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitThresholdFailed = 1;
constexpr int kExitConfigError = 2;

int run_batch(const gainlab::ExperimentConfig& config, int workers) {
    const gainlab::ExperimentResult result = gainlab::run_experiment(config, workers);
    gainlab::emit_report(result, config.output_format, config.output_path);
    return result.summary.failures == 0 ? kExitPass : kExitThresholdFailed;
}

struct CheckOptions {
    std::uint64_t seed = 0;
    std::size_t state_dim = 4;
    std::size_t obs_dim = 3;
    double cond = 10.0;
    double grad_tol = 1e-9;
    std::size_t max_iters = 5000;
};

int run_check(const CheckOptions& opt) {
    using namespace gainlab;
    const FilterProblem p = generate_problem(opt.state_dim, opt.obs_dim, opt.cond, opt.seed);
    OptimizerConfig config;
    config.grad_tol = opt.grad_tol;
    config.max_iters = opt.max_iters;
    const EquivalenceReport report = cross_objective_equivalence(p, config);

    std::cout << std::setprecision(10);
    std::cout << "instance: seed=" << opt.seed << " n=" << opt.state_dim << " m=" << opt.obs_dim
              << " cond=" << opt.cond << "\n\n";
    std::cout << "analytic gain:\n" << report.analytic.matrix() << "\n";
    std::cout << "stationarity residual at analytic gain: " << stationarity_residual(p, report.analytic) << "\n\n";

    bool ok = true;
    for (ObjectiveKind kind : kAllObjectives) {
        const OptimizationReport& run = report.run(kind);
        const double distance = report.distance(kind);
        ok = ok && distance <= kGainDistanceTol;
        std::cout << "[" << to_string(kind) << "] iterations=" << run.iterations
                  << " converged=" << (run.converged ? "yes" : "no")
                  << " final_grad_norm=" << run.gradient_norm_trajectory.back()
                  << " objective=" << run.final_objective << " stationarity_residual=" << run.stationarity_residual
                  << " distance_to_analytic=" << distance << "\n"
                  << run.final_gain.matrix() << "\n\n";
    }
    std::cout << "pairwise distances: trace-logdet=" << report.trace_vs_logdet
              << " trace-entropy=" << report.trace_vs_entropy << " logdet-entropy=" << report.logdet_vs_entropy
              << "\n";

    const Matrix offset = random_gaussian(opt.state_dim, opt.obs_dim, trial_seed(opt.seed, 13));
    const GainMatrix probe(report.analytic.matrix() + 0.1 * offset);
    const GradientMatrix analytic = logdet_gradient(p, probe);
    const GradientMatrix numeric = finite_difference_gradient(p, probe, ObjectiveKind::LogGeneralizedVariance);
    const double grad_error = frobenius_norm(analytic.matrix() - numeric.matrix()) / (1.0 + analytic.norm());
    ok = ok && grad_error <= kGradientCheckTol;
    std::cout << "gradient check at perturbed gain: relative error=" << grad_error
              << " (tolerance " << kGradientCheckTol << ")\n";
    std::cout << (ok ? "PASS" : "FAIL") << "\n";
    return ok ? kExitPass : kExitThresholdFailed;
}

int run_gradcheck(std::size_t instances, std::uint64_t seed, std::size_t max_dim) {
    const auto records = gainlab::run_gradient_check(instances, seed, max_dim);
    double worst = 0.0;
    std::size_t failures = 0;
    std::cout << "instance,seed_used,state_dim,obs_dim,cond,analytic_norm,relative_error\n";
    for (const auto& r : records) {
        std::cout << r.instance << ',' << r.seed_used << ',' << r.state_dim << ',' << r.obs_dim << ','
                  << gainlab::format_double(r.cond_target) << ',' << gainlab::format_double(r.analytic_norm) << ','
                  << gainlab::format_double(r.relative_error) << '\n';
        worst = std::max(worst, r.relative_error);
        if (!(r.relative_error <= gainlab::kGradientCheckTol)) ++failures;
    }
    std::cout << "# max_relative_error=" << gainlab::format_double(worst) << ",failures=" << failures << '\n';
    return failures == 0 ? kExitPass : kExitThresholdFailed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"gainlab: verify that the Kalman gain minimizes trace, log-det and entropy of the analysis covariance"};
    app.require_subcommand(1);

    gainlab::ExperimentConfig config;
    int workers = 0;
    const std::map<std::string, gainlab::OutputFormat> formats{{"json", gainlab::OutputFormat::Json},
                                                               {"csv", gainlab::OutputFormat::Csv}};
    auto* run = app.add_subcommand("run", "Run a seeded batch of trials and write a report");
    run->add_option("--state-dim", config.state_dim, "State dimension n")->check(CLI::PositiveNumber);
    run->add_option("--obs-dim", config.obs_dim, "Observation dimension m")->check(CLI::PositiveNumber);
    run->add_option("--trials", config.trials, "Number of trials")->check(CLI::PositiveNumber);
    run->add_option("--seed", config.master_seed, "Master seed");
    run->add_option("--cond", config.cond_target, "Condition number of P^f and R")->check(CLI::Range(1.0, 1e300));
    run->add_option("--grad-tol", config.grad_tol, "Gradient-norm convergence tolerance")->check(CLI::PositiveNumber);
    run->add_option("--max-iters", config.max_iters, "Iteration cap per minimization")->check(CLI::PositiveNumber);
    run->add_option("--format", config.output_format, "Report format")
        ->transform(CLI::CheckedTransformer(formats, CLI::ignore_case));
    run->add_option("--out", config.output_path, "Report path, '-' for stdout");
    run->add_option("--workers", workers, "OpenMP worker threads (0 = default)")->check(CLI::NonNegativeNumber);

    CheckOptions check_opts;
    auto* check = app.add_subcommand("check", "Verbose verification of one seeded instance");
    check->add_option("--seed", check_opts.seed, "Instance seed")->required();
    check->add_option("--state-dim", check_opts.state_dim, "State dimension n")->required()->check(CLI::PositiveNumber);
    check->add_option("--obs-dim", check_opts.obs_dim, "Observation dimension m")->required()->check(CLI::PositiveNumber);
    check->add_option("--cond", check_opts.cond, "Condition number of P^f and R")->check(CLI::Range(1.0, 1e300));
    check->add_option("--grad-tol", check_opts.grad_tol, "Gradient-norm convergence tolerance")
        ->check(CLI::PositiveNumber);
    check->add_option("--max-iters", check_opts.max_iters, "Iteration cap")->check(CLI::PositiveNumber);

    std::size_t instances = 100;
    std::uint64_t grad_seed = 0;
    std::size_t max_dim = 6;
    auto* gradcheck = app.add_subcommand("gradcheck", "Compare the analytic log-det gradient with finite differences");
    gradcheck->add_option("--instances", instances, "Number of random instances")->check(CLI::PositiveNumber);
    gradcheck->add_option("--seed", grad_seed, "Master seed");
    gradcheck->add_option("--max-dim", max_dim, "Largest n and m")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfigError;
    }

    try {
        if (*run) return run_batch(config, workers);
        if (*check) return run_check(check_opts);
        return run_gradcheck(instances, grad_seed, max_dim);
    } catch (const gainlab::IoError& e) {
        std::cerr << "gainlab: " << e.what() << '\n';
        return kExitConfigError;
    } catch (const gainlab::InvalidParameter& e) {
        std::cerr << "gainlab: " << e.what() << '\n';
        return kExitConfigError;
    } catch (const gainlab::Error& e) {
        std::cerr << "gainlab: " << e.what() << '\n';
        return kExitThresholdFailed;
    }
}
