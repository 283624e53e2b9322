// Acceptance run: one PASS/FAIL line per property, nonzero exit if any fails.
//
// Oracles (finite differences, Joseph update, log-determinants, residuals)
// are recomputed here through Eigen so they do not share code paths with the
// library routines under test.

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>
#include <sys/wait.h>
#include <unistd.h>

#include "fixtures.hpp"
#include "gainlab/errors.hpp"
#include "gainlab/experiment.hpp"
#include "gainlab/kalman.hpp"
#include "gainlab/objectives.hpp"
#include "gainlab/optimizer.hpp"

using namespace gainlab;
using namespace gainlab::testing;
namespace fs = std::filesystem;

namespace {

constexpr std::size_t kSuiteSize = 100;

int g_failures = 0;

void report(int id, bool ok, const char* title, const std::string& detail) {
    std::printf("[%2d] %s  %s (%s)\n", id, ok ? "PASS" : "FAIL", title, detail.c_str());
    std::fflush(stdout);
    if (!ok) ++g_failures;
}

std::string fmt(const char* format, double a) {
    char buf[128];
    std::snprintf(buf, sizeof(buf), format, a);
    return buf;
}

// Every covariance produced during the run, checked for Hadamard's inequality at the end.
std::vector<CovarianceMatrix> g_covariances;

void keep(const CovarianceMatrix& c) { g_covariances.push_back(c); }

void keep_problem(const FilterProblem& p) {
    keep(p.prior());
    keep(p.obs_noise());
    keep(p.innovation());
}

Eigen::MatrixXd eigen_analysis(const FilterProblem& p, const Eigen::MatrixXd& k) {
    const Eigen::MatrixXd pf = to_eigen(p.prior().matrix());
    const Eigen::MatrixXd h = to_eigen(p.obs_op().matrix());
    const Eigen::MatrixXd r = to_eigen(p.obs_noise().matrix());
    const Eigen::MatrixXd a = Eigen::MatrixXd::Identity(pf.rows(), pf.cols()) - k * h;
    return a * pf * a.transpose() + k * r * k.transpose();
}

double eigen_logdet(const Eigen::MatrixXd& m) {
    const Eigen::LLT<Eigen::MatrixXd> llt(m);
    double sum = 0.0;
    for (Eigen::Index i = 0; i < m.rows(); ++i) sum += std::log(llt.matrixL()(i, i));
    return 2.0 * sum;
}

using EigenObjective = double (*)(const Eigen::MatrixXd&);
double eigen_trace(const Eigen::MatrixXd& m) { return m.trace(); }

Eigen::MatrixXd central_difference(const FilterProblem& p, const Eigen::MatrixXd& k, EigenObjective f) {
    Eigen::MatrixXd grad(k.rows(), k.cols());
    for (Eigen::Index i = 0; i < k.rows(); ++i) {
        for (Eigen::Index j = 0; j < k.cols(); ++j) {
            const double h = 1e-6 * (1.0 + std::abs(k(i, j)));
            Eigen::MatrixXd plus = k;
            Eigen::MatrixXd minus = k;
            plus(i, j) += h;
            minus(i, j) -= h;
            grad(i, j) = (f(eigen_analysis(p, plus)) - f(eigen_analysis(p, minus))) / (2.0 * h);
        }
    }
    return grad;
}

int run_cli(const std::string& args) {
    const std::string command = std::string(GAINLAB_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(command.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct SuiteEntry {
    RandomInstance instance;
    EquivalenceReport report;
};

}  // namespace

int main() {
    // The shared suite: 100 seeded problems, all three objectives minimized from K = 0.
    std::vector<SuiteEntry> suite;
    const auto start = std::chrono::steady_clock::now();
    for (std::uint64_t seed = 0; seed < kSuiteSize; ++seed) {
        RandomInstance inst = random_instance(seed, 8);
        EquivalenceReport report = cross_objective_equivalence(inst.problem);
        suite.push_back({std::move(inst), std::move(report)});
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    for (const auto& e : suite) {
        keep_problem(e.instance.problem);
        for (const auto& run : e.report.runs) keep(joseph_update(e.instance.problem, run.final_gain));
    }

    {
        double worst = 0.0;
        std::size_t unconverged = 0;
        for (const auto& e : suite) {
            // Independent oracle for the analytic gain: P^f·Hᵀ·S⁻¹ through Eigen's LU.
            const Eigen::MatrixXd pf = to_eigen(e.instance.problem.prior().matrix());
            const Eigen::MatrixXd h = to_eigen(e.instance.problem.obs_op().matrix());
            const Eigen::MatrixXd r = to_eigen(e.instance.problem.obs_noise().matrix());
            const Eigen::MatrixXd s = h * pf * h.transpose() + r;
            const Eigen::MatrixXd oracle = pf * h.transpose() * s.inverse();
            const Eigen::MatrixXd found = to_eigen(e.report.run(ObjectiveKind::LogGeneralizedVariance).final_gain.matrix());
            worst = std::max(worst, (found - oracle).norm());
            if (!e.report.run(ObjectiveKind::LogGeneralizedVariance).converged) ++unconverged;
        }
        report(1, worst <= 1e-5 && seconds < 60.0, "log-det minimizer equals the Kalman gain",
               fmt("max ||dK||_F=%.3e", worst) + fmt(", %.1f s for all three objectives", seconds) +
                   ", unconverged=" + std::to_string(unconverged));
    }

    {
        double worst = 0.0;
        for (const auto& e : suite) {
            worst = std::max({worst, e.report.trace_vs_logdet, e.report.distance(ObjectiveKind::TotalVariance),
                              e.report.distance(ObjectiveKind::LogGeneralizedVariance)});
        }
        report(2, worst <= 1e-5, "trace and log-det minimizers coincide with the Kalman gain",
               fmt("max distance=%.3e", worst));
    }

    {
        double minimizer_gap = 0.0;
        for (const auto& e : suite) minimizer_gap = std::max(minimizer_gap, e.report.logdet_vs_entropy);
        double worst_diff = 0.0;
        for (std::uint64_t seed = 0; seed < 100; ++seed) {
            const auto inst = random_instance(seed + 10'000, 8);
            const GainMatrix k1(random_direction(inst.state_dim, inst.obs_dim, trial_seed(seed, 1)));
            const GainMatrix k2(random_direction(inst.state_dim, inst.obs_dim, trial_seed(seed, 2)));
            const double dh = differential_entropy(inst.problem, k1) - differential_entropy(inst.problem, k2);
            const double dl =
                log_generalized_variance(inst.problem, k1) - log_generalized_variance(inst.problem, k2);
            worst_diff = std::max(worst_diff, std::abs(dh - 0.5 * dl));
            keep_problem(inst.problem);
            keep(joseph_update(inst.problem, k1));
            keep(joseph_update(inst.problem, k2));
        }
        report(3, minimizer_gap <= 1e-8 && worst_diff <= 1e-12, "entropy minimizer equals log-det minimizer",
               fmt("max ||K_h - K_ld||_F=%.3e", minimizer_gap) + fmt(", max |dh - dld/2|=%.3e", worst_diff));
    }

    {
        double worst_logdet = 0.0;
        double worst_trace = 0.0;
        for (std::uint64_t seed = 0; seed < 100; ++seed) {
            const auto inst = random_instance(seed + 20'000, 6);
            const GainMatrix gain(analytic_gain(inst.problem).matrix() +
                                  random_direction(inst.state_dim, inst.obs_dim, trial_seed(seed, 3), 0.1));
            const Eigen::MatrixXd k = to_eigen(gain.matrix());
            const Eigen::MatrixXd a_ld = to_eigen(logdet_gradient(inst.problem, gain).matrix());
            const Eigen::MatrixXd fd_ld = central_difference(inst.problem, k, eigen_logdet);
            worst_logdet = std::max(worst_logdet, (a_ld - fd_ld).norm() / fd_ld.norm());
            const Eigen::MatrixXd a_tr = to_eigen(trace_gradient(inst.problem, gain).matrix());
            const Eigen::MatrixXd fd_tr = central_difference(inst.problem, k, eigen_trace);
            worst_trace = std::max(worst_trace, (a_tr - fd_tr).norm() / fd_tr.norm());
            keep_problem(inst.problem);
            keep(joseph_update(inst.problem, gain));
        }
        report(4, worst_logdet <= 1e-5 && worst_trace <= 1e-5, "analytic gradients match central differences",
               fmt("max relative error logdet=%.3e", worst_logdet) + fmt(", trace=%.3e", worst_trace));
    }

    {
        double worst = 0.0;
        for (std::uint64_t seed = 0; seed < 100; ++seed) {
            const auto inst = random_instance(seed + 30'000, 8);
            const GainMatrix gain(analytic_gain(inst.problem).matrix() +
                                  random_direction(inst.state_dim, inst.obs_dim, trial_seed(seed, 4), 0.5));
            const Matrix dk = random_direction(inst.state_dim, inst.obs_dim, trial_seed(seed, 5));
            const double trace_form = directional_logdet_differential(inst.problem, gain, GainMatrix(dk));
            const double inner = frobenius_inner(logdet_gradient(inst.problem, gain).matrix(), dk);
            worst = std::max(worst, std::abs(trace_form - inner) / std::abs(inner));
            keep_problem(inst.problem);
            keep(joseph_update(inst.problem, gain));
        }
        report(5, worst <= 1e-9, "directional differential equals <gradient, direction>",
               fmt("max relative gap=%.3e", worst));
    }

    {
        double worst = 0.0;
        for (std::uint64_t seed = 0; seed < 100; ++seed) {
            const auto inst = random_instance(seed + 40'000, 8);
            const Eigen::MatrixXd pf = to_eigen(inst.problem.prior().matrix());
            const Eigen::MatrixXd h = to_eigen(inst.problem.obs_op().matrix());
            const Eigen::MatrixXd r = to_eigen(inst.problem.obs_noise().matrix());
            const Eigen::MatrixXd k = to_eigen(analytic_gain(inst.problem).matrix());
            const Eigen::MatrixXd pht = pf * h.transpose();
            const double residual = (k * h * pht + k * r - pht).norm();
            worst = std::max(worst, residual / (1.0 + pht.norm()));
            keep_problem(inst.problem);
        }
        report(6, worst <= 1e-8, "stationarity residual vanishes at the Kalman gain",
               fmt("max residual/(1+||P^f H^T||)=%.3e", worst));
    }

    {
        double worst_asym = 0.0;
        double worst_oracle = 0.0;
        bool all_spd = true;
        bool zero_exact = true;
        for (std::uint64_t seed = 0; seed < 200; ++seed) {
            const auto inst = random_instance(seed + 50'000, 8);
            const double scale = seed % 4 == 0 ? 10.0 : 1.0;
            const Matrix k = random_direction(inst.state_dim, inst.obs_dim, trial_seed(seed, 6), scale);
            try {
                const CovarianceMatrix pa = joseph_update(inst.problem, GainMatrix(k));
                const Matrix& m = pa.matrix();
                for (std::size_t i = 0; i < m.rows(); ++i)
                    for (std::size_t j = 0; j < m.cols(); ++j)
                        worst_asym = std::max(worst_asym, std::abs(m(i, j) - m(j, i)) / std::max(1.0, std::abs(m(i, j))));
                const Eigen::MatrixXd oracle = eigen_analysis(inst.problem, to_eigen(k));
                worst_oracle = std::max(worst_oracle, (to_eigen(m) - oracle).norm() / oracle.norm());
                all_spd = all_spd && eigenvalues(m).minCoeff() > 0.0;
                keep(pa);
            } catch (const Error&) {
                all_spd = false;
            }
            const Matrix zero = joseph_update(inst.problem, GainMatrix::zero(inst.state_dim, inst.obs_dim)).matrix();
            zero_exact = zero_exact && zero == symmetrize(inst.problem.prior().matrix());
            keep_problem(inst.problem);
        }
        report(7, worst_asym <= 1e-12 && all_spd && zero_exact && worst_oracle <= 1e-10,
               "Joseph update is symmetric positive definite for any gain",
               fmt("max asymmetry=%.3e", worst_asym) + fmt(", max error vs oracle=%.3e", worst_oracle) +
                   ", spd=" + (all_spd ? "yes" : "no") + ", K=0 exact=" + (zero_exact ? "yes" : "no"));
    }

    {
        // Diagonal problems with square identity H and diagonal gain keep P^a diagonal.
        for (std::uint64_t seed = 0; seed < 50; ++seed) {
            const std::size_t n = 1 + seed % 8;
            const Matrix d = random_gaussian(3, n, trial_seed(seed, 7));
            std::vector<double> pf(n), r(n), k(n);
            for (std::size_t i = 0; i < n; ++i) {
                pf[i] = std::exp(d(0, i));
                r[i] = std::exp(d(1, i));
                k[i] = d(2, i);
            }
            const FilterProblem p(CovarianceMatrix(Matrix::diagonal(pf)), ObservationOperator(Matrix::identity(n)),
                                  CovarianceMatrix(Matrix::diagonal(r)));
            keep_problem(p);
            keep(joseph_update(p, GainMatrix(Matrix::diagonal(k))));
            keep(joseph_update(p, analytic_gain(p)));
        }

        // Anything in the suite still holding Cholesky pivots is covered here,
        // with an Eigen LU log-determinant as a second opinion.
        double worst_excess = -INFINITY;
        double worst_diag_gap = 0.0;
        std::size_t diagonal_cases = 0;
        for (const auto& c : g_covariances) {
            const double log_prod = log_diagonal_product(c);
            const double slack = 1e-12 * std::max(1.0, std::abs(log_prod));
            worst_excess = std::max({worst_excess, (log_det(c) - log_prod) - slack,
                                     (lu_log_abs_det(c.matrix()) - log_prod) - slack});
            bool diagonal = true;
            for (std::size_t i = 0; i < c.dim() && diagonal; ++i)
                for (std::size_t j = 0; j < c.dim(); ++j)
                    if (i != j && c(i, j) != 0.0) diagonal = false;
            if (diagonal) {
                ++diagonal_cases;
                // det = ∏ m_ii compared in relative terms through the logs.
                worst_diag_gap = std::max(worst_diag_gap, std::abs(log_det(c) - log_prod));
            }
        }
        report(8, worst_excess <= 0.0 && worst_diag_gap <= 1e-12 && diagonal_cases > 0,
               "Hadamard inequality on every covariance produced",
               std::to_string(g_covariances.size()) + " matrices, " + std::to_string(diagonal_cases) +
                   fmt(" diagonal, max diagonal |log det - log prod|=%.3e", worst_diag_gap));
    }

    {
        double worst_decrease = 0.0;
        std::size_t gains_checked = 0;
        for (const auto& e : suite) {
            const auto& inst = e.instance;
            for (const auto& run : e.report.runs) {
                if (!run.converged) continue;
                ++gains_checked;
                for (ObjectiveKind kind : kAllObjectives) {
                    const double base = evaluate_objective(inst.problem, kind, run.final_gain);
                    for (std::uint64_t j = 0; j < 50; ++j) {
                        const Matrix e_k = random_with_norm(inst.state_dim, inst.obs_dim, trial_seed(inst.seed + 7, j), 1e-3);
                        const double moved = evaluate_objective(inst.problem, kind, GainMatrix(run.final_gain.matrix() + e_k));
                        worst_decrease = std::min(worst_decrease, moved - base);
                    }
                }
            }
        }
        report(9, worst_decrease >= -1e-12 && gains_checked > 0, "converged gains are local minima of every objective",
               std::to_string(gains_checked) + " gains" + fmt(", min change=%.3e", worst_decrease));
    }

    {
        const fs::path dir = fs::temp_directory_path() / ("gainlab_acceptance_" + std::to_string(::getpid()));
        fs::create_directories(dir);
        bool ok = true;
        std::string detail;
        for (const char* format : {"json", "csv"}) {
            const std::string base =
                std::string("run --state-dim 4 --obs-dim 3 --trials 24 --seed 17 --cond 10 --format ") + format;
            std::vector<std::string> outputs;
            // Two invocations with one worker, then two and four workers.
            const int workers[] = {1, 1, 2, 4};
            for (std::size_t i = 0; i < std::size(workers); ++i) {
                const fs::path path = dir / ("out" + std::to_string(i) + "." + format);
                ok = ok && run_cli(base + " --workers " + std::to_string(workers[i]) + " --out " + path.string()) == 0;
                outputs.push_back(slurp(path));
            }
            const bool same = !outputs[0].empty() &&
                              std::all_of(outputs.begin(), outputs.end(), [&](const auto& o) { return o == outputs[0]; });
            ok = ok && same;
            detail += std::string(detail.empty() ? "" : ", ") + format + (same ? " identical" : " differs") + " (" +
                      std::to_string(outputs[0].size()) + " bytes)";
        }
        fs::remove_all(dir);
        report(10, ok, "gainlab run is byte-identical across invocations and worker counts", detail);
    }

    std::printf("%s: %d failing\n", g_failures == 0 ? "ALL PASS" : "FAILURES", g_failures);
    return g_failures == 0 ? 0 : 1;
}
