#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "gainlab/errors.hpp"
#include "gainlab/experiment.hpp"

namespace gainlab {

std::string format_double(double value) {
    char buf[64];
    const auto result = std::to_chars(buf, buf + sizeof(buf), value);
    return {buf, result.ptr};
}

namespace {

// JSON has no NaN/Inf; failed trials carry null instead.
std::string json_number(double value) { return std::isfinite(value) ? format_double(value) : "null"; }

const char* json_bool(bool b) { return b ? "true" : "false"; }

std::string json_string(const std::string& s) { return nlohmann::json(s).dump(); }

const char* format_name(OutputFormat format) { return format == OutputFormat::Json ? "json" : "csv"; }

void write_triple(std::ostream& os, const PerObjective<double>& t) {
    os << "{\"trace\": " << json_number(t.trace) << ", \"logdet\": " << json_number(t.logdet)
       << ", \"entropy\": " << json_number(t.entropy) << '}';
}

void write_triple(std::ostream& os, const PerObjective<std::size_t>& t) {
    os << "{\"trace\": " << t.trace << ", \"logdet\": " << t.logdet << ", \"entropy\": " << t.entropy << '}';
}

void write_triple(std::ostream& os, const PerObjective<bool>& t) {
    os << "{\"trace\": " << json_bool(t.trace) << ", \"logdet\": " << json_bool(t.logdet)
       << ", \"entropy\": " << json_bool(t.entropy) << '}';
}

void require_records(const ExperimentResult& result) {
    if (result.trials.empty()) throw InvalidParameter("emit_report: no trial records");
}

}  // namespace

std::string render_json(const ExperimentResult& result) {
    require_records(result);
    const ExperimentConfig& c = result.config;
    std::ostringstream os;
    os << "{\n  \"config\": {"
       << "\"state_dim\": " << c.state_dim << ", \"obs_dim\": " << c.obs_dim << ", \"trials\": " << c.trials
       << ", \"seed\": " << c.master_seed << ", \"cond\": " << json_number(c.cond_target)
       << ", \"grad_tol\": " << json_number(c.grad_tol) << ", \"max_iters\": " << c.max_iters
       << ", \"gain_distance_tol\": " << json_number(kGainDistanceTol) << "},\n  \"trials\": [";

    for (std::size_t i = 0; i < result.trials.size(); ++i) {
        const TrialRecord& t = result.trials[i];
        os << (i == 0 ? "\n" : ",\n") << "    {\"trial_index\": " << t.trial_index << ", \"seed_used\": " << t.seed_used
           << ", \"gain_distance_logdet\": " << json_number(t.gain_distance_logdet)
           << ", \"gain_distance_trace\": " << json_number(t.gain_distance_trace)
           << ", \"gain_distance_entropy\": " << json_number(t.gain_distance_entropy)
           << ", \"stationarity_residual\": " << json_number(t.stationarity_residual)
           << ", \"objective_at_analytic\": ";
        write_triple(os, t.objective_at_analytic);
        os << ", \"iterations\": ";
        write_triple(os, t.iterations);
        os << ", \"converged\": ";
        write_triple(os, t.converged);
        os << ", \"passed\": " << json_bool(t.passed()) << ", \"failed\": " << json_bool(t.failed);
        if (t.failed) os << ", \"error\": " << json_string(t.error);
        os << '}';
    }

    const SummaryRecord& s = result.summary;
    os << "\n  ],\n  \"summary\": {"
       << "\"trials\": " << s.trials << ", \"failures\": " << s.failures
       << ", \"unconverged_runs\": " << s.unconverged_runs
       << ", \"max_gain_distance\": " << json_number(s.max_gain_distance)
       << ", \"mean_gain_distance_logdet\": " << json_number(s.mean_gain_distance_logdet)
       << ", \"mean_gain_distance_trace\": " << json_number(s.mean_gain_distance_trace)
       << ", \"mean_gain_distance_entropy\": " << json_number(s.mean_gain_distance_entropy)
       << ", \"max_stationarity_residual\": " << json_number(s.max_stationarity_residual) << "}\n}\n";
    return os.str();
}

std::string render_csv(const ExperimentResult& result) {
    require_records(result);
    std::ostringstream os;
    os << kCsvHeader << '\n';
    for (const TrialRecord& t : result.trials) {
        os << t.trial_index << ',' << t.seed_used << ',' << format_double(t.gain_distance_logdet) << ','
           << format_double(t.gain_distance_trace) << ',' << format_double(t.gain_distance_entropy) << ','
           << format_double(t.stationarity_residual) << ',' << t.iterations.logdet << ',' << t.iterations.trace << ','
           << t.iterations.entropy << ',' << (t.converged_all() ? "true" : "false") << '\n';
    }
    const SummaryRecord& s = result.summary;
    os << "# summary trials=" << s.trials << ",failures=" << s.failures << ",unconverged_runs=" << s.unconverged_runs
       << ",max_gain_distance=" << format_double(s.max_gain_distance)
       << ",mean_gain_distance_logdet=" << format_double(s.mean_gain_distance_logdet)
       << ",mean_gain_distance_trace=" << format_double(s.mean_gain_distance_trace)
       << ",mean_gain_distance_entropy=" << format_double(s.mean_gain_distance_entropy)
       << ",max_stationarity_residual=" << format_double(s.max_stationarity_residual) << '\n';
    return os.str();
}

void emit_report(const ExperimentResult& result, OutputFormat format, const std::string& path) {
    const std::string text = format == OutputFormat::Json ? render_json(result) : render_csv(result);
    if (path == kStdoutPath) {
        std::cout << text << std::flush;
        return;
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path + " for writing " + format_name(format) + " report");
    out << text;
    out.flush();
    if (!out) throw IoError("failed writing " + path);
}

}  // namespace gainlab
