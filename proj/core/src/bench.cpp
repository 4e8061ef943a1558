#include "irns/bench.hpp"

#include <cstdlib>
#include <string>

#include "irns/errors.hpp"
#include "irns/rng.hpp"

namespace irns {

namespace {

bool timing_enabled() {
  const char* v = std::getenv("IRNS_TIMING");
  return v != nullptr && std::string(v) == "1";
}

void validate_spec(const RunSpec& spec) {
  if (!spec.problem) throw ConfigError("run_suite: spec has no problem");
  if (!spec.metric) throw ConfigError("run_suite: spec has no metric");
  if (spec.label.empty()) throw ConfigError("run_suite: spec has no label");
  if (spec.num_runs < 1) throw ConfigError("run_suite: num_runs must be >= 1");
  if (spec.alg == Algorithm::kFbfgs && !spec.problem->max_samples())
    throw ConfigError("run_suite: FBFGS needs a bounded sample space (label '" +
                      spec.label + "')");
}

}  // namespace

std::vector<RunOutput> run_suite(const std::vector<RunSpec>& specs,
                                 const std::filesystem::path& out_dir) {
  for (const RunSpec& spec : specs) validate_spec(spec);
  std::filesystem::create_directories(out_dir);
  const bool timing = timing_enabled();

  std::vector<RunOutput> outputs;
  outputs.reserve(specs.size());
  for (const RunSpec& spec : specs) {
    RunOutput out;
    out.label = spec.label;
    out.runs.reserve(spec.num_runs);
    out.results.reserve(spec.num_runs);
    for (std::size_t run = 0; run < spec.num_runs; ++run) {
      SolverConfig cfg = spec.config;
      cfg.seed = mix_seed(spec.config.seed, run);
      cfg.time_trace = timing;
      SolveResult res = solve(*spec.problem, cfg, spec.alg, spec.metric);
      std::vector<TraceRecord> records;
      records.reserve(res.trace.size());
      for (const TracePoint& t : res.trace)
        records.push_back({run, t.k, t.fev, t.n_k, t.theta, t.alpha, t.metric,
                           t.wall_ms});
      out.runs.push_back(std::move(records));
      out.results.push_back(std::move(res));
    }

    out.runs_csv = out_dir / (spec.label + "_runs.csv");
    out.aggregate_csv = out_dir / (spec.label + "_agg.csv");
    std::vector<TraceRecord> flat;
    for (const auto& run : out.runs) flat.insert(flat.end(), run.begin(), run.end());
    write_run_csv(out.runs_csv, flat);
    write_aggregate_csv(out.aggregate_csv, aggregate_traces(out.runs));
    outputs.push_back(std::move(out));
  }
  return outputs;
}

SolveResult run_irbfgs(const Problem& problem, const SolverConfig& config,
                       const MetricFn& metric) {
  return solve(problem, config, Algorithm::kIrbfgs, metric);
}

SolveResult run_hbfgs(const Problem& problem, const SolverConfig& config,
                      const MetricFn& metric) {
  return solve(problem, config, Algorithm::kHbfgs, metric);
}

SolveResult run_fbfgs(const Problem& problem, const SolverConfig& config,
                      const MetricFn& metric) {
  return solve(problem, config, Algorithm::kFbfgs, metric);
}

}  // namespace irns
