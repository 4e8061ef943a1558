#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "irns/solver.hpp"
#include "irns/trace.hpp"

namespace irns {

// One benchmark configuration: an algorithm on a problem, repeated over
// num_runs independently seeded runs (run i uses seed mix(config.seed, i)).
struct RunSpec {
  Algorithm alg = Algorithm::kIrbfgs;
  std::shared_ptr<const Problem> problem;
  MetricFn metric;
  std::string label;  // file stem, e.g. "hinge_irbfgs"
  SolverConfig config;
  std::size_t num_runs = 10;
};

struct RunOutput {
  std::string label;
  std::vector<std::vector<TraceRecord>> runs;
  std::vector<SolveResult> results;
  std::filesystem::path runs_csv;
  std::filesystem::path aggregate_csv;
};

// Validates the spec (FBFGS needs a bounded sample space), executes every
// run, and writes <label>_runs.csv plus <label>_agg.csv under out_dir.
std::vector<RunOutput> run_suite(const std::vector<RunSpec>& specs,
                                 const std::filesystem::path& out_dir);

// Convenience single-run entry points mirroring the benchmark variants.
SolveResult run_irbfgs(const Problem& problem, const SolverConfig& config,
                       const MetricFn& metric = {});
SolveResult run_hbfgs(const Problem& problem, const SolverConfig& config,
                      const MetricFn& metric = {});
SolveResult run_fbfgs(const Problem& problem, const SolverConfig& config,
                      const MetricFn& metric = {});

// Benchmark CLI; returns the process exit code (2 for usage errors).
int cli_main(int argc, const char* const* argv);

}  // namespace irns
