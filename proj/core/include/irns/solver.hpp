#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "irns/bfgs.hpp"
#include "irns/fev.hpp"
#include "irns/merit.hpp"
#include "irns/sampling.hpp"

namespace irns {

enum class Algorithm {
  kIrbfgs,  // adaptive sample size, three candidates per backtracking step
  kHbfgs,   // monotone heuristic: N_{k+1} = Ntilde_{k+1}
  kFbfgs,   // full sample every iteration (finite sums only)
};

const char* algorithm_name(Algorithm alg);

struct SolverConfig {
  double theta0 = 0.9;
  double r = 0.95;
  double gamma = 1e-4;
  double gamma_bar = 1.0;
  // Monitored restoration growth bound; violations are counted (or abort
  // the run in strict mode), never repaired.
  double beta = 1e6;
  std::size_t n0 = 0;        // required
  std::uint64_t max_fev = 0;  // required; checked between iterations
  double alpha_min = 0x1.0p-30;
  std::uint64_t seed = 0;
  bool strict_beta = false;
  double grad_tol = 0.0;  // optional early stop on ||g_bar||; 0 disables
  double bfgs_skip_threshold = 1e-4;
  double m_lower = 1e-8;
  // Curvature floor for BFGS pairs; <= 0 takes 2 * gamma, keeping accepted
  // curvature above the Armijo decrease rate.
  double bfgs_curvature_floor = 0.0;
  // Record wall-clock per trace point. Off by default: emitted data files
  // are byte-reproducible, which measured times would break.
  bool time_trace = false;
};

// Restoration phase: smallest-growth sample size with h(Ntilde) <= r h(N_k).
// Finite sum: min{N_max, ceil(N_max - r (N_max - N_k))}; unbounded:
// ceil(N_k / r). The closed form is nudged up by one in the rare cases
// where floating-point rounding of h leaves the inequality violated by an
// ulp, so the postcondition holds exactly as computed.
std::size_t restoration(const InfeasibilityRule& rule, std::size_t n_k, double r);

struct BetaCheck {
  bool ok;
  double ratio;  // (f_tilde - f_nk) / h(N_k); 0 when the check is skipped
};

// Monitors f_tilde(x_k) - f_{N_k}(x_k) <= beta h(N_k). Skipped (ok) when
// h(N_k) = 0, which only happens at the full sample where f_tilde = f_{N_k}.
BetaCheck beta_monitor(double f_tilde, double f_nk, double h_nk, double beta);

// Lower estimate for the next sample size, evaluated verbatim from the
// merit-decrease condition with ||p_{k-1}||^2 standing in for ||p_k||^2,
// then clamped to [n0, n_tilde]. A non-positive denominator in the
// unbounded formula means no decrease is possible and n_tilde is returned.
std::size_t trial_sample_size(const InfeasibilityRule& rule, std::size_t n_k,
                              std::size_t n_tilde, double theta_next, double alpha,
                              double prev_dir_norm_sq, double f_tilde, double f_nk,
                              std::size_t n0, double gamma, double r);

// Per-iteration certificate data; every accepted step must satisfy the
// three acceptance inequalities and the penalty-update inequality, and the
// fields below allow re-verifying them externally.
struct IterationAudit {
  std::size_t k = 0;
  std::size_t n_k = 0, n_tilde = 0, n_next = 0;
  double theta_k = 0, theta_next = 0;
  double alpha = 0;
  double h_nk = 0, h_ntilde = 0, h_nnext = 0;
  double f_nk = 0, f_ntilde = 0, f_next = 0;
  double dir_norm_sq = 0;
  double eq5_lhs = 0, eq5_rhs = 0;
  double eq6_lhs = 0, eq6_rhs = 0;
  double eq7_lhs = 0, eq7_rhs = 0;
  double beta_ratio = 0;
  bool beta_ok = true;
};

struct TracePoint {
  std::size_t k = 0;
  std::uint64_t fev = 0;
  std::size_t n_k = 0;
  double theta = 0;
  double alpha = 0;
  double metric = 0;
  double wall_ms = 0;  // 0 unless SolverConfig::time_trace
};

struct SolveResult {
  std::vector<TracePoint> trace;
  std::vector<IterationAudit> audits;
  Eigen::VectorXd x;
  std::size_t n_final = 0;
  double theta_final = 0;
  std::uint64_t fev = 0;
  double sum_h = 0;            // running sum of h(N_k) including k = 0
  double beta_ratio_max = 0;   // largest positive monitored ratio
  std::size_t beta_violations = 0;
};

using MetricFn = std::function<double(const Eigen::VectorXd&)>;

// Runs the solver until the scalar-product budget is exhausted. x0 is drawn
// uniformly from [0,1]^n using config.seed; sample realizations use an
// independent stream derived from the same seed. The metric is recorded per
// trace point on a scratch counter and never charges the run budget.
SolveResult solve(const Problem& problem, const SolverConfig& config, Algorithm alg,
                  const MetricFn& metric = {});

// Same, from an explicit starting point.
SolveResult solve_from(const Problem& problem, const SolverConfig& config,
                       Algorithm alg, Eigen::VectorXd x0, const MetricFn& metric = {});

// --- optimization phase internals, exposed for targeted tests ---

struct PhaseContext {
  const Problem& problem;
  SampleSet& sample;
  const InfeasibilityRule& rule;
  const SolverConfig& config;
  Algorithm alg;
  const Eigen::VectorXd& x;
  std::size_t n_k;
  std::size_t n_tilde;
  double theta_next;
  double f_nk;      // f_{N_k}(x_k)
  double f_ntilde;  // f_{Ntilde}(x_k)
  double prev_dir_norm_sq;
};

struct PhaseResult {
  Eigen::VectorXd x_next;
  Eigen::VectorXd p;
  Eigen::VectorXd g_at_x;  // subgradient behind the accepted direction
  std::size_t n_next = 0;
  double alpha = 0;
  double f_next = 0;
  double dir_norm_sq = 0;
  // Residuals at x_next; null for a null step (p = 0, x unchanged).
  std::unique_ptr<EvalBatch> batch_next;
  double eq5_lhs = 0, eq5_rhs = 0;
  double eq6_lhs = 0, eq6_rhs = 0;
  double eq7_lhs = 0, eq7_rhs = 0;
};

// Scans alpha = 0.5^j and, per alpha, the candidate sample sizes in
// ascending order, returning the first triple accepted by the Armijo,
// infeasibility-slack and merit-decrease conditions. Throws
// LineSearchFailure below config.alpha_min.
PhaseResult optimization_phase(const PhaseContext& ctx, EvalBatch& at_x,
                               QuasiNewtonState& qn, FevCounter& fev);

}  // namespace irns
