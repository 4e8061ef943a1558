#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <optional>

#include "irns/fev.hpp"

namespace irns {

// Cumulative i.i.d. realization stream. Realization i is a pure function
// of (seed, i): extending the stream never perturbs existing entries, so
// f_N computed after growing the stream to N' > N is bit-identical to the
// value computed at length N.
class SampleSet {
 public:
  virtual ~SampleSet() = default;
  std::uint64_t seed() const { return seed_; }
  // Realizations materialized so far.
  std::size_t size() const { return size_; }

 protected:
  explicit SampleSet(std::uint64_t seed) : seed_(seed) {}
  std::uint64_t seed_;
  std::size_t size_ = 0;
};

// Point-bound evaluator over a growing sample prefix. Per-sample residual
// data (margins, complementarity residuals) is computed once and shared by
// value, subgradient and directional-sup queries at the same point; the
// shared scalar products are charged to the counter exactly once.
class EvalBatch {
 public:
  virtual ~EvalBatch() = default;

  // f_N at the bound point. Extends the residual cache to N samples.
  virtual double value(std::size_t n) = 0;

  // One element of the subdifferential of f_N at the bound point, selected
  // by the problem's kink tie-break rule.
  virtual Eigen::VectorXd subgradient(std::size_t n) = 0;

  // sup of g^T p over the full subdifferential of f_N at the bound point,
  // exact via per-sample extreme-selection maxima.
  virtual double directional_sup(std::size_t n, const Eigen::VectorXd& p) = 0;
};

// A stochastic objective E[F(x,xi)] presented through per-sample evaluators.
// Every per-sample function is expected to be continuous and bounded below;
// the two shipped families are convex per sample except for the LCP residual
// (which the solver handles unchanged).
class Problem {
 public:
  virtual ~Problem() = default;

  virtual std::size_t dimension() const = 0;

  // Full sample count for finite sums; nullopt for unbounded streams.
  virtual std::optional<std::size_t> max_samples() const = 0;

  virtual std::unique_ptr<SampleSet> make_samples(std::uint64_t seed) const = 0;

  // Materialize realizations up to n. Bounded problems pre-load everything,
  // so n > N_max throws SampleExhausted; unbounded streams extend lazily.
  virtual void ensure_samples(SampleSet& s, std::size_t n) const = 0;

  virtual std::unique_ptr<EvalBatch> open_batch(SampleSet& s, Eigen::VectorXd x,
                                                FevCounter& fev) const = 0;
};

// One-shot SAA entry points. Callers that evaluate several quantities at
// the same point should open a batch instead to share residual work.
double saa_value(const Problem& problem, SampleSet& s, std::size_t n,
                 const Eigen::VectorXd& x, FevCounter& fev);

Eigen::VectorXd saa_subgradient(const Problem& problem, SampleSet& s, std::size_t n,
                                const Eigen::VectorXd& x, FevCounter& fev);

double saa_directional_sup(const Problem& problem, SampleSet& s, std::size_t n,
                           const Eigen::VectorXd& x, const Eigen::VectorXd& p,
                           FevCounter& fev);

}  // namespace irns
