#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "irns/sampling.hpp"

namespace irns {

// Stochastic LCP instance with a known expected-value solution:
//   x* >= 0,  Mbar x* + qbar = sbar >= 0,  x*^T sbar = 0.
// Random data: M(xi) = Mbar + (sigma/sqrt(n)) Delta(xi),
//              q(xi) = qbar + sigma delta(xi),
// with Delta, delta entrywise zero-mean unit-variance uniform.
struct SlcpInstance {
  std::size_t n = 0;
  double sigma = 0;
  Eigen::MatrixXd m_bar;
  Eigen::VectorXd q_bar;
  Eigen::VectorXd x_star;
  Eigen::VectorXd s_bar;
};

// Deterministic from seed: C entrywise uniform on [-1,1], Mbar = C^T C / n + I,
// x* positive on the first ceil(n/2) coordinates and zero elsewhere, sbar
// complementary to x*, qbar = sbar - Mbar x*.
SlcpInstance generate_slcp(std::size_t n, double sigma, std::uint64_t seed);

// One drawn (M(xi_j), q(xi_j)) pair; a pure function of (instance, seed, j).
struct ErmRealization {
  Eigen::MatrixXd m;
  Eigen::VectorXd q;
};

ErmRealization erm_realization(const SlcpInstance& inst, std::uint64_t seed,
                               std::size_t j);

// Per-sample residual value f_j(x) = sum_l min(x_l, (M_j x + q_j)_l)^2.
double erm_value(const ErmRealization& real, const Eigen::VectorXd& x,
                 FevCounter& fev);

// Exact sup of g^T p over the generalized gradient of f_j at x; ties
// a_l = b_l take the larger of the two one-sided branch values.
double erm_directional_sup_terms(const ErmRealization& real, const Eigen::VectorXd& x,
                                 const Eigen::VectorXd& p, FevCounter& fev);

// Expected-residual-minimization problem over an SLCP instance; the sample
// stream is unbounded and extends lazily.
class ErmProblem : public Problem {
 public:
  explicit ErmProblem(SlcpInstance inst);

  const SlcpInstance& instance() const { return inst_; }
  const Eigen::VectorXd& x_star() const { return inst_.x_star; }

  std::size_t dimension() const override { return inst_.n; }
  std::optional<std::size_t> max_samples() const override { return std::nullopt; }
  std::unique_ptr<SampleSet> make_samples(std::uint64_t seed) const override;
  void ensure_samples(SampleSet& s, std::size_t n) const override;
  std::unique_ptr<EvalBatch> open_batch(SampleSet& s, Eigen::VectorXd x,
                                        FevCounter& fev) const override;

 private:
  SlcpInstance inst_;
};

}  // namespace irns
