#pragma once

#include <cstddef>
#include <optional>

namespace irns {

// Infeasibility proxy h(N): strictly decreasing in N, nonnegative.
// Finite sums use h(N) = (N_max - N)/N_max, which hits zero at the full
// sample; unbounded streams use h(N) = 1/N.
class InfeasibilityRule {
 public:
  static InfeasibilityRule finite_sum(std::size_t n_max);
  static InfeasibilityRule unbounded();

  bool is_finite_sum() const { return n_max_.has_value(); }
  std::size_t n_max() const;  // finite-sum only

  // Domain: N >= 1, and N <= N_max for finite sums.
  double h(std::size_t n) const;

 private:
  InfeasibilityRule() = default;
  std::optional<std::size_t> n_max_;
};

// Phi(x, N, theta) = theta * f_N(x) + (1 - theta) * h(N).
inline double merit(double f_val, double h_val, double theta) {
  return theta * f_val + (1.0 - theta) * h_val;
}

struct PenaltyUpdate {
  double theta_next;
  bool formula_used;  // false: the decrease test already held at theta_k
};

// Penalty update. Keeps theta_k when
//   Phi(x,Ntilde,theta) - Phi(x,N,theta) <= (1-r)/2 (h(Ntilde) - h(N)),
// otherwise sets theta to the value that makes the inequality tight:
//   (1+r)(h(N)-h(Ntilde)) / 2[f_tilde - f + h(N) - h(Ntilde)].
// The else-branch denominator is positive whenever the test fails with a
// valid restoration; a non-positive denominator raises InvariantViolation.
PenaltyUpdate penalty_update(double theta, double f_tilde_minus_f, double h_nk,
                             double h_ntilde, double r);

// theta_k holder enforcing positivity, monotone non-increase and the
// machine-epsilon * theta0 floor.
class PenaltyState {
 public:
  explicit PenaltyState(double theta0);
  double theta() const { return theta_; }
  // Applies penalty_update; returns true when the update formula fired.
  bool update(double f_tilde_minus_f, double h_nk, double h_ntilde, double r);

 private:
  double theta_;
  double floor_;
};

}  // namespace irns
