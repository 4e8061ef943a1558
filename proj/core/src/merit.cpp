#include "irns/merit.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "irns/errors.hpp"

namespace irns {

InfeasibilityRule InfeasibilityRule::finite_sum(std::size_t n_max) {
  if (n_max < 1) throw std::domain_error("InfeasibilityRule: N_max must be >= 1");
  InfeasibilityRule rule;
  rule.n_max_ = n_max;
  return rule;
}

InfeasibilityRule InfeasibilityRule::unbounded() { return InfeasibilityRule{}; }

std::size_t InfeasibilityRule::n_max() const {
  if (!n_max_) throw std::logic_error("InfeasibilityRule: unbounded rule has no N_max");
  return *n_max_;
}

double InfeasibilityRule::h(std::size_t n) const {
  if (n < 1) throw std::domain_error("h(N): N must be >= 1");
  if (n_max_) {
    if (n > *n_max_)
      throw std::domain_error("h(N): N = " + std::to_string(n) + " exceeds N_max = " +
                              std::to_string(*n_max_));
    return static_cast<double>(*n_max_ - n) / static_cast<double>(*n_max_);
  }
  return 1.0 / static_cast<double>(n);
}

PenaltyUpdate penalty_update(double theta, double f_tilde_minus_f, double h_nk,
                             double h_ntilde, double r) {
  const double dh = h_ntilde - h_nk;  // <= 0 after restoration
  const double lhs = theta * f_tilde_minus_f + (1.0 - theta) * dh;
  const double rhs = 0.5 * (1.0 - r) * dh;
  if (lhs <= rhs) return {theta, false};

  const double denom = 2.0 * (f_tilde_minus_f + h_nk - h_ntilde);
  if (!(denom > 0.0))
    throw InvariantViolation(
        "penalty_update: non-positive denominator with a failed decrease test");
  const double theta_next = (1.0 + r) * (h_nk - h_ntilde) / denom;
  if (!(theta_next > 0.0) || theta_next > theta)
    throw InvariantViolation("penalty_update: theta left (0, theta_k]");
  return {theta_next, true};
}

PenaltyState::PenaltyState(double theta0) : theta_(theta0) {
  if (!(theta0 > 0.0 && theta0 < 1.0))
    throw std::domain_error("PenaltyState: theta0 must lie in (0,1)");
  floor_ = std::numeric_limits<double>::epsilon() * theta0;
}

bool PenaltyState::update(double f_tilde_minus_f, double h_nk, double h_ntilde,
                          double r) {
  const PenaltyUpdate up = penalty_update(theta_, f_tilde_minus_f, h_nk, h_ntilde, r);
  if (up.theta_next < floor_)
    throw InvariantViolation("PenaltyState: theta collapsed below eps * theta0");
  theta_ = up.theta_next;
  return up.formula_used;
}

}  // namespace irns
