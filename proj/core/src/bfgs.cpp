#include "irns/bfgs.hpp"

#include <stdexcept>

namespace irns {

QuasiNewtonState::QuasiNewtonState(std::size_t n, double skip_threshold,
                                   double m_lower, double curvature_floor)
    : b_(Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(n),
                                   static_cast<Eigen::Index>(n))),
      skip_threshold_(skip_threshold),
      m_lower_(m_lower),
      curvature_floor_(curvature_floor) {
  if (n == 0) throw std::domain_error("QuasiNewtonState: dimension must be >= 1");
  if (!(m_lower > 0.0)) throw std::domain_error("QuasiNewtonState: m_lower must be > 0");
}

void QuasiNewtonState::reset() { b_.setIdentity(); }

Eigen::VectorXd QuasiNewtonState::direction(const Eigen::VectorXd& g_bar,
                                            FevCounter& fev) const {
  fev.charge_matvec(static_cast<std::size_t>(b_.rows()));
  return -(b_ * g_bar);
}

QuasiNewtonState::Descent QuasiNewtonState::descent_check(
    EvalBatch& batch, std::size_t n_samples, Eigen::VectorXd& p,
    const Eigen::VectorXd& g_bar, double g_norm_sq) {
  const double bound = -0.5 * m_lower_ * g_norm_sq;
  if (g_norm_sq == 0.0) {
    p.setZero();
    return Descent::kOk;  // stationary for f_N; sup g^T 0 = 0 <= 0
  }
  if (batch.directional_sup(n_samples, p) <= bound) return Descent::kOk;

  // Certificate failed: drop the curvature model and retry with -g_bar.
  reset();
  p = -g_bar;
  if (batch.directional_sup(n_samples, p) <= bound) return Descent::kReset;

  p.setZero();
  return Descent::kStationary;
}

bool QuasiNewtonState::update(const Eigen::VectorXd& s, const Eigen::VectorXd& y,
                              FevCounter& fev) {
  const double y_norm_sq = y.squaredNorm();
  fev.charge(1);
  if (y_norm_sq == 0.0) return false;  // no curvature information

  const double ys = y.dot(s);
  fev.charge(1);
  if (ys < skip_threshold_ * y_norm_sq) return false;
  const double s_norm_sq = s.squaredNorm();
  fev.charge(1);
  if (ys < curvature_floor_ * s_norm_sq) return false;

  // B' = (I - rho s y^T) B (I - rho y s^T) + rho s s^T, rho = 1/(y^T s).
  const double rho = 1.0 / ys;
  const Eigen::VectorXd by = b_ * y;
  fev.charge_matvec(static_cast<std::size_t>(b_.rows()));
  const double yby = y.dot(by);
  fev.charge(1);
  b_.noalias() -= rho * (s * by.transpose() + by * s.transpose());
  b_.noalias() += (rho * rho * yby + rho) * (s * s.transpose());
  // Keep exact symmetry against drift from the rank updates.
  b_ = 0.5 * (b_ + b_.transpose()).eval();
  return true;
}

}  // namespace irns
