#pragma once

#include <Eigen/Dense>

#include "irns/fev.hpp"
#include "irns/sampling.hpp"

namespace irns {

// Safeguarded nonsmooth inverse-BFGS direction oracle.
//
// The matrix starts at the identity and updates are skipped when the
// curvature pair is unreliable: y^T s < skip_threshold * ||y||^2, or the
// Rayleigh curvature falls below the line-search decrease rate
// (y^T s < curvature_floor * ||s||^2). Without the second guard a
// regularizer-dominated pair like y = lambda s with lambda below gamma is
// accepted, B picks up eigenvalues ~1/lambda, and the Armijo test
// f(x + a p) - f(x) <= -gamma a ||p||^2 becomes unsatisfiable for every
// step size. The descent certificate
//   sup_{g in df_N(x)} g^T p  <=  -(m_lower/2) ||g_bar||^2
// is enforced for every direction handed to the line search, resetting to
// the identity when it fails.
class QuasiNewtonState {
 public:
  explicit QuasiNewtonState(std::size_t n, double skip_threshold = 1e-4,
                            double m_lower = 1e-8, double curvature_floor = 2e-4);

  const Eigen::MatrixXd& matrix() const { return b_; }
  double skip_threshold() const { return skip_threshold_; }
  double m_lower() const { return m_lower_; }
  double curvature_floor() const { return curvature_floor_; }

  void reset();

  // p = -B g_bar; one n x n matrix-vector product (n FEV).
  Eigen::VectorXd direction(const Eigen::VectorXd& g_bar, FevCounter& fev) const;

  enum class Descent {
    kOk,          // certificate holds for p as given
    kReset,       // B reset to identity; p replaced by -g_bar, which passed
    kStationary,  // even -g_bar fails: x declared stationary for f_N, p = 0
  };

  // Runs the descent certificate against the batch's sup oracle, mutating
  // p (and this state, on reset) as described above. g_norm_sq must be
  // ||g_bar||^2, already charged by the caller; the oracle's scalar
  // products go to the counter the batch was opened with.
  Descent descent_check(EvalBatch& batch, std::size_t n_samples, Eigen::VectorXd& p,
                        const Eigen::VectorXd& g_bar, double g_norm_sq);

  // Inverse-BFGS update from the step pair (s, y). Returns false when the
  // skip rule fired (including y = 0) and the matrix is unchanged.
  bool update(const Eigen::VectorXd& s, const Eigen::VectorXd& y, FevCounter& fev);

 private:
  Eigen::MatrixXd b_;
  double skip_threshold_;
  double m_lower_;
  double curvature_floor_;
};

}  // namespace irns
