#include "irns/sampling.hpp"

namespace irns {

double saa_value(const Problem& problem, SampleSet& s, std::size_t n,
                 const Eigen::VectorXd& x, FevCounter& fev) {
  return problem.open_batch(s, x, fev)->value(n);
}

Eigen::VectorXd saa_subgradient(const Problem& problem, SampleSet& s, std::size_t n,
                                const Eigen::VectorXd& x, FevCounter& fev) {
  return problem.open_batch(s, x, fev)->subgradient(n);
}

double saa_directional_sup(const Problem& problem, SampleSet& s, std::size_t n,
                           const Eigen::VectorXd& x, const Eigen::VectorXd& p,
                           FevCounter& fev) {
  return problem.open_batch(s, x, fev)->directional_sup(n, p);
}

}  // namespace irns
