#include "irns/slcp.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "irns/errors.hpp"
#include "irns/rng.hpp"

namespace irns {

namespace {

// Stream tags so instance data and per-sample draws never collide.
constexpr std::uint64_t kInstanceStream = 0x5c1b0001;
constexpr std::uint64_t kRealizationStream = 0x5c1b0002;

// Entrywise zero-mean unit-variance uniform: sqrt(12) * (U[0,1) - 1/2).
double unit_variance_uniform(std::mt19937_64& gen) {
  return std::sqrt(12.0) * (uniform01(gen) - 0.5);
}

}  // namespace

SlcpInstance generate_slcp(std::size_t n, double sigma, std::uint64_t seed) {
  if (n < 1) throw std::domain_error("generate_slcp: n must be >= 1");
  if (sigma < 0.0) throw std::domain_error("generate_slcp: sigma must be >= 0");
  const auto ni = static_cast<Eigen::Index>(n);

  std::mt19937_64 gen(mix_seed(seed, kInstanceStream));
  Eigen::MatrixXd c(ni, ni);
  for (Eigen::Index i = 0; i < ni; ++i)
    for (Eigen::Index j = 0; j < ni; ++j) c(i, j) = uniform(gen, -1.0, 1.0);

  SlcpInstance inst;
  inst.n = n;
  inst.sigma = sigma;
  inst.m_bar = c.transpose() * c / static_cast<double>(n) +
               Eigen::MatrixXd::Identity(ni, ni);

  const auto support = static_cast<Eigen::Index>((n + 1) / 2);
  inst.x_star = Eigen::VectorXd::Zero(ni);
  inst.s_bar = Eigen::VectorXd::Zero(ni);
  for (Eigen::Index l = 0; l < support; ++l) inst.x_star[l] = uniform_pos(gen);
  for (Eigen::Index l = support; l < ni; ++l) inst.s_bar[l] = uniform_pos(gen);
  inst.q_bar = inst.s_bar - inst.m_bar * inst.x_star;
  return inst;
}

ErmRealization erm_realization(const SlcpInstance& inst, std::uint64_t seed,
                               std::size_t j) {
  const auto ni = static_cast<Eigen::Index>(inst.n);
  std::mt19937_64 gen(mix_seed(mix_seed(seed, kRealizationStream), j));
  ErmRealization real;
  real.m.resize(ni, ni);
  const double m_scale = inst.sigma / std::sqrt(static_cast<double>(inst.n));
  for (Eigen::Index i = 0; i < ni; ++i)
    for (Eigen::Index l = 0; l < ni; ++l)
      real.m(i, l) = inst.m_bar(i, l) + m_scale * unit_variance_uniform(gen);
  real.q.resize(ni);
  for (Eigen::Index l = 0; l < ni; ++l)
    real.q[l] = inst.q_bar[l] + inst.sigma * unit_variance_uniform(gen);
  return real;
}

double erm_value(const ErmRealization& real, const Eigen::VectorXd& x,
                 FevCounter& fev) {
  const Eigen::VectorXd b = real.m * x + real.q;
  fev.charge_matvec(static_cast<std::size_t>(x.size()));
  double acc = 0.0;
  for (Eigen::Index l = 0; l < x.size(); ++l) {
    const double v = std::min(x[l], b[l]);
    acc += v * v;
  }
  return acc;
}

double erm_directional_sup_terms(const ErmRealization& real, const Eigen::VectorXd& x,
                                 const Eigen::VectorXd& p, FevCounter& fev) {
  const Eigen::VectorXd b = real.m * x + real.q;
  fev.charge_matvec(static_cast<std::size_t>(x.size()));
  double acc = 0.0;
  for (Eigen::Index l = 0; l < x.size(); ++l) {
    const double a = x[l];
    const double v = std::min(a, b[l]);
    if (v == 0.0) continue;  // both branch values vanish
    if (a < b[l]) {
      acc += 2.0 * v * p[l];
    } else {
      const double row_p = real.m.row(l).dot(p);
      fev.charge(1);
      const double via_b = 2.0 * v * row_p;
      acc += a > b[l] ? via_b : std::max(2.0 * v * p[l], via_b);
    }
  }
  return acc;
}

// --- problem implementation ---

namespace {

class ErmSampleSet final : public SampleSet {
 public:
  explicit ErmSampleSet(std::uint64_t seed) : SampleSet(seed) {}

  const ErmRealization& realization(std::size_t j) const { return reals_[j]; }

  void extend(const SlcpInstance& inst, std::size_t n) {
    while (reals_.size() < n) {
      reals_.push_back(erm_realization(inst, seed_, reals_.size()));
      size_ = reals_.size();
    }
  }

 private:
  std::vector<ErmRealization> reals_;
};

class ErmBatch final : public EvalBatch {
 public:
  ErmBatch(const ErmProblem& pr, ErmSampleSet& s, Eigen::VectorXd x, FevCounter& fev)
      : pr_(pr), s_(s), x_(std::move(x)), fev_(fev) {
    f_prefix_.push_back(0.0);
  }

  double value(std::size_t n) override {
    materialize(n);
    return f_prefix_[n] / static_cast<double>(n);
  }

  Eigen::VectorXd subgradient(std::size_t n) override {
    materialize(n);
    Eigen::VectorXd g = Eigen::VectorXd::Zero(x_.size());
    for (std::size_t j = 0; j < n; ++j) {
      const Eigen::VectorXd& b = residual_[j];
      const ErmRealization& real = s_.realization(j);
      for (Eigen::Index l = 0; l < x_.size(); ++l) {
        const double v = std::min(x_[l], b[l]);
        if (v == 0.0) continue;
        // Ties take the identity branch.
        if (x_[l] <= b[l])
          g[l] += 2.0 * v;
        else
          g += 2.0 * v * real.m.row(l).transpose();
      }
    }
    return g / static_cast<double>(n);
  }

  double directional_sup(std::size_t n, const Eigen::VectorXd& p) override {
    materialize(n);
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const Eigen::VectorXd& b = residual_[j];
      const ErmRealization& real = s_.realization(j);
      for (Eigen::Index l = 0; l < x_.size(); ++l) {
        const double a = x_[l];
        const double v = std::min(a, b[l]);
        if (v == 0.0) continue;
        if (a < b[l]) {
          acc += 2.0 * v * p[l];
        } else {
          const double row_p = real.m.row(l).dot(p);
          fev_.charge(1);
          const double via_b = 2.0 * v * row_p;
          acc += a > b[l] ? via_b : std::max(2.0 * v * p[l], via_b);
        }
      }
    }
    return acc / static_cast<double>(n);
  }

 private:
  void materialize(std::size_t n) {
    if (n < 1) throw std::domain_error("EvalBatch: N must be >= 1");
    pr_.ensure_samples(s_, n);
    for (std::size_t j = residual_.size(); j < n; ++j) {
      const ErmRealization& real = s_.realization(j);
      Eigen::VectorXd b = real.m * x_ + real.q;
      fev_.charge_matvec(static_cast<std::size_t>(x_.size()));
      double fj = 0.0;
      for (Eigen::Index l = 0; l < x_.size(); ++l) {
        const double v = std::min(x_[l], b[l]);
        fj += v * v;
      }
      residual_.push_back(std::move(b));
      f_prefix_.push_back(f_prefix_.back() + fj);
    }
  }

  const ErmProblem& pr_;
  ErmSampleSet& s_;
  Eigen::VectorXd x_;
  FevCounter& fev_;
  std::vector<Eigen::VectorXd> residual_;  // b_j = M_j x + q_j
  std::vector<double> f_prefix_;
};

}  // namespace

ErmProblem::ErmProblem(SlcpInstance inst) : inst_(std::move(inst)) {
  if (inst_.n == 0) throw ConfigError("ErmProblem: empty instance");
}

std::unique_ptr<SampleSet> ErmProblem::make_samples(std::uint64_t seed) const {
  return std::make_unique<ErmSampleSet>(seed);
}

void ErmProblem::ensure_samples(SampleSet& s, std::size_t n) const {
  static_cast<ErmSampleSet&>(s).extend(inst_, n);
}

std::unique_ptr<EvalBatch> ErmProblem::open_batch(SampleSet& s, Eigen::VectorXd x,
                                                  FevCounter& fev) const {
  return std::make_unique<ErmBatch>(*this, static_cast<ErmSampleSet&>(s), std::move(x),
                                    fev);
}

}  // namespace irns
