#pragma once

// Test-only helpers: independent oracles (brute-force subdifferential
// enumeration, central finite differences), a tiny 1-D nonsmooth problem
// family, and synthetic dataset generators. Everything here stays
// independent of the library code paths it is used to check.

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "irns/errors.hpp"
#include "irns/hinge.hpp"
#include "irns/rng.hpp"
#include "irns/sampling.hpp"
#include "irns/slcp.hpp"

namespace irns_test {

// --- 1-D finite-sum family f_i(x) = |x - a_i| -------------------------------
// Anchors are consumed in the order given (no shuffling), which makes prefix
// behavior fully controllable from the test.

class AbsProblem final : public irns::Problem {
 public:
  explicit AbsProblem(std::vector<double> anchors) : a_(std::move(anchors)) {}

  std::size_t dimension() const override { return 1; }
  std::optional<std::size_t> max_samples() const override { return a_.size(); }

  std::unique_ptr<irns::SampleSet> make_samples(std::uint64_t seed) const override {
    struct Set final : irns::SampleSet {
      Set(std::uint64_t seed, std::size_t n) : SampleSet(seed) { size_ = n; }
    };
    return std::make_unique<Set>(seed, a_.size());
  }

  void ensure_samples(irns::SampleSet&, std::size_t n) const override {
    if (n > a_.size()) throw irns::SampleExhausted("abs problem out of samples");
  }

  std::unique_ptr<irns::EvalBatch> open_batch(irns::SampleSet& s, Eigen::VectorXd x,
                                              irns::FevCounter& fev) const override {
    struct Batch final : irns::EvalBatch {
      Batch(const AbsProblem& pr, irns::SampleSet& s, Eigen::VectorXd x,
            irns::FevCounter& fev)
          : pr(pr), s(s), x(std::move(x)), fev(fev) {}

      void materialize(std::size_t n) {
        if (n < 1) throw std::domain_error("N must be >= 1");
        pr.ensure_samples(s, n);
        for (std::size_t i = d.size(); i < n; ++i) {
          d.push_back(x[0] - pr.a_[i]);
          fev.charge(1);
        }
      }
      double value(std::size_t n) override {
        materialize(n);
        double acc = 0;
        for (std::size_t i = 0; i < n; ++i) acc += std::abs(d[i]);
        return acc / static_cast<double>(n);
      }
      Eigen::VectorXd subgradient(std::size_t n) override {
        materialize(n);
        double acc = 0;
        for (std::size_t i = 0; i < n; ++i)
          acc += d[i] > 0 ? 1.0 : (d[i] < 0 ? -1.0 : 0.0);
        Eigen::VectorXd g(1);
        g[0] = acc / static_cast<double>(n);
        return g;
      }
      double directional_sup(std::size_t n, const Eigen::VectorXd& p) override {
        materialize(n);
        double acc = 0;
        for (std::size_t i = 0; i < n; ++i) {
          fev.charge(1);
          if (d[i] > 0)
            acc += p[0];
          else if (d[i] < 0)
            acc -= p[0];
          else
            acc += std::abs(p[0]);
        }
        return acc / static_cast<double>(n);
      }

      const AbsProblem& pr;
      irns::SampleSet& s;
      Eigen::VectorXd x;
      irns::FevCounter& fev;
      std::vector<double> d;
    };
    return std::make_unique<Batch>(*this, s, std::move(x), fev);
  }

  std::vector<double> a_;
};

// --- independent oracles -----------------------------------------------------

// Brute-force sup over the hinge SAA subdifferential at the full sample:
// enumerate every extreme selection at kink-active terms. Plain loops only.
inline double brute_hinge_sup(const irns::HingeDataset& d, const Eigen::VectorXd& x,
                              const Eigen::VectorXd& p) {
  const std::size_t n = d.n_max();
  const double inv_n = 1.0 / static_cast<double>(n);
  Eigen::VectorXd base = d.lambda * x;
  std::vector<std::size_t> ties;
  for (std::size_t i = 0; i < n; ++i) {
    double dot = 0;
    for (const irns::SparseEntry& e : d.features[i]) dot += e.value * x[e.index];
    const double margin = 1.0 - d.labels[i] * dot;
    if (margin > 0) {
      for (const irns::SparseEntry& e : d.features[i])
        base[e.index] -= d.labels[i] * e.value * inv_n;
    } else if (margin == 0) {
      ties.push_back(i);
    }
  }
  double best = -std::numeric_limits<double>::infinity();
  for (std::uint64_t mask = 0; mask < (1ULL << ties.size()); ++mask) {
    Eigen::VectorXd g = base;
    for (std::size_t b = 0; b < ties.size(); ++b) {
      if (mask & (1ULL << b)) {
        const std::size_t i = ties[b];
        for (const irns::SparseEntry& e : d.features[i])
          g[e.index] -= d.labels[i] * e.value * inv_n;
      }
    }
    best = std::max(best, g.dot(p));
  }
  return best;
}

// Same for the LCP residual SAA, regenerating realizations through the
// public pure function and enumerating per-component branch choices at ties.
inline double brute_erm_sup(const irns::SlcpInstance& inst, std::uint64_t sample_seed,
                            std::size_t n, const Eigen::VectorXd& x,
                            const Eigen::VectorXd& p) {
  struct Tie {
    double v;
    Eigen::Index l;
    Eigen::VectorXd row;
  };
  const double inv_n = 1.0 / static_cast<double>(n);
  Eigen::VectorXd base = Eigen::VectorXd::Zero(x.size());
  std::vector<Tie> ties;
  for (std::size_t j = 0; j < n; ++j) {
    const irns::ErmRealization real = irns::erm_realization(inst, sample_seed, j);
    const Eigen::VectorXd b = real.m * x + real.q;
    for (Eigen::Index l = 0; l < x.size(); ++l) {
      const double v = std::min(x[l], b[l]);
      if (x[l] < b[l])
        base[l] += 2.0 * v * inv_n;
      else if (x[l] > b[l])
        base += 2.0 * v * inv_n * real.m.row(l).transpose();
      else
        ties.push_back({v, l, real.m.row(l).transpose()});
    }
  }
  double best = -std::numeric_limits<double>::infinity();
  for (std::uint64_t mask = 0; mask < (1ULL << ties.size()); ++mask) {
    Eigen::VectorXd g = base;
    for (std::size_t b = 0; b < ties.size(); ++b) {
      const Tie& t = ties[b];
      if (mask & (1ULL << b))
        g += 2.0 * t.v * inv_n * t.row;
      else
        g[t.l] += 2.0 * t.v * inv_n;
    }
    best = std::max(best, g.dot(p));
  }
  return best;
}

// Per-sample variant for hand-built realizations.
inline double brute_erm_sample_sup(const irns::ErmRealization& real,
                                   const Eigen::VectorXd& x, const Eigen::VectorXd& p) {
  irns::SlcpInstance inst;  // wrap the single realization as a 1-sample SAA
  inst.n = static_cast<std::size_t>(x.size());
  inst.sigma = 0.0;
  inst.m_bar = real.m;
  inst.q_bar = real.q;
  inst.x_star = Eigen::VectorXd::Zero(x.size());
  inst.s_bar = Eigen::VectorXd::Zero(x.size());
  return brute_erm_sup(inst, 0, 1, x, p);
}

// Central finite differences of f_N through saa_value.
inline Eigen::VectorXd central_diff(const irns::Problem& pr, irns::SampleSet& s,
                                    std::size_t n, const Eigen::VectorXd& x,
                                    double step) {
  irns::FevCounter scratch;
  Eigen::VectorXd g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Eigen::VectorXd xp = x, xm = x;
    xp[i] += step;
    xm[i] -= step;
    g[i] = (irns::saa_value(pr, s, n, xp, scratch) -
            irns::saa_value(pr, s, n, xm, scratch)) /
           (2.0 * step);
  }
  return g;
}

// --- synthetic data ----------------------------------------------------------

// Linearly separable hinge data: every sample satisfies |u^T w_i| >= margin
// for a fixed unit direction u, so x = u/margin achieves zero loss.
inline irns::HingeDataset make_separable_hinge(std::size_t n_max, std::size_t dim,
                                               double margin, double lambda,
                                               std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  Eigen::VectorXd u(static_cast<Eigen::Index>(dim));
  for (Eigen::Index i = 0; i < u.size(); ++i) u[i] = irns::uniform(gen, -1.0, 1.0);
  u.normalize();

  irns::HingeDataset d;
  d.dimension = dim;
  d.lambda = lambda;
  for (std::size_t i = 0; i < n_max; ++i) {
    Eigen::VectorXd w(u.size());
    for (Eigen::Index j = 0; j < w.size(); ++j) w[j] = irns::uniform(gen, -1.0, 1.0);
    double m = u.dot(w);
    const double sgn = m >= 0 ? 1.0 : -1.0;
    if (std::abs(m) < margin) {
      w += (margin * sgn - m) * u;
      m = margin * sgn;
    }
    irns::SparseVec row;
    for (Eigen::Index j = 0; j < w.size(); ++j)
      row.push_back({static_cast<std::int32_t>(j), w[j]});
    d.features.push_back(std::move(row));
    d.labels.push_back(static_cast<std::int8_t>(sgn));
  }
  return d;
}

// Unstructured random hinge data (not separable in general).
inline irns::HingeDataset make_random_hinge(std::size_t n_max, std::size_t dim,
                                            double lambda, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  irns::HingeDataset d;
  d.dimension = dim;
  d.lambda = lambda;
  for (std::size_t i = 0; i < n_max; ++i) {
    irns::SparseVec row;
    for (std::size_t j = 0; j < dim; ++j)
      row.push_back({static_cast<std::int32_t>(j), irns::uniform(gen, -1.0, 1.0)});
    d.features.push_back(std::move(row));
    d.labels.push_back(irns::uniform01(gen) < 0.5 ? std::int8_t{-1} : std::int8_t{1});
  }
  return d;
}

// --- dyadic instances with exactly representable kinks ------------------------
// All values live on the k/4 grid (or powers of two where reciprocals are
// needed), so margins and residual ties are exact in double precision and
// both the oracle and the brute force see identical kink sets.

inline double dyadic(std::mt19937_64& gen, int lo_quarters = -8, int hi_quarters = 8) {
  const auto span = static_cast<std::uint64_t>(hi_quarters - lo_quarters + 1);
  return static_cast<double>(
             lo_quarters + static_cast<int>(irns::uniform_index(gen, span))) /
         4.0;
}

struct KinkHingeCase {
  irns::HingeDataset data;
  Eigen::VectorXd x;
  Eigen::VectorXd p;
};

// n <= 5, N <= 4, a prescribed number of samples forced onto the kink.
inline KinkHingeCase make_kink_hinge_case(std::mt19937_64& gen) {
  const std::size_t dim = 1 + irns::uniform_index(gen, 5);
  const std::size_t n_samples = 1 + irns::uniform_index(gen, 4);
  const std::size_t forced = irns::uniform_index(gen, n_samples + 1);

  KinkHingeCase c;
  c.data.dimension = dim;
  c.data.lambda = irns::uniform01(gen) < 0.5 ? 0.0 : 0.5;
  c.x.resize(static_cast<Eigen::Index>(dim));
  c.p.resize(static_cast<Eigen::Index>(dim));
  for (Eigen::Index j = 0; j < c.x.size(); ++j) c.x[j] = dyadic(gen);
  for (Eigen::Index j = 0; j < c.p.size(); ++j) c.p[j] = dyadic(gen);
  // One coordinate gets a power-of-two value so a forced-kink feature can
  // use its exact reciprocal.
  const auto pivot = static_cast<Eigen::Index>(irns::uniform_index(gen, dim));
  const double pow2[] = {0.25, 0.5, 1.0, 2.0};
  c.x[pivot] = pow2[irns::uniform_index(gen, 4)];

  for (std::size_t i = 0; i < n_samples; ++i) {
    const std::int8_t z = irns::uniform01(gen) < 0.5 ? std::int8_t{-1} : std::int8_t{1};
    irns::SparseVec row;
    if (i < forced) {
      // margin = 1 - z * (z / x_pivot) * x_pivot = 0 exactly
      row.push_back({static_cast<std::int32_t>(pivot),
                     static_cast<double>(z) / c.x[pivot]});
    } else {
      for (std::size_t j = 0; j < dim; ++j) {
        if (irns::uniform01(gen) < 0.7)
          row.push_back({static_cast<std::int32_t>(j), dyadic(gen)});
      }
    }
    c.data.features.push_back(std::move(row));
    c.data.labels.push_back(z);
  }
  return c;
}

struct TiedSlcpCase {
  irns::SlcpInstance inst;
  std::size_t n_samples;
  Eigen::VectorXd x;
  Eigen::VectorXd p;
};

// sigma = 0 instance (every realization equals (Mbar, qbar) exactly) with
// residual ties b_l = x_l forced on a chosen component subset.
inline TiedSlcpCase make_tied_slcp_case(std::mt19937_64& gen) {
  const std::size_t dim = 1 + irns::uniform_index(gen, 4);
  TiedSlcpCase c;
  c.n_samples = 1 + irns::uniform_index(gen, 4);
  c.inst.n = dim;
  c.inst.sigma = 0.0;
  const auto ni = static_cast<Eigen::Index>(dim);
  c.inst.m_bar.resize(ni, ni);
  for (Eigen::Index i = 0; i < ni; ++i)
    for (Eigen::Index j = 0; j < ni; ++j) c.inst.m_bar(i, j) = dyadic(gen);
  c.x.resize(ni);
  c.p.resize(ni);
  for (Eigen::Index l = 0; l < ni; ++l) {
    c.x[l] = dyadic(gen);
    c.p[l] = dyadic(gen);
  }
  const Eigen::VectorXd mx = c.inst.m_bar * c.x;
  c.inst.q_bar.resize(ni);
  // Keep total enumerated ties (n_samples * |tied|) small.
  const std::size_t max_tied = std::max<std::size_t>(1, 6 / c.n_samples);
  std::size_t tied = 0;
  for (Eigen::Index l = 0; l < ni; ++l) {
    if (tied < max_tied && irns::uniform01(gen) < 0.5) {
      c.inst.q_bar[l] = c.x[l] - mx[l];  // exact on the dyadic grid
      ++tied;
    } else {
      c.inst.q_bar[l] = dyadic(gen);
    }
  }
  c.inst.x_star = Eigen::VectorXd::Zero(ni);
  c.inst.s_bar = Eigen::VectorXd::Zero(ni);
  return c;
}

}  // namespace irns_test
