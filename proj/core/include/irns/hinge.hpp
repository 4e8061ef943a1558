#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "irns/sampling.hpp"

namespace irns {

struct SparseEntry {
  std::int32_t index;  // 0-based
  double value;
};
using SparseVec = std::vector<SparseEntry>;

double sparse_dot(const SparseVec& w, const Eigen::VectorXd& x);

// L2-regularized binary hinge-loss data: per-sample term
//   f_i(x) = lambda/2 ||x||^2 + max(0, 1 - z_i x^T w_i).
// The regularizer rides on every sample so that f_N carries it in full for
// any N.
struct HingeDataset {
  std::vector<SparseVec> features;
  std::vector<std::int8_t> labels;  // strictly +1 / -1
  std::size_t dimension = 0;
  double lambda = 1e-5;

  std::size_t n_max() const { return labels.size(); }
};

enum class LabelMode {
  kPlusMinusOne,  // accept only +1 / -1
  kZeroOne,       // map 0 -> -1, 1 -> +1
};

// Parses the sparse "label index:value ..." text format (1-based indices,
// whitespace separated). dimension_override = 0 takes the max index seen.
// Malformed lines and out-of-mapping labels raise ParseError with the line
// number.
HingeDataset parse_sparse_dataset(const std::filesystem::path& path,
                                  LabelMode labels = LabelMode::kPlusMinusOne,
                                  std::size_t dimension_override = 0,
                                  double lambda = 1e-5);

// Inverse of the parser, for round-trips and synthetic data files.
void write_sparse_dataset(const HingeDataset& data, const std::filesystem::path& path);

// Per-sample evaluators (i is 0-based).
double hinge_value(const HingeDataset& data, std::size_t i, const Eigen::VectorXd& x,
                   FevCounter& fev);

// Exact sup of g^T p over the subdifferential of f_i at x: the smooth
// regularizer term plus the hinge bracket, with the kink handled by the
// endpoint maximum max(0, -z_i w_i^T p).
double hinge_directional_sup_terms(const HingeDataset& data, std::size_t i,
                                   const Eigen::VectorXd& x, const Eigen::VectorXd& p,
                                   FevCounter& fev);

// Finite-sum problem over a dataset. The sample stream is a seeded
// permutation of the dataset rows, pre-loaded in full, so the prefix of
// size N_max is exactly the full dataset and f_{N_max} = f.
class HingeProblem : public Problem {
 public:
  explicit HingeProblem(HingeDataset data);

  const HingeDataset& dataset() const { return data_; }

  std::size_t dimension() const override { return data_.dimension; }
  std::optional<std::size_t> max_samples() const override { return data_.n_max(); }
  std::unique_ptr<SampleSet> make_samples(std::uint64_t seed) const override;
  void ensure_samples(SampleSet& s, std::size_t n) const override;
  std::unique_ptr<EvalBatch> open_batch(SampleSet& s, Eigen::VectorXd x,
                                        FevCounter& fev) const override;

  // Full-sample objective; the usual trace metric for finite sums.
  double full_objective(const Eigen::VectorXd& x) const;

 private:
  HingeDataset data_;
};

}  // namespace irns
