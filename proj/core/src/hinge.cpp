#include "irns/hinge.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "irns/errors.hpp"
#include "irns/rng.hpp"

namespace irns {

double sparse_dot(const SparseVec& w, const Eigen::VectorXd& x) {
  double acc = 0.0;
  for (const SparseEntry& e : w) acc += e.value * x[e.index];
  return acc;
}

namespace {

[[noreturn]] void parse_fail(std::size_t line_no, const std::string& what) {
  throw ParseError("parse_sparse_dataset: line " + std::to_string(line_no) + ": " +
                   what);
}

bool parse_double(std::string_view tok, double& out) {
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  if (first != last && *first == '+') ++first;  // from_chars rejects leading '+'
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc{} && ptr == last;
}

}  // namespace

HingeDataset parse_sparse_dataset(const std::filesystem::path& path, LabelMode labels,
                                  std::size_t dimension_override, double lambda) {
  std::ifstream in(path);
  if (!in) throw ParseError("parse_sparse_dataset: cannot open " + path.string());

  HingeDataset data;
  data.lambda = lambda;
  std::size_t max_index = 0;  // 1-based
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::size_t pos = 0;
    auto skip_ws = [&] {
      while (pos < line.size() && std::isspace(static_cast<unsigned char>(line[pos])))
        ++pos;
    };
    auto next_token = [&]() -> std::string_view {
      skip_ws();
      const std::size_t start = pos;
      while (pos < line.size() && !std::isspace(static_cast<unsigned char>(line[pos])))
        ++pos;
      return std::string_view(line).substr(start, pos - start);
    };

    const std::string_view label_tok = next_token();
    if (label_tok.empty()) continue;  // blank line

    double raw_label;
    if (!parse_double(label_tok, raw_label))
      parse_fail(line_no, "bad label '" + std::string(label_tok) + "'");
    std::int8_t z;
    if (labels == LabelMode::kPlusMinusOne) {
      if (raw_label == 1.0)
        z = 1;
      else if (raw_label == -1.0)
        z = -1;
      else
        parse_fail(line_no, "label '" + std::string(label_tok) +
                                "' is not +1/-1 and no mapping is configured");
    } else {
      if (raw_label == 1.0)
        z = 1;
      else if (raw_label == 0.0)
        z = -1;
      else
        parse_fail(line_no, "label '" + std::string(label_tok) + "' is not 0/1");
    }

    SparseVec w;
    for (;;) {
      const std::string_view tok = next_token();
      if (tok.empty()) break;
      const std::size_t colon = tok.find(':');
      if (colon == std::string_view::npos || colon == 0 || colon + 1 == tok.size())
        parse_fail(line_no, "bad feature token '" + std::string(tok) + "'");
      std::uint64_t index_1b = 0;
      {
        const std::string_view idx = tok.substr(0, colon);
        auto [ptr, ec] = std::from_chars(idx.data(), idx.data() + idx.size(), index_1b);
        if (ec != std::errc{} || ptr != idx.data() + idx.size() || index_1b == 0)
          parse_fail(line_no, "bad feature index in '" + std::string(tok) + "'");
      }
      double value;
      if (!parse_double(tok.substr(colon + 1), value))
        parse_fail(line_no, "bad feature value in '" + std::string(tok) + "'");
      max_index = std::max(max_index, static_cast<std::size_t>(index_1b));
      w.push_back({static_cast<std::int32_t>(index_1b - 1), value});
    }
    data.features.push_back(std::move(w));
    data.labels.push_back(z);
  }

  if (dimension_override > 0) {
    if (dimension_override < max_index)
      throw ParseError("parse_sparse_dataset: dimension override " +
                       std::to_string(dimension_override) +
                       " smaller than max feature index " + std::to_string(max_index));
    data.dimension = dimension_override;
  } else {
    data.dimension = max_index;
  }
  if (data.labels.empty())
    throw ParseError("parse_sparse_dataset: no samples in " + path.string());
  return data;
}

void write_sparse_dataset(const HingeDataset& data, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out)
    throw std::runtime_error("write_sparse_dataset: cannot open " + path.string());
  char buf[64];
  for (std::size_t i = 0; i < data.n_max(); ++i) {
    out << (data.labels[i] > 0 ? "+1" : "-1");
    for (const SparseEntry& e : data.features[i]) {
      std::snprintf(buf, sizeof buf, " %" PRId32 ":%.17g", e.index + 1, e.value);
      out << buf;
    }
    out << '\n';
  }
}

double hinge_value(const HingeDataset& data, std::size_t i, const Eigen::VectorXd& x,
                   FevCounter& fev) {
  const double margin = 1.0 - data.labels[i] * sparse_dot(data.features[i], x);
  const double norm_sq = x.squaredNorm();
  fev.charge(2);  // one margin product, one norm
  return 0.5 * data.lambda * norm_sq + std::max(0.0, margin);
}

double hinge_directional_sup_terms(const HingeDataset& data, std::size_t i,
                                   const Eigen::VectorXd& x, const Eigen::VectorXd& p,
                                   FevCounter& fev) {
  const double z = static_cast<double>(data.labels[i]);
  const double margin = 1.0 - z * sparse_dot(data.features[i], x);
  const double xtp = x.dot(p);
  fev.charge(2);
  double bracket = 0.0;
  if (margin > 0.0) {
    bracket = -z * sparse_dot(data.features[i], p);
    fev.charge(1);
  } else if (margin == 0.0) {
    bracket = std::max(0.0, -z * sparse_dot(data.features[i], p));
    fev.charge(1);
  }
  return data.lambda * xtp + bracket;
}

// --- problem implementation ---

namespace {

class HingeSampleSet final : public SampleSet {
 public:
  HingeSampleSet(std::uint64_t seed, std::size_t n_max) : SampleSet(seed) {
    order_.resize(n_max);
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    std::mt19937_64 gen(mix_seed(seed, 0));
    shuffle_reproducible(order_, gen);
    size_ = n_max;  // bounded streams pre-load in full
  }

  const std::vector<std::size_t>& order() const { return order_; }

 private:
  std::vector<std::size_t> order_;
};

class HingeBatch final : public EvalBatch {
 public:
  HingeBatch(const HingeProblem& pr, HingeSampleSet& s, Eigen::VectorXd x,
             FevCounter& fev)
      : pr_(pr), s_(s), x_(std::move(x)), fev_(fev) {
    hinge_prefix_.push_back(0.0);
  }

  double value(std::size_t n) override {
    materialize(n);
    if (!have_norm_) {
      x_norm_sq_ = x_.squaredNorm();
      fev_.charge(1);
      have_norm_ = true;
    }
    return 0.5 * pr_.dataset().lambda * x_norm_sq_ +
           hinge_prefix_[n] / static_cast<double>(n);
  }

  Eigen::VectorXd subgradient(std::size_t n) override {
    materialize(n);
    const HingeDataset& d = pr_.dataset();
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(x_.size());
    for (std::size_t i = 0; i < n; ++i) {
      // Ties take the inactive branch: zero contribution.
      if (margin_[i] > 0.0) {
        const std::size_t row = s_.order()[i];
        const double z = static_cast<double>(d.labels[row]);
        for (const SparseEntry& e : d.features[row]) acc[e.index] -= z * e.value;
      }
    }
    return d.lambda * x_ + acc / static_cast<double>(n);
  }

  double directional_sup(std::size_t n, const Eigen::VectorXd& p) override {
    materialize(n);
    const HingeDataset& d = pr_.dataset();
    const double xtp = x_.dot(p);
    fev_.charge(1);
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (margin_[i] < 0.0) continue;  // inactive term, no product needed
      const std::size_t row = s_.order()[i];
      const double z = static_cast<double>(d.labels[row]);
      const double wtp = sparse_dot(d.features[row], p);
      fev_.charge(1);
      acc += margin_[i] > 0.0 ? -z * wtp : std::max(0.0, -z * wtp);
    }
    return d.lambda * xtp + acc / static_cast<double>(n);
  }

 private:
  void materialize(std::size_t n) {
    if (n < 1) throw std::domain_error("EvalBatch: N must be >= 1");
    pr_.ensure_samples(s_, n);
    const HingeDataset& d = pr_.dataset();
    for (std::size_t i = margin_.size(); i < n; ++i) {
      const std::size_t row = s_.order()[i];
      const double margin =
          1.0 - d.labels[row] * sparse_dot(d.features[row], x_);
      fev_.charge(1);
      margin_.push_back(margin);
      hinge_prefix_.push_back(hinge_prefix_.back() + std::max(0.0, margin));
    }
  }

  const HingeProblem& pr_;
  HingeSampleSet& s_;
  Eigen::VectorXd x_;
  FevCounter& fev_;
  bool have_norm_ = false;
  double x_norm_sq_ = 0.0;
  std::vector<double> margin_;
  std::vector<double> hinge_prefix_;  // prefix sums of max(0, margin)
};

}  // namespace

HingeProblem::HingeProblem(HingeDataset data) : data_(std::move(data)) {
  if (data_.n_max() == 0) throw ConfigError("HingeProblem: empty dataset");
  if (data_.features.size() != data_.labels.size())
    throw ConfigError("HingeProblem: feature/label count mismatch");
  for (std::size_t i = 0; i < data_.n_max(); ++i) {
    if (data_.labels[i] != 1 && data_.labels[i] != -1)
      throw ConfigError("HingeProblem: labels must be +1/-1");
    for (const SparseEntry& e : data_.features[i])
      if (e.index < 0 || static_cast<std::size_t>(e.index) >= data_.dimension)
        throw ConfigError("HingeProblem: feature index out of range");
  }
}

std::unique_ptr<SampleSet> HingeProblem::make_samples(std::uint64_t seed) const {
  return std::make_unique<HingeSampleSet>(seed, data_.n_max());
}

void HingeProblem::ensure_samples(SampleSet& s, std::size_t n) const {
  if (n > data_.n_max())
    throw SampleExhausted("hinge sample request " + std::to_string(n) +
                          " exceeds N_max = " + std::to_string(data_.n_max()));
}

std::unique_ptr<EvalBatch> HingeProblem::open_batch(SampleSet& s, Eigen::VectorXd x,
                                                    FevCounter& fev) const {
  return std::make_unique<HingeBatch>(*this, static_cast<HingeSampleSet&>(s),
                                      std::move(x), fev);
}

double HingeProblem::full_objective(const Eigen::VectorXd& x) const {
  double acc = 0.0;
  for (std::size_t i = 0; i < data_.n_max(); ++i)
    acc += std::max(0.0, 1.0 - data_.labels[i] * sparse_dot(data_.features[i], x));
  return 0.5 * data_.lambda * x.squaredNorm() + acc / static_cast<double>(data_.n_max());
}

}  // namespace irns
