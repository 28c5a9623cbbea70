#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "hmmclass/errors.hpp"
#include "hmmclass/parallel.hpp"
#include "hmmclass/risk.hpp"
#include "hmmclass/sequence.hpp"

namespace hmmclass {

enum class KernelKind { gaussian, box, epanechnikov };

// Kernel on the flattened window difference z; evaluated on ||z||^2.
// Box and Epanechnikov kernels are regular (bounded support, bounded below
// by `floor_value` on the ball of radius `floor_radius`); the gaussian
// kernel has unbounded support and is admitted anyway.
struct KernelSpec {
  KernelKind kind = KernelKind::gaussian;
  double support_radius = std::numeric_limits<double>::infinity();
  double floor_radius = 0.0;  // t0
  double floor_value = 0.0;   // c, with K(z) >= c for ||z|| <= t0
  bool regular = false;

  static KernelSpec gaussian() {
    return {KernelKind::gaussian, std::numeric_limits<double>::infinity(), 1.0,
            std::exp(-0.5), false};
  }
  static KernelSpec box() { return {KernelKind::box, 1.0, 1.0, 1.0, true}; }
  static KernelSpec epanechnikov() {
    return {KernelKind::epanechnikov, 1.0, std::sqrt(0.5), 0.5, true};
  }

  double operator()(double squared_norm) const {
    switch (kind) {
      case KernelKind::gaussian:
        return std::exp(-0.5 * squared_norm);
      case KernelKind::box:
        return squared_norm <= 1.0 ? 1.0 : 0.0;
      case KernelKind::epanechnikov:
        return squared_norm <= 1.0 ? 1.0 - squared_norm : 0.0;
    }
    return 0.0;
  }

  std::string name() const {
    switch (kind) {
      case KernelKind::gaussian: return "gaussian";
      case KernelKind::box: return "box";
      case KernelKind::epanechnikov: return "epanechnikov";
    }
    return "?";
  }
};

inline KernelSpec kernel_by_name(const std::string& name) {
  if (name == "gaussian" || name == "normal") return KernelSpec::gaussian();
  if (name == "box") return KernelSpec::box();
  if (name == "epanechnikov") return KernelSpec::epanechnikov();
  throw ConfigError("unknown kernel '" + name + "'");
}

enum class Provenance { simulated, ingested };

struct TrainingSequence {
  LabeledSequence data;
  Provenance provenance = Provenance::simulated;
};

// Kernel classification rule with memory l: a query window (x_{-l},...,x_0)
// collects, for each class y, the kernel weights of all training windows
// (X'_i,...,X'_{i+l}) whose end label Y'_{i+l} equals y, and the class with
// the highest score wins. If every score vanishes (possible under bounded
// support), the majority end label of the training windows is returned.
class KernelClassifier {
 public:
  KernelClassifier(TrainingSequence training, unsigned l, double h, KernelSpec kernel)
      : training_(std::move(training)), l_(l), h_(h), kernel_(kernel) {
    if (h_ <= 0.0) throw ConfigError("bandwidth must be positive");
    const auto& seq = training_.data;
    if (seq.observations.size() != seq.labels.size())
      throw ConfigError("training observations and labels differ in length");
    if (seq.length() < l_ + 1)
      throw ConfigError("training sequence shorter than the window length");
    n_ = seq.length() - l_;
    dim_ = seq.observations.front().size();
    for (const auto& x : seq.observations)
      if (x.size() != dim_) throw DimensionMismatch("training points have mixed dimensions");

    num_classes_ = 0;
    for (int y : seq.labels) {
      if (y < 0) throw LabelOutOfRange("negative training label");
      num_classes_ = std::max(num_classes_, static_cast<std::size_t>(y) + 1);
    }

    // flatten the n overlapping windows once; row i is (X'_i,...,X'_{i+l})
    const std::size_t width = (l_ + 1) * dim_;
    flat_.resize(n_ * width);
    end_labels_.resize(n_);
    for (std::size_t i = 0; i < n_; ++i) {
      for (unsigned t = 0; t <= l_; ++t)
        for (std::size_t k = 0; k < dim_; ++k)
          flat_[i * width + t * dim_ + k] = seq.observations[i + t][k];
      end_labels_[i] = seq.labels[i + l_];
    }

    std::vector<std::size_t> counts(num_classes_, 0);
    for (int y : end_labels_) ++counts[static_cast<std::size_t>(y)];
    majority_label_ = argmax_lowest(Vec(counts.begin(), counts.end()));
  }

  unsigned memory() const { return l_; }
  double bandwidth() const { return h_; }
  const KernelSpec& kernel() const { return kernel_; }
  std::size_t training_windows() const { return n_; }
  std::size_t dim() const { return dim_; }
  int majority_label() const { return majority_label_; }
  const TrainingSequence& training() const { return training_; }

  int classify(Window window) const {
    if (window.size() != l_ + 1)
      throw WindowLengthMismatch("window length " + std::to_string(window.size()) +
                                 " does not match memory " + std::to_string(l_) + "+1");
    const std::size_t width = (l_ + 1) * dim_;
    Vec query(width);
    for (unsigned t = 0; t <= l_; ++t) {
      if (window[t].size() != dim_)
        throw DimensionMismatch("query point dimension does not match training data");
      for (std::size_t k = 0; k < dim_; ++k) query[t * dim_ + k] = window[t][k];
    }

    Vec score(num_classes_, 0.0);
    bool any = false;
    for (std::size_t i = 0; i < n_; ++i) {
      double q = 0.0;
      const double* row = flat_.data() + i * width;
      for (std::size_t k = 0; k < width; ++k) {
        const double z = (query[k] - row[k]) / h_;
        q += z * z;
      }
      const double w = kernel_(q);
      if (w > 0.0) {
        score[static_cast<std::size_t>(end_labels_[i])] += w;
        any = true;
      }
    }
    if (!any) return majority_label_;
    return argmax_lowest(score);
  }

 private:
  TrainingSequence training_;
  unsigned l_;
  double h_;
  KernelSpec kernel_;
  std::size_t n_ = 0;
  std::size_t dim_ = 0;
  std::size_t num_classes_ = 0;
  Vec flat_;
  std::vector<int> end_labels_;
  int majority_label_ = 0;
};

// Misclassification frequency of the rule over every sliding window of the
// test sequence, with binomial standard error. Windows are scored in
// index-ordered blocks, so the result is thread-count independent.
inline RiskEstimate empirical_risk(const KernelClassifier& classifier,
                                   const LabeledSequence& test) {
  const unsigned l = classifier.memory();
  if (test.length() < l + 1)
    throw ConfigError("test sequence shorter than the window length");
  const std::size_t n_windows = test.length() - l;

  constexpr std::size_t kBlock = 256;
  const std::size_t n_blocks = (n_windows + kBlock - 1) / kBlock;
  std::vector<std::uint64_t> block_errors(n_blocks, 0);
  parallel_for_jobs(n_blocks, [&](std::size_t blk) {
    const std::size_t lo = blk * kBlock;
    const std::size_t hi = std::min(lo + kBlock, n_windows);
    std::uint64_t errors = 0;
    for (std::size_t w = lo; w < hi; ++w) {
      const Window window{test.observations.data() + w, l + 1};
      if (classifier.classify(window) != test.labels[w + l]) ++errors;
    }
    block_errors[blk] = errors;
  });

  std::uint64_t errors = 0;
  for (std::uint64_t e : block_errors) errors += e;
  const double v = static_cast<double>(errors) / static_cast<double>(n_windows);
  const double se = std::sqrt(v * (1.0 - v) / static_cast<double>(n_windows));
  return {v, se, RiskMethod::monte_carlo, n_windows};
}

// One empirical-risk row per bandwidth, same training and test data across rows.
inline std::vector<std::pair<double, RiskEstimate>> bandwidth_grid_eval(
    const TrainingSequence& training, unsigned l, KernelSpec kernel,
    std::span<const double> h_values, const LabeledSequence& test) {
  if (h_values.empty()) throw ConfigError("bandwidth grid is empty");
  std::vector<std::pair<double, RiskEstimate>> rows;
  rows.reserve(h_values.size());
  for (double h : h_values) {
    KernelClassifier c(training, l, h, kernel);
    rows.emplace_back(h, empirical_risk(c, test));
  }
  return rows;
}

}  // namespace hmmclass
