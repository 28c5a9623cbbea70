#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>

#include "hmmclass/errors.hpp"
#include "hmmclass/linalg.hpp"

namespace hmmclass {

// Row-stochastic transition matrix over the class set {0, ..., m-1}.
// Rows failing the sum tolerance are rejected at construction, never
// renormalized.
class TransitionMatrix {
 public:
  explicit TransitionMatrix(Mat p) : p_(std::move(p)) {
    if (p_.rows() < 2 || p_.rows() != p_.cols())
      throw ConfigError("transition matrix must be square with at least 2 states");
    strictly_positive_ = true;
    for (std::size_t i = 0; i < p_.rows(); ++i) {
      double sum = 0.0;
      for (std::size_t j = 0; j < p_.cols(); ++j) {
        const double v = p_(i, j);
        if (v < 0.0 || !std::isfinite(v))
          throw ConfigError("transition entry p[" + std::to_string(i) + "][" +
                            std::to_string(j) + "] is negative or non-finite");
        if (v == 0.0) strictly_positive_ = false;
        sum += v;
      }
      if (std::abs(sum - 1.0) > kRowSumTolerance)
        throw ConfigError("transition row " + std::to_string(i) +
                          " does not sum to 1 (got " + std::to_string(sum) + ")");
    }
  }

  std::size_t num_states() const { return p_.rows(); }
  double operator()(std::size_t i, std::size_t j) const { return p_(i, j); }
  std::span<const double> row(std::size_t i) const { return p_.row(i); }
  const Mat& matrix() const { return p_; }
  bool strictly_positive() const { return strictly_positive_; }

 private:
  Mat p_;
  bool strictly_positive_ = false;
};

// Unique solution of pi P = pi, sum(pi) = 1. Uniqueness is decided by a
// rank test on I - P^T: the invariant-measure space must be one-dimensional.
inline Vec stationary_distribution(const TransitionMatrix& transition) {
  const std::size_t m = transition.num_states();
  Mat a(m, m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      a(i, j) = (i == j ? 1.0 : 0.0) - transition(j, i);  // I - P^T
  if (rank(a) != m - 1)
    throw NonUniqueStationary("stationary distribution is not unique");

  // Replace the last balance equation with the normalization constraint.
  Vec b(m, 0.0);
  for (std::size_t j = 0; j < m; ++j) a(m - 1, j) = 1.0;
  b[m - 1] = 1.0;
  Vec pi = solve(std::move(a), std::move(b));
  // Scrub tiny negative round-off and renormalize exactly once.
  double sum = 0.0;
  for (auto& v : pi) {
    if (v < 0.0) v = 0.0;
    sum += v;
  }
  for (auto& v : pi) v /= sum;
  return pi;
}

// k-step transition: row-vector `dist` pushed k steps forward.
inline Vec propagate(const TransitionMatrix& transition, Vec dist, unsigned steps) {
  for (unsigned s = 0; s < steps; ++s) dist = vec_mat(dist, transition.matrix());
  return dist;
}

}  // namespace hmmclass
