#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "hmmclass/errors.hpp"
#include "hmmclass/linalg.hpp"
#include "hmmclass/rng.hpp"

namespace hmmclass {

// An observed point. Discrete emissions use 1-D points holding the symbol
// index; Gaussian emissions use d-dimensional points.
using Point = Vec;

// Per-class probability table over a finite alphabet; reference measure is
// the counting measure.
class DiscreteEmission {
 public:
  explicit DiscreteEmission(Mat table) : table_(std::move(table)) {
    if (table_.rows() < 1 || table_.cols() < 1)
      throw ConfigError("emission table must be non-empty");
    strictly_positive_ = true;
    for (std::size_t y = 0; y < table_.rows(); ++y) {
      double sum = 0.0;
      for (std::size_t x = 0; x < table_.cols(); ++x) {
        const double v = table_(y, x);
        if (v < 0.0 || !std::isfinite(v))
          throw ConfigError("emission table entry f[" + std::to_string(y) + "][" +
                            std::to_string(x) + "] is negative or non-finite");
        if (v == 0.0) strictly_positive_ = false;
        sum += v;
      }
      if (std::abs(sum - 1.0) > kRowSumTolerance)
        throw ConfigError("emission table row " + std::to_string(y) +
                          " does not sum to 1");
    }
  }

  std::size_t num_classes() const { return table_.rows(); }
  std::size_t alphabet_size() const { return table_.cols(); }
  bool strictly_positive() const { return strictly_positive_; }
  const Mat& table() const { return table_; }

  double prob(std::size_t y, std::size_t symbol) const { return table_(y, symbol); }

  int symbol_of(const Point& x) const {
    if (x.size() != 1)
      throw DimensionMismatch("discrete observation must be one-dimensional");
    const double s = x[0];
    const long long k = std::llround(s);
    if (s != static_cast<double>(k) || k < 0 ||
        k >= static_cast<long long>(alphabet_size()))
      throw ConfigError("observation " + std::to_string(s) +
                        " is not a symbol in the alphabet");
    return static_cast<int>(k);
  }

  double log_density(std::size_t y, const Point& x) const {
    return std::log(prob(y, symbol_of(x)));
  }

  Point sample(Rng& rng, std::size_t y) const {
    return {static_cast<double>(rng.categorical(table_.row(y)))};
  }

 private:
  Mat table_;
  bool strictly_positive_ = false;
};

// Per-class multivariate normal densities with one shared covariance matrix;
// reference measure is Lebesgue measure on R^d.
class GaussianEmission {
 public:
  GaussianEmission(std::vector<Vec> means, Mat covariance)
      : means_(std::move(means)), covariance_(std::move(covariance)) {
    if (means_.empty()) throw ConfigError("gaussian emission needs at least one mean");
    const std::size_t d = means_.front().size();
    if (d == 0) throw ConfigError("gaussian emission dimension must be positive");
    for (const auto& mu : means_)
      if (mu.size() != d) throw DimensionMismatch("gaussian means have mixed dimensions");
    if (covariance_.rows() != d || covariance_.cols() != d)
      throw DimensionMismatch("covariance shape does not match mean dimension");
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < i; ++j)
        if (std::abs(covariance_(i, j) - covariance_(j, i)) > 1e-12)
          throw ConfigError("covariance matrix is not symmetric");
    chol_ = cholesky(covariance_);  // throws if not SPD
    log_det_ = 0.0;
    for (std::size_t i = 0; i < d; ++i) log_det_ += 2.0 * std::log(chol_(i, i));
  }

  std::size_t num_classes() const { return means_.size(); }
  std::size_t dim() const { return means_.front().size(); }
  bool strictly_positive() const { return true; }
  const std::vector<Vec>& means() const { return means_; }
  const Mat& covariance() const { return covariance_; }
  const Mat& cholesky_factor() const { return chol_; }

  double log_density(std::size_t y, const Point& x) const {
    const std::size_t d = dim();
    if (x.size() != d)
      throw DimensionMismatch("observation has dimension " + std::to_string(x.size()) +
                              ", expected " + std::to_string(d));
    Vec diff(d);
    for (std::size_t i = 0; i < d; ++i) diff[i] = x[i] - means_[y][i];
    const Vec u = forward_substitute(chol_, diff);
    double quad = 0.0;
    for (double v : u) quad += v * v;
    return -0.5 * (static_cast<double>(d) * std::log(2.0 * std::numbers::pi) +
                   log_det_ + quad);
  }

  Point sample(Rng& rng, std::size_t y) const {
    return rng.multivariate_normal(means_[y], chol_);
  }

 private:
  std::vector<Vec> means_;
  Mat covariance_;
  Mat chol_;
  double log_det_ = 0.0;
};

// Tagged union over the two emission families.
class EmissionModel {
 public:
  EmissionModel(DiscreteEmission e) : impl_(std::move(e)) {}
  EmissionModel(GaussianEmission e) : impl_(std::move(e)) {}

  bool is_discrete() const { return std::holds_alternative<DiscreteEmission>(impl_); }
  const DiscreteEmission& discrete() const {
    if (!is_discrete()) throw UnsupportedEmission("operation requires a discrete emission");
    return std::get<DiscreteEmission>(impl_);
  }
  const GaussianEmission& gaussian() const { return std::get<GaussianEmission>(impl_); }

  std::size_t num_classes() const {
    return std::visit([](const auto& e) { return e.num_classes(); }, impl_);
  }
  // dimension of the observation space (1 for discrete symbols)
  std::size_t dim() const {
    return is_discrete() ? 1 : gaussian().dim();
  }
  bool strictly_positive() const {
    return std::visit([](const auto& e) { return e.strictly_positive(); }, impl_);
  }
  double log_density(std::size_t y, const Point& x) const {
    return std::visit([&](const auto& e) { return e.log_density(y, x); }, impl_);
  }
  Point sample(Rng& rng, std::size_t y) const {
    return std::visit([&](const auto& e) { return e.sample(rng, y); }, impl_);
  }

 private:
  std::variant<DiscreteEmission, GaussianEmission> impl_;
};

}  // namespace hmmclass
