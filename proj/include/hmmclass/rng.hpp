#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>

#include "hmmclass/errors.hpp"
#include "hmmclass/linalg.hpp"

namespace hmmclass {

// splitmix64; used to derive independent stream seeds from a master seed.
inline std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  return mix_seed(master ^ mix_seed(stream + 1));
}

// Seeded random stream. mt19937_64 output is fully specified by the
// standard, and all samplers below are hand-rolled, so any fixed seed
// produces identical draws on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // uniform in [0, 1) with 53 random bits
  double uniform() { return (engine_() >> 11) * 0x1.0p-53; }

  // index distributed according to `probs` (assumed to sum to ~1)
  int categorical(std::span<const double> probs) {
    const double u = uniform();
    double acc = 0.0;
    for (std::size_t k = 0; k + 1 < probs.size(); ++k) {
      acc += probs[k];
      if (u < acc) return static_cast<int>(k);
    }
    return static_cast<int>(probs.size()) - 1;
  }

  // standard normal via Box-Muller (no cached spare, two uniforms per draw)
  double standard_normal() {
    double u1 = uniform();
    while (u1 == 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  // mean + L z with z ~ N(0, I); `chol` is the lower Cholesky factor of the
  // covariance
  Vec multivariate_normal(std::span<const double> mean, const Mat& chol) {
    const std::size_t d = mean.size();
    Vec z(d);
    for (auto& v : z) v = standard_normal();
    Vec x(d);
    for (std::size_t i = 0; i < d; ++i) {
      double s = mean[i];
      for (std::size_t j = 0; j <= i; ++j) s += chol(i, j) * z[j];
      x[i] = s;
    }
    return x;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace hmmclass
