#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hmmclass/errors.hpp"
#include "hmmclass/linalg.hpp"
#include "hmmclass/model.hpp"
#include "hmmclass/parallel.hpp"
#include "hmmclass/rng.hpp"

namespace hmmclass {

// Worst-case two-step transition ratio
//   alpha = max_{i,k,a,b} p_{a i} p_{i b} / (p_{a k} p_{k b}).
// Requires every transition probability to be positive.
inline double alpha_const(const TransitionMatrix& p) {
  const std::size_t m = p.num_states();
  if (!p.strictly_positive())
    throw PositivityViolated("alpha is infinite: transition matrix has zero entries");
  double best = 1.0;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t k = 0; k < m; ++k)
      for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = 0; b < m; ++b)
          best = std::max(best, (p(a, i) * p(i, b)) / (p(a, k) * p(k, b)));
  return best;
}

// Observation-weighted version: the middle state also emits x, so each ratio
// picks up f_i(x) / f_k(x).
inline double alpha_x(const TransitionMatrix& p, const EmissionModel& emission,
                      const Point& x) {
  const std::size_t m = p.num_states();
  if (!p.strictly_positive())
    throw PositivityViolated("alpha(x) is infinite: transition matrix has zero entries");
  Vec log_f(m);
  for (std::size_t y = 0; y < m; ++y) {
    log_f[y] = emission.log_density(y, x);
    if (log_f[y] == -std::numeric_limits<double>::infinity())
      throw PositivityViolated("alpha(x) is infinite: f_" + std::to_string(y) +
                               "(x) = 0");
  }
  double best = 1.0;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t k = 0; k < m; ++k) {
      const double density_ratio = std::exp(log_f[i] - log_f[k]);
      for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = 0; b < m; ++b)
          best = std::max(best, (p(a, i) * p(i, b)) / (p(a, k) * p(k, b)) * density_ratio);
    }
  return best;
}

// Posterior floor induced by an alpha value: eta = (1 + (m-1) alpha)^{-1}.
inline double eta_from_alpha(double alpha, std::size_t m) {
  if (alpha < 1.0) throw NumericError("eta: alpha must be >= 1");
  if (m < 2) throw NumericError("eta: need at least two classes");
  return 1.0 / (1.0 + static_cast<double>(m - 1) * alpha);
}

inline double eta_const(const TransitionMatrix& p) {
  return eta_from_alpha(alpha_const(p), p.num_states());
}

inline double eta_x(const TransitionMatrix& p, const EmissionModel& emission,
                    const Point& x) {
  return eta_from_alpha(alpha_x(p, emission, x), p.num_states());
}

enum class Integration { exact_sum, monte_carlo };

struct IntegrationSpec {
  Integration kind = Integration::exact_sum;
  std::uint64_t n_samples = 1'000'000;  // per class, monte_carlo only
  std::uint64_t seed = 0;
};

struct BetaGamma {
  double beta = 0.0;   // min_k E_{f_k}[eta(X)]
  double gamma = 0.0;  // 1 - 2 beta
  Integration method = Integration::exact_sum;
  double std_error = 0.0;        // 0 for exact sums
  std::uint64_t n_samples = 0;   // per class, monte_carlo only
  std::uint64_t seed = 0;
};

namespace detail {

// mean of eta(X) under f_k by seeded blocked Monte Carlo; blocks are reduced
// in index order so the estimate is thread-count independent
inline std::pair<double, double> eta_mean_monte_carlo(const HiddenMarkovModel& model,
                                                      std::size_t k,
                                                      std::uint64_t n_samples,
                                                      std::uint64_t seed) {
  constexpr std::size_t kBlock = 65536;
  const std::size_t n_blocks = (n_samples + kBlock - 1) / kBlock;
  std::vector<double> block_sum(n_blocks, 0.0), block_sq(n_blocks, 0.0);
  parallel_for_jobs(n_blocks, [&](std::size_t b) {
    Rng rng(derive_seed(seed, (k << 32) ^ b));
    const std::uint64_t lo = b * kBlock;
    const std::uint64_t hi = std::min<std::uint64_t>(lo + kBlock, n_samples);
    double s = 0.0, sq = 0.0;
    for (std::uint64_t i = lo; i < hi; ++i) {
      const Point x = model.emission().sample(rng, k);
      const double e = eta_x(model.transition(), model.emission(), x);
      s += e;
      sq += e * e;
    }
    block_sum[b] = s;
    block_sq[b] = sq;
  });
  double sum = 0.0, sumsq = 0.0;
  for (std::size_t b = 0; b < n_blocks; ++b) {
    sum += block_sum[b];
    sumsq += block_sq[b];
  }
  const double n = static_cast<double>(n_samples);
  const double mean = sum / n;
  const double var = std::max(0.0, sumsq / n - mean * mean);
  return {mean, std::sqrt(var / n)};
}

}  // namespace detail

// beta = min_k integral of eta(x) f_k(x) mu(dx), gamma = 1 - 2 beta.
// Discrete emissions admit the exact alphabet sum; Gaussian emissions use
// per-class Monte Carlo with a reported standard error.
inline BetaGamma beta_gamma(const HiddenMarkovModel& model, IntegrationSpec spec = {}) {
  require_positivity(model);
  const std::size_t m = model.num_classes();
  BetaGamma out;
  out.method = spec.kind;

  if (spec.kind == Integration::exact_sum) {
    if (!model.emission().is_discrete())
      throw IntegrationUnavailable("exact beta integration requires a discrete emission");
    const auto& em = model.emission().discrete();
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < m; ++k) {
      double acc = 0.0;
      for (std::size_t s = 0; s < em.alphabet_size(); ++s) {
        const Point x{static_cast<double>(s)};
        acc += eta_x(model.transition(), model.emission(), x) * em.prob(k, s);
      }
      best = std::min(best, acc);
    }
    out.beta = best;
  } else {
    out.n_samples = spec.n_samples;
    out.seed = spec.seed;
    double best = std::numeric_limits<double>::infinity();
    double best_se = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      const auto [mean, se] =
          detail::eta_mean_monte_carlo(model, k, spec.n_samples, spec.seed);
      if (mean < best) {
        best = mean;
        best_se = se;
      }
    }
    out.beta = best;
    out.std_error = best_se;
  }

  if (!(out.beta > 0.0 && out.beta <= 0.5 + 1e-12))
    throw NumericError("beta outside (0, 1/2]: " + std::to_string(out.beta));
  out.gamma = 1.0 - 2.0 * out.beta;
  return out;
}

struct ErgodicityConstants {
  double a = 2.0;  // total-variation diameter in the l1 convention
  double b = 1.0;  // Dobrushin contraction coefficient of P
  bool not_one_step_contractive = false;
};

// One-step contraction rate b = max_{i,j} (1/2) sum_k |p_ik - p_jk| and the
// diameter a = 2. A matrix with b = 1 may still contract after powers; that
// case is flagged rather than refined.
inline ErgodicityConstants ergodicity_constants(const TransitionMatrix& p) {
  const std::size_t m = p.num_states();
  double b = 0.0;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j)
      b = std::max(b, 0.5 * l1_distance(p.row(i), p.row(j)));
  ErgodicityConstants out;
  out.b = b;
  out.not_one_step_contractive = b >= 1.0;
  return out;
}

// Product bound prod_j (1 - 2 eta_j) over a span of per-offset eta values.
inline double gap_bound_windowed(std::span<const double> per_point_eta) {
  double prod = 1.0;
  for (double e : per_point_eta) prod *= (1.0 - 2.0 * e);
  return prod;
}

// Per-offset eta profile for offsets j = j_begin..j_end: eta(x_j) where the
// offset is observed, the observation-free eta elsewhere.
inline Vec eta_profile(const HiddenMarkovModel& model,
                       const std::map<int, Point>& observed, int j_begin, int j_end) {
  const double eta_plain = eta_const(model.transition());
  Vec out;
  out.reserve(static_cast<std::size_t>(j_end - j_begin + 1));
  for (int j = j_begin; j <= j_end; ++j) {
    const auto it = observed.find(j);
    out.push_back(it == observed.end()
                      ? eta_plain
                      : eta_x(model.transition(), model.emission(), it->second));
  }
  return out;
}

struct BoundConstants {
  double alpha = 1.0;
  double eta = 0.5;
  double beta = 0.5;
  double gamma = 0.0;
  double a = 2.0;
  double b = 1.0;
  bool not_one_step_contractive = false;
  BetaGamma beta_detail;
};

inline BoundConstants compute_bound_constants(const HiddenMarkovModel& model,
                                              std::optional<IntegrationSpec> integration = {}) {
  require_positivity(model);
  BoundConstants c;
  c.alpha = alpha_const(model.transition());
  c.eta = eta_from_alpha(c.alpha, model.num_classes());
  IntegrationSpec spec = integration.value_or(IntegrationSpec{
      model.emission().is_discrete() ? Integration::exact_sum : Integration::monte_carlo,
      1'000'000, 0});
  c.beta_detail = beta_gamma(model, spec);
  c.beta = c.beta_detail.beta;
  c.gamma = c.beta_detail.gamma;
  const auto erg = ergodicity_constants(model.transition());
  c.a = erg.a;
  c.b = erg.b;
  c.not_one_step_contractive = erg.not_one_step_contractive;
  return c;
}

struct RiskGapBounds {
  double same_model;  // gamma^(l+1)
  double general;     // 2 (gamma^(l/2) + a b^(l/2))
};

// Raw bound values; reports clip them at 1, property tests use them as is.
inline RiskGapBounds risk_gap_bounds(unsigned l, const BoundConstants& c) {
  RiskGapBounds out{};
  out.same_model = std::pow(c.gamma, static_cast<double>(l + 1));
  const double half = static_cast<double>(l) / 2.0;
  out.general = 2.0 * (std::pow(c.gamma, half) + c.a * std::pow(c.b, half));
  return out;
}

}  // namespace hmmclass
