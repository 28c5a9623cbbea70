#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "hmmclass/errors.hpp"
#include "hmmclass/linalg.hpp"
#include "hmmclass/model.hpp"
#include "hmmclass/parallel.hpp"
#include "hmmclass/posterior.hpp"
#include "hmmclass/rng.hpp"
#include "hmmclass/sequence.hpp"

namespace hmmclass {

enum class RiskMethod { exact_enumeration, monte_carlo };

struct RiskEstimate {
  double value = 0.0;
  double std_error = 0.0;  // 0 for exact results
  RiskMethod method = RiskMethod::exact_enumeration;
  std::uint64_t n_samples = 0;
};

inline constexpr std::uint64_t kDefaultEnumerationCap = 10'000'000;

// Minimal misclassification probability of the window-end class using l past
// observations, by exact enumeration of every discrete window:
//   R = sum_w (evidence(w) - max_y a_0(w, y)).
// `start_dist` is the distribution of the state at the window start
// (default: stationary), used both for the window law and for the posterior.
inline RiskEstimate bayes_risk_exact(const HiddenMarkovModel& model, unsigned l,
                                     std::optional<Vec> start_dist = {},
                                     std::uint64_t enumeration_cap = kDefaultEnumerationCap) {
  if (!model.emission().is_discrete())
    throw UnsupportedEmission("exact risk enumeration requires a discrete emission");
  const auto& em = model.emission().discrete();
  const std::size_t m = model.num_classes();
  const std::size_t alphabet = em.alphabet_size();
  const unsigned window_len = l + 1;

  double n_windows = 1.0;
  for (unsigned t = 0; t < window_len; ++t) {
    n_windows *= static_cast<double>(alphabet);
    if (n_windows > static_cast<double>(enumeration_cap))
      throw EnumerationTooLarge("window enumeration exceeds the cap of " +
                                std::to_string(enumeration_cap));
  }

  const Vec start = start_dist ? std::move(*start_dist) : model.stationary();
  if (start.size() != m)
    throw DimensionMismatch("start distribution size does not match class count");
  Vec log_start(m);
  for (std::size_t y = 0; y < m; ++y) log_start[y] = std::log(start[y]);
  Mat log_table(m, alphabet);
  for (std::size_t y = 0; y < m; ++y)
    for (std::size_t x = 0; x < alphabet; ++x) log_table(y, x) = std::log(em.prob(y, x));

  std::vector<std::size_t> symbols(window_len, 0);
  Vec la(m), next(m), scratch(m);
  double risk = 0.0;
  for (;;) {
    for (std::size_t y = 0; y < m; ++y)
      la[y] = log_start[y] + log_table(y, symbols[0]);
    for (unsigned t = 1; t < window_len; ++t) {
      detail::log_forward_step(model.transition(), la, next, scratch);
      for (std::size_t y = 0; y < m; ++y) next[y] += log_table(y, symbols[t]);
      la.swap(next);
    }
    double hi = la[0];
    for (std::size_t y = 1; y < m; ++y) hi = std::max(hi, la[y]);
    const double evidence = std::exp(logsumexp(la));
    const double top = std::exp(hi);
    risk += evidence - top;

    // odometer over the window's symbols
    unsigned pos = 0;
    while (pos < window_len && ++symbols[pos] == alphabet) symbols[pos++] = 0;
    if (pos == window_len) break;
  }
  return {risk, 0.0, RiskMethod::exact_enumeration, 0};
}

namespace detail {

inline constexpr std::size_t kMonteCarloBlock = 4096;

}  // namespace detail

// Monte Carlo estimate of the same risk: simulates independent windows
// (state at the window start from `start_dist`, then the chain), classifies
// each with the exact posterior rule, and reports the error frequency with
// its binomial standard error. Samples are drawn in fixed-size blocks with
// per-block derived seeds and reduced in block order, so the result is
// bit-identical for a fixed seed regardless of thread count.
inline RiskEstimate bayes_risk_monte_carlo(const HiddenMarkovModel& model, unsigned l,
                                           std::uint64_t n_samples, std::uint64_t seed,
                                           std::optional<Vec> start_dist = {}) {
  if (n_samples < 1) throw ConfigError("monte carlo risk needs at least one sample");
  const Vec start = start_dist ? std::move(*start_dist) : model.stationary();
  if (start.size() != model.num_classes())
    throw DimensionMismatch("start distribution size does not match class count");

  const std::size_t n_blocks =
      (n_samples + detail::kMonteCarloBlock - 1) / detail::kMonteCarloBlock;
  std::vector<std::uint64_t> block_errors(n_blocks, 0);

  parallel_for_jobs(n_blocks, [&](std::size_t b) {
    Rng rng(derive_seed(seed, b));
    const std::uint64_t lo = b * detail::kMonteCarloBlock;
    const std::uint64_t hi = std::min<std::uint64_t>(lo + detail::kMonteCarloBlock, n_samples);
    std::vector<Point> window(l + 1);
    std::uint64_t errors = 0;
    for (std::uint64_t s = lo; s < hi; ++s) {
      int y = rng.categorical(start);
      window[0] = model.emission().sample(rng, y);
      for (unsigned t = 1; t <= l; ++t) {
        y = rng.categorical(model.transition().row(y));
        window[t] = model.emission().sample(rng, y);
      }
      if (bayes_classify(model, window, start) != y) ++errors;
    }
    block_errors[b] = errors;
  });

  std::uint64_t errors = 0;
  for (std::uint64_t e : block_errors) errors += e;
  const double v = static_cast<double>(errors) / static_cast<double>(n_samples);
  const double se = std::sqrt(v * (1.0 - v) / static_cast<double>(n_samples));
  return {v, se, RiskMethod::monte_carlo, n_samples};
}

}  // namespace hmmclass
