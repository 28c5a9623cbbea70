#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <vector>

#include "hmmclass/errors.hpp"
#include "hmmclass/linalg.hpp"
#include "hmmclass/model.hpp"
#include "hmmclass/sequence.hpp"

namespace hmmclass {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct PosteriorVector {
  Vec probs;           // P(Y_0 = y | window), sums to 1
  double log_evidence; // log of the window's marginal density
};

namespace detail {

// One forward step in log space: out[y] = lse_{y'}(in[y'] + log p_{y'y}).
inline void log_forward_step(const TransitionMatrix& p, const Vec& in, Vec& out,
                             Vec& scratch) {
  const std::size_t m = p.num_states();
  for (std::size_t y = 0; y < m; ++y) {
    for (std::size_t q = 0; q < m; ++q) scratch[q] = in[q] + std::log(p(q, y));
    out[y] = logsumexp(scratch);
  }
}

// Log forward weights a_0(y) over the whole window:
//   a_{-l}(y) = start_y f_y(x_{-l}),  a_t(y) = f_y(x_t) sum_{y'} a_{t-1}(y') p_{y'y}.
inline Vec log_forward_window(const HiddenMarkovModel& model, Window window,
                              std::span<const double> start_dist) {
  const std::size_t m = model.num_classes();
  Vec la(m), next(m), scratch(m);
  for (std::size_t y = 0; y < m; ++y)
    la[y] = std::log(start_dist[y]) + model.emission().log_density(y, window[0]);
  for (std::size_t t = 1; t < window.size(); ++t) {
    log_forward_step(model.transition(), la, next, scratch);
    for (std::size_t y = 0; y < m; ++y)
      next[y] += model.emission().log_density(y, window[t]);
    la.swap(next);
  }
  return la;
}

}  // namespace detail

// Exact windowed posterior P(Y_0 = . | X_{-l}^0 = window). `start_dist` is
// the distribution of the state at the window's first time point and
// defaults to the stationary distribution.
inline PosteriorVector posterior_window(const HiddenMarkovModel& model, Window window,
                                        std::optional<Vec> start_dist = {}) {
  if (window.empty()) throw WindowLengthMismatch("window must contain at least one point");
  const Vec start = start_dist ? std::move(*start_dist) : model.stationary();
  if (start.size() != model.num_classes())
    throw DimensionMismatch("start distribution size does not match class count");

  const Vec la = detail::log_forward_window(model, window, start);
  const double log_evidence = logsumexp(la);
  if (log_evidence == kNegInf)
    throw EvidenceUnderflow("window has probability zero under the model");

  Vec probs(la.size());
  for (std::size_t y = 0; y < la.size(); ++y) probs[y] = std::exp(la[y] - log_evidence);
  double sum = 0.0;
  for (double v : probs) sum += v;
  for (auto& v : probs) v /= sum;
  return {std::move(probs), log_evidence};
}

inline int argmax_lowest(std::span<const double> v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] > v[best]) best = i;
  return static_cast<int>(best);
}

// Maximum-a-posteriori class for the window end; ties go to the lowest index.
inline int bayes_classify(const HiddenMarkovModel& model, Window window,
                          std::optional<Vec> start_dist = {}) {
  return argmax_lowest(posterior_window(model, window, std::move(start_dist)).probs);
}

// P(Y_target in target_set | X_t = x_t for t in observed, Y_anchor = anchor_state),
// computed by clamping the anchor state and running forward-backward.
// Observations at offsets <= anchor_time cancel in the conditional (the HMM is
// conditionally independent of the past given the clamped state) and are ignored.
inline double conditional_state_posterior(const HiddenMarkovModel& model,
                                          const std::map<int, Point>& observed,
                                          int anchor_time, int anchor_state,
                                          int target_time,
                                          const std::vector<int>& target_set) {
  const std::size_t m = model.num_classes();
  if (anchor_state < 0 || anchor_state >= static_cast<int>(m))
    throw ConfigError("anchor state outside class set");
  if (target_time < anchor_time)
    throw ConfigError("target time must not precede the anchor time");
  for (int y : target_set)
    if (y < 0 || y >= static_cast<int>(m))
      throw ConfigError("target set contains a label outside the class set");

  int t_end = target_time;
  for (const auto& [t, x] : observed)
    if (t > anchor_time) t_end = std::max(t_end, t);

  const auto obs_log = [&](int t, std::size_t y) -> double {
    const auto it = observed.find(t);
    return it == observed.end() ? 0.0 : model.emission().log_density(y, it->second);
  };

  // forward from the clamped anchor to the target time
  Vec la(m, kNegInf), next(m), scratch(m);
  la[static_cast<std::size_t>(anchor_state)] = 0.0;
  for (int t = anchor_time + 1; t <= target_time; ++t) {
    detail::log_forward_step(model.transition(), la, next, scratch);
    for (std::size_t y = 0; y < m; ++y) next[y] += obs_log(t, y);
    la.swap(next);
  }

  // backward from the last relevant time to the target time
  Vec lb(m, 0.0);
  for (int t = t_end - 1; t >= target_time; --t) {
    const auto& p = model.transition();
    for (std::size_t y = 0; y < m; ++y) {
      for (std::size_t q = 0; q < m; ++q)
        scratch[q] = std::log(p(y, q)) + obs_log(t + 1, q) + lb[q];
      next[y] = logsumexp(scratch);
    }
    lb.swap(next);
  }

  for (std::size_t y = 0; y < m; ++y) scratch[y] = la[y] + lb[y];
  const double log_den = logsumexp(scratch);
  if (log_den == kNegInf)
    throw InconsistentConditioning("conditioning event has probability zero");
  std::vector<char> in_set(m, 0);
  for (int y : target_set) in_set[static_cast<std::size_t>(y)] = 1;
  Vec members;
  for (std::size_t y = 0; y < m; ++y)
    if (in_set[y]) members.push_back(scratch[y]);
  const double log_num = logsumexp(members);
  return log_num == kNegInf ? 0.0 : std::exp(log_num - log_den);
}

struct AnchoredRange {
  double max_prob;  // over anchor states
  double min_prob;
};

// Range of P(Y_target in A | observations, Y_anchor = i) as the anchor state
// i sweeps the class set.
inline AnchoredRange anchored_posterior_range(const HiddenMarkovModel& model,
                                              const std::map<int, Point>& observed,
                                              int anchor_time, int target_time,
                                              const std::vector<int>& target_set) {
  AnchoredRange r{0.0, 1.0};
  r.max_prob = -1.0;
  r.min_prob = 2.0;
  for (std::size_t i = 0; i < model.num_classes(); ++i) {
    const double v = conditional_state_posterior(model, observed, anchor_time,
                                                 static_cast<int>(i), target_time,
                                                 target_set);
    r.max_prob = std::max(r.max_prob, v);
    r.min_prob = std::min(r.min_prob, v);
  }
  return r;
}

}  // namespace hmmclass
