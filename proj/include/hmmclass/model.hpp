#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "hmmclass/emission.hpp"
#include "hmmclass/errors.hpp"
#include "hmmclass/transition.hpp"

namespace hmmclass {

// Hidden Markov model: unobserved chain over classes {0..m-1} plus per-class
// emission densities. `initial` is the distribution of the earliest state;
// it defaults to the stationary distribution. Immutable after construction.
class HiddenMarkovModel {
 public:
  HiddenMarkovModel(TransitionMatrix transition, EmissionModel emission)
      : transition_(std::move(transition)), emission_(std::move(emission)) {
    check_dims();
    initial_ = stationary_distribution(transition_);
  }

  HiddenMarkovModel(TransitionMatrix transition, EmissionModel emission, Vec initial)
      : transition_(std::move(transition)),
        emission_(std::move(emission)),
        initial_(std::move(initial)) {
    check_dims();
    if (initial_.size() != num_classes())
      throw DimensionMismatch("initial distribution size does not match state count");
    double sum = 0.0;
    for (double v : initial_) {
      if (v < 0.0 || !std::isfinite(v))
        throw ConfigError("initial distribution has a negative or non-finite entry");
      sum += v;
    }
    if (std::abs(sum - 1.0) > kRowSumTolerance)
      throw ConfigError("initial distribution does not sum to 1");
  }

  std::size_t num_classes() const { return transition_.num_states(); }
  const TransitionMatrix& transition() const { return transition_; }
  const EmissionModel& emission() const { return emission_; }
  const Vec& initial() const { return initial_; }

  Vec stationary() const { return stationary_distribution(transition_); }

 private:
  void check_dims() const {
    if (emission_.num_classes() != transition_.num_states())
      throw DimensionMismatch("emission class count does not match state count");
  }

  TransitionMatrix transition_;
  EmissionModel emission_;
  Vec initial_;
};

struct PositivityReport {
  bool holds = false;
  std::vector<std::string> violations;
};

// Checks that every transition probability and every emission density is
// strictly positive. A failing report does not block inference or
// simulation, only the computation of the bound constants.
inline PositivityReport check_positivity(const HiddenMarkovModel& model) {
  PositivityReport report;
  const auto& p = model.transition();
  for (std::size_t i = 0; i < p.num_states(); ++i)
    for (std::size_t j = 0; j < p.num_states(); ++j)
      if (p(i, j) == 0.0)
        report.violations.push_back("transition p[" + std::to_string(i) + "][" +
                                    std::to_string(j) + "] = 0");
  if (model.emission().is_discrete()) {
    const auto& e = model.emission().discrete();
    for (std::size_t y = 0; y < e.num_classes(); ++y)
      for (std::size_t x = 0; x < e.alphabet_size(); ++x)
        if (e.prob(y, x) == 0.0)
          report.violations.push_back("emission f[" + std::to_string(y) + "][" +
                                      std::to_string(x) + "] = 0");
  }
  report.holds = report.violations.empty();
  return report;
}

inline void require_positivity(const HiddenMarkovModel& model) {
  const auto report = check_positivity(model);
  if (!report.holds)
    throw PositivityViolated("model has zero probabilities (" +
                             report.violations.front() +
                             (report.violations.size() > 1 ? ", ..." : "") + ")");
}

}  // namespace hmmclass
