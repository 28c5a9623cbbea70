#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "hmmclass/emission.hpp"
#include "hmmclass/errors.hpp"
#include "hmmclass/model.hpp"
#include "hmmclass/rng.hpp"

namespace hmmclass {

// A window of observations (x_{-l}, ..., x_0) in temporal order; the last
// point is the one whose class is inferred.
using Window = std::span<const Point>;

struct LabeledSequence {
  std::vector<Point> observations;
  std::vector<int> labels;

  std::size_t length() const { return observations.size(); }

  void validate_against(const HiddenMarkovModel& model) const {
    if (observations.size() != labels.size())
      throw ConfigError("observation and label counts differ");
    const int m = static_cast<int>(model.num_classes());
    for (int y : labels)
      if (y < 0 || y >= m) throw LabelOutOfRange("label " + std::to_string(y) +
                                                 " outside 0.." + std::to_string(m - 1));
    for (const auto& x : observations) model.emission().log_density(0, x);
  }
};

// Draws labels from `initial` and the chain, observations conditionally
// independently given the labels. Deterministic for a fixed seed.
inline LabeledSequence simulate(const HiddenMarkovModel& model, std::size_t length,
                                std::uint64_t seed) {
  if (length < 1) throw ConfigError("simulate: length must be >= 1");
  Rng rng(seed);
  LabeledSequence seq;
  seq.observations.reserve(length);
  seq.labels.reserve(length);
  int y = rng.categorical(model.initial());
  for (std::size_t t = 0; t < length; ++t) {
    if (t > 0) y = rng.categorical(model.transition().row(y));
    seq.labels.push_back(y);
    seq.observations.push_back(model.emission().sample(rng, y));
  }
  return seq;
}

}  // namespace hmmclass
