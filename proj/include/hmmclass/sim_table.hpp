#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "hmmclass/kernel.hpp"
#include "hmmclass/model.hpp"
#include "hmmclass/parallel.hpp"
#include "hmmclass/result_table.hpp"
#include "hmmclass/rng.hpp"
#include "hmmclass/sequence.hpp"
#include "hmmclass/version.hpp"

namespace hmmclass {

// Bundled three-part simulation study: a 4-state chain with two Gaussian
// mean layouts (well separated vs. two nearly coincident classes) plus an
// i.i.d.-label control with the hard layout. Error rates of the kernel rule
// with memory l in {0,1} are tabulated over training sizes {100,300,500}.
struct SimTableOptions {
  double bandwidth = 1.0;
  double sigma = 1.0;  // shared covariance is sigma^2 * I_3
  std::size_t test_windows = 10'000;
  std::size_t reps = 5;  // median over this many replicate seeds
  std::vector<std::size_t> train_sizes = {100, 300, 500};
};

inline HiddenMarkovModel simulation_model(int sim, double sigma) {
  Mat transition;
  if (sim == 1 || sim == 2) {
    transition = Mat{{0.0, 0.0, 1.0, 0.0},
                     {0.0, 0.0, 0.0, 1.0},
                     {0.3, 0.7, 0.0, 0.0},
                     {0.7, 0.3, 0.0, 0.0}};
  } else if (sim == 3) {
    // i.i.d. labels: every row equals the stationary distribution
    transition = Mat{{0.25, 0.25, 0.25, 0.25},
                     {0.25, 0.25, 0.25, 0.25},
                     {0.25, 0.25, 0.25, 0.25},
                     {0.25, 0.25, 0.25, 0.25}};
  } else {
    throw ConfigError("simulation index must be 1, 2 or 3");
  }

  std::vector<Vec> means;
  if (sim == 1) {
    means = {{0.0, 0.0, 0.0}, {4.0, 0.0, 0.0}, {3.9, 3.9, 0.0}, {0.0, 3.9, 0.0}};
  } else {
    means = {{0.0, 0.0, 0.0}, {4.0, 0.0, 0.0}, {4.0, 4.0, 0.0}, {3.8, 3.8, 0.0}};
  }

  Mat cov(3, 3);
  for (std::size_t i = 0; i < 3; ++i) cov(i, i) = sigma * sigma;
  return HiddenMarkovModel(TransitionMatrix(std::move(transition)),
                           GaussianEmission(std::move(means), std::move(cov)));
}

struct SimCell {
  int sim;
  unsigned l;
  std::size_t train_size;
  double error_rate;  // median over replicate seeds
};

inline double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

inline std::vector<SimCell> run_sim_study(std::uint64_t seed,
                                          const SimTableOptions& opt = {}) {
  struct Job {
    int sim;
    unsigned l;
    std::size_t n;
  };
  std::vector<Job> jobs;
  for (int sim = 1; sim <= 3; ++sim)
    for (unsigned l = 0; l <= 1; ++l)
      for (std::size_t n : opt.train_sizes) jobs.push_back({sim, l, n});

  const HiddenMarkovModel models[3] = {simulation_model(1, opt.sigma),
                                       simulation_model(2, opt.sigma),
                                       simulation_model(3, opt.sigma)};

  std::vector<SimCell> cells(jobs.size());
  parallel_for_jobs(jobs.size(), [&](std::size_t j) {
    const Job& job = jobs[j];
    const auto& model = models[job.sim - 1];
    std::vector<double> reps;
    reps.reserve(opt.reps);
    for (std::size_t r = 0; r < opt.reps; ++r) {
      const std::uint64_t tag = (static_cast<std::uint64_t>(job.sim) << 48) ^
                                (static_cast<std::uint64_t>(job.l) << 40) ^
                                (static_cast<std::uint64_t>(job.n) << 16) ^ r;
      const std::uint64_t rep_seed = derive_seed(seed, tag);
      TrainingSequence training{simulate(model, job.n + job.l, rep_seed),
                                Provenance::simulated};
      const LabeledSequence test =
          simulate(model, opt.test_windows + job.l, derive_seed(rep_seed, 0x7e57));
      KernelClassifier rule(std::move(training), job.l, opt.bandwidth,
                            KernelSpec::gaussian());
      reps.push_back(empirical_risk(rule, test).value);
    }
    cells[j] = {job.sim, job.l, job.n, median_of(std::move(reps))};
  });
  return cells;
}

// The cells as a CSV-ready table, ordered by (sim, l, n).
inline ResultTable reproduce_sim_table(std::uint64_t seed,
                                       const SimTableOptions& opt = {}) {
  const auto cells = run_sim_study(seed, opt);
  ResultTable table({"sim", "l", "n", "error_rate"});
  table.set_meta("tool_version", kVersion);
  table.set_meta("seed", std::to_string(seed));
  std::string params = "bandwidth=" + format_double(opt.bandwidth) +
                       ";sigma=" + format_double(opt.sigma) +
                       ";test_windows=" + std::to_string(opt.test_windows) +
                       ";reps=" + std::to_string(opt.reps);
  table.set_meta("config_hash", hex64(fnv1a(params)));
  table.set_meta("kernel", "gaussian");
  table.set_meta("bandwidth", format_double(opt.bandwidth));
  table.set_meta("sigma", format_double(opt.sigma));
  table.set_meta("test_windows", std::to_string(opt.test_windows));
  table.set_meta("reps", std::to_string(opt.reps));
  for (const auto& c : cells)
    table.add_row({std::to_string(c.sim), std::to_string(c.l),
                   std::to_string(c.train_size), format_double(c.error_rate)});
  return table;
}

}  // namespace hmmclass
