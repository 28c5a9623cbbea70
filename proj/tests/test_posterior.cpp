#include <doctest.h>

#include <cmath>
#include <map>

#include "hmmclass/hmmclass.hpp"
#include "oracle.hpp"

using namespace hmmclass;

TEST_CASE("posterior with identical densities reproduces the start distribution") {
  // observations carry no information, so the time-0 marginal comes back
  const HiddenMarkovModel model(
      TransitionMatrix(Mat{{0.7, 0.2, 0.1}, {0.3, 0.4, 0.3}, {0.2, 0.3, 0.5}}),
      DiscreteEmission(Mat{{0.3, 0.7}, {0.3, 0.7}, {0.3, 0.7}}));
  const Vec pi = model.stationary();
  const std::vector<Point> window{{0.0}, {1.0}, {0.0}, {0.0}};
  const auto post = posterior_window(model, window);
  for (std::size_t y = 0; y < 3; ++y)
    CHECK(post.probs[y] == doctest::Approx(pi[y]).epsilon(1e-12));
}

TEST_CASE("posterior with a single observation is the Bayes formula") {
  const auto model = oracle::two_state_reference_model();
  const std::vector<Point> window{{0.0}};
  const auto post = posterior_window(model, window);
  const double expected0 = 0.5 * 0.8 / (0.5 * 0.8 + 0.5 * 0.2);
  CHECK(post.probs[0] == doctest::Approx(expected0).epsilon(1e-14));
  CHECK(post.log_evidence == doctest::Approx(std::log(0.5)).epsilon(1e-14));
}

TEST_CASE("posterior over the two-point window matches the hand recursion") {
  // hand forward pass: a_{-1} = (0.4, 0.1); a_0 = (0.296, 0.026); evidence 0.322
  const auto model = oracle::two_state_reference_model();
  const std::vector<Point> window{{0.0}, {0.0}};
  const auto post = posterior_window(model, window);
  CHECK(post.log_evidence == doctest::Approx(std::log(0.322)).epsilon(1e-12));
  CHECK(post.probs[0] == doctest::Approx(0.296 / 0.322).epsilon(1e-12));
  CHECK(post.probs[1] == doctest::Approx(0.026 / 0.322).epsilon(1e-12));
  CHECK(bayes_classify(model, window) == 0);
}

TEST_CASE("classify breaks exact ties toward the lowest class index") {
  const HiddenMarkovModel symmetric(TransitionMatrix(Mat{{0.5, 0.5}, {0.5, 0.5}}),
                                    DiscreteEmission(Mat{{0.5, 0.5}, {0.5, 0.5}}));
  const std::vector<Point> window{{0.0}, {1.0}};
  const auto post = posterior_window(symmetric, window);
  CHECK(post.probs[0] == post.probs[1]);
  CHECK(bayes_classify(symmetric, window) == 0);
}

TEST_CASE("point-mass emissions classify by the last symbol") {
  const HiddenMarkovModel model(TransitionMatrix(Mat{{0.5, 0.5}, {0.5, 0.5}}),
                                DiscreteEmission(Mat{{1.0, 0.0}, {0.0, 1.0}}));
  CHECK(bayes_classify(model, std::vector<Point>{{0.0}, {1.0}}) == 1);
  CHECK(bayes_classify(model, std::vector<Point>{{1.0}, {0.0}}) == 0);
}

TEST_CASE("impossible window raises evidence underflow") {
  const HiddenMarkovModel model(TransitionMatrix(Mat{{0.5, 0.5}, {0.5, 0.5}}),
                                DiscreteEmission(Mat{{1.0, 0.0}, {1.0, 0.0}}));
  CHECK_THROWS_AS(posterior_window(model, std::vector<Point>{{1.0}}),
                  EvidenceUnderflow);
}

TEST_CASE("posterior rejects empty windows and bad start distributions") {
  const auto model = oracle::two_state_reference_model();
  CHECK_THROWS_AS(posterior_window(model, std::vector<Point>{}), WindowLengthMismatch);
  CHECK_THROWS_AS(posterior_window(model, std::vector<Point>{{0.0}}, Vec{1.0, 0.0, 0.0}),
                  DimensionMismatch);
}

TEST_CASE("posterior probabilities sum to one on random models and windows") {
  Rng rng(31);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t m = 2 + static_cast<std::size_t>(rng.uniform() * 2.99);
    const std::size_t alphabet = 2 + static_cast<std::size_t>(rng.uniform() * 2.99);
    const auto model = oracle::random_positive_discrete_model(rng, m, alphabet, 0.0);
    const std::size_t len = 1 + static_cast<std::size_t>(rng.uniform() * 4.99);
    const auto window = oracle::random_symbol_window(rng, len, alphabet);
    const auto post = posterior_window(model, window);
    double sum = 0.0;
    for (double p : post.probs) {
      CHECK(p >= 0.0);
      sum += p;
    }
    CHECK(std::abs(sum - 1.0) <= 1e-10);
  }
}

TEST_CASE("posterior probabilities sum to one for gaussian windows") {
  Rng rng(32);
  Mat cov(2, 2);
  cov(0, 0) = 1.3;
  cov(1, 1) = 0.8;
  cov(0, 1) = cov(1, 0) = 0.4;
  const HiddenMarkovModel model(
      TransitionMatrix(Mat{{0.6, 0.4}, {0.2, 0.8}}),
      GaussianEmission({{0.0, 0.0}, {1.5, -0.5}}, cov));
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Point> window;
    const std::size_t len = 1 + static_cast<std::size_t>(rng.uniform() * 9.99);
    for (std::size_t i = 0; i < len; ++i)
      window.push_back({4.0 * (rng.uniform() - 0.5), 4.0 * (rng.uniform() - 0.5)});
    const auto post = posterior_window(model, window);
    double sum = 0.0;
    for (double p : post.probs) sum += p;
    CHECK(std::abs(sum - 1.0) <= 1e-10);
  }
}

TEST_CASE("window evidences sum to one over the full window space") {
  Rng rng(38);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t m = 2 + static_cast<std::size_t>(rng.uniform() * 2.99);
    const std::size_t alphabet = 2 + static_cast<std::size_t>(rng.uniform() * 1.99);
    const auto model = oracle::random_positive_discrete_model(rng, m, alphabet, 0.01);
    for (std::size_t len : {1, 2, 3}) {
      double total = 0.0;
      std::vector<std::size_t> symbols(len, 0);
      for (;;) {
        std::vector<Point> window;
        for (std::size_t s : symbols) window.push_back({static_cast<double>(s)});
        total += std::exp(posterior_window(model, window).log_evidence);
        std::size_t pos = 0;
        while (pos < len && ++symbols[pos] == alphabet) symbols[pos++] = 0;
        if (pos == len) break;
      }
      CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("posterior agrees with the path-enumeration oracle") {
  Rng rng(33);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t m = 2 + static_cast<std::size_t>(rng.uniform() * 2.99);
    const auto model = oracle::random_positive_discrete_model(rng, m, 3, 0.01);
    const std::size_t len = 1 + static_cast<std::size_t>(rng.uniform() * 3.99);
    const auto window = oracle::random_symbol_window(rng, len, 3);
    const Vec start = oracle::random_dist(rng, m, 0.01);

    const auto fast = posterior_window(model, window, start);
    const auto slow = oracle::posterior_by_enumeration(model, window, start);
    for (std::size_t y = 0; y < m; ++y)
      CHECK(fast.probs[y] == doctest::Approx(slow.probs[y]).epsilon(1e-12));
    CHECK(std::exp(fast.log_evidence) == doctest::Approx(slow.evidence).epsilon(1e-12));
  }
}

TEST_CASE("anchored conditional with no observations is the bare transition") {
  const auto model = oracle::two_state_reference_model();
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      CHECK(conditional_state_posterior(model, {}, -1, i, 0, {j}) ==
            doctest::Approx(model.transition()(i, j)).epsilon(1e-14));
}

TEST_CASE("anchored conditional with identical densities ignores observations") {
  const HiddenMarkovModel model(
      TransitionMatrix(Mat{{0.7, 0.2, 0.1}, {0.3, 0.4, 0.3}, {0.2, 0.3, 0.5}}),
      DiscreteEmission(Mat{{0.3, 0.7}, {0.3, 0.7}, {0.3, 0.7}}));
  const int l = 3;
  std::map<int, Point> observed;
  for (int t = -l; t <= 0; ++t) observed[t] = {t % 2 == 0 ? 0.0 : 1.0};

  // chain conditional: row i of P^l summed over the target set
  Mat power = model.transition().matrix();
  for (int s = 1; s < l; ++s) power = matmul(power, model.transition().matrix());
  const std::vector<int> target{0, 2};
  for (int i = 0; i < 3; ++i) {
    const double expected =
        power(static_cast<std::size_t>(i), 0) + power(static_cast<std::size_t>(i), 2);
    CHECK(conditional_state_posterior(model, observed, -l, i, 0, target) ==
          doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("anchored conditional matches the joint-table oracle on tiny models") {
  Rng rng(34);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t m = 2 + static_cast<std::size_t>(rng.uniform() * 1.99);
    const auto model = oracle::random_positive_discrete_model(rng, m, 2, 0.02);
    // anchor at -2, observations on a subset of {-1, 0}, target at 0
    std::map<int, Point> observed;
    for (int t = -1; t <= 0; ++t)
      if (rng.uniform() < 0.8)
        observed[t] = {static_cast<double>(rng.uniform() < 0.5 ? 0 : 1)};
    const int anchor_state = static_cast<int>(rng.uniform() * static_cast<double>(m));
    const auto target = oracle::random_subset(rng, m);

    const double fast =
        conditional_state_posterior(model, observed, -2, anchor_state, 0, target);
    // oracle starts one step earlier with a random initial law; the anchored
    // conditional must not depend on it
    const Vec nu = oracle::random_dist(rng, m, 0.05);
    const double slow = oracle::conditional_by_enumeration(model, -3, nu, observed, -2,
                                                           anchor_state, 0, target);
    CHECK(fast == doctest::Approx(slow).epsilon(1e-12));
  }
}

TEST_CASE("observations at or before the anchor cancel out") {
  Rng rng(35);
  for (int trial = 0; trial < 100; ++trial) {
    const auto model = oracle::random_positive_discrete_model(rng, 3, 3, 0.02);
    std::map<int, Point> with_past{{-3, {1.0}}, {-2, {2.0}}, {0, {0.0}}};
    std::map<int, Point> without_past{{0, {0.0}}};
    const auto target = oracle::random_subset(rng, 3);
    const double a = conditional_state_posterior(model, with_past, -2, 1, 0, target);
    const double b = conditional_state_posterior(model, without_past, -2, 1, 0, target);
    CHECK(a == b);

    // and the full-joint oracle, which does integrate the past, agrees
    const Vec nu = oracle::random_dist(rng, 3, 0.05);
    const double slow =
        oracle::conditional_by_enumeration(model, -4, nu, with_past, -2, 1, 0, target);
    CHECK(a == doctest::Approx(slow).epsilon(1e-12));
  }
}

TEST_CASE("gaussian posterior agrees with the path-enumeration oracle") {
  Rng rng(36);
  Mat cov(2, 2);
  cov(0, 0) = 0.9;
  cov(1, 1) = 1.4;
  cov(0, 1) = cov(1, 0) = -0.3;
  const HiddenMarkovModel model(
      TransitionMatrix(Mat{{0.55, 0.25, 0.2}, {0.1, 0.7, 0.2}, {0.3, 0.3, 0.4}}),
      GaussianEmission({{0.0, 0.0}, {1.0, -1.0}, {-0.5, 1.5}}, cov));
  for (int trial = 0; trial < 40; ++trial) {
    std::vector<Point> window;
    const std::size_t len = 1 + static_cast<std::size_t>(rng.uniform() * 3.99);
    for (std::size_t i = 0; i < len; ++i)
      window.push_back({3.0 * (rng.uniform() - 0.5), 3.0 * (rng.uniform() - 0.5)});
    const Vec start = oracle::random_dist(rng, 3, 0.02);
    const auto fast = posterior_window(model, window, start);
    const auto slow = oracle::posterior_by_enumeration(model, window, start);
    for (std::size_t y = 0; y < 3; ++y)
      CHECK(fast.probs[y] == doctest::Approx(slow.probs[y]).epsilon(1e-12));
  }
}

TEST_CASE("gaussian anchored conditional matches the joint-table oracle") {
  Rng rng(37);
  const HiddenMarkovModel model(TransitionMatrix(Mat{{0.8, 0.2}, {0.35, 0.65}}),
                                GaussianEmission({{0.0}, {1.2}}, Mat{{0.7}}));
  for (int trial = 0; trial < 60; ++trial) {
    std::map<int, Point> observed;
    for (int t = -2; t <= 0; ++t)
      if (rng.uniform() < 0.7) observed[t] = {2.5 * (rng.uniform() - 0.5)};
    const int anchor = rng.uniform() < 0.5 ? 0 : 1;
    const std::vector<int> target{static_cast<int>(rng.uniform() * 2.0)};
    const double fast =
        conditional_state_posterior(model, observed, -3, anchor, 0, target);
    const Vec nu = oracle::random_dist(rng, 2, 0.05);
    const double slow = oracle::conditional_by_enumeration(model, -4, nu, observed, -3,
                                                           anchor, 0, target);
    CHECK(fast == doctest::Approx(slow).epsilon(1e-12));
  }
}

TEST_CASE("inconsistent anchored conditioning is reported") {
  // frozen chain: from anchor state 0 the symbol 1 can never be emitted
  const HiddenMarkovModel model(TransitionMatrix(Mat{{1.0, 0.0}, {0.0, 1.0}}),
                                DiscreteEmission(Mat{{1.0, 0.0}, {0.0, 1.0}}),
                                Vec{0.5, 0.5});
  const std::map<int, Point> observed{{0, {1.0}}};
  CHECK_THROWS_AS(conditional_state_posterior(model, observed, -1, 0, 0, {0}),
                  InconsistentConditioning);
}

TEST_CASE("anchored range sweeps every anchor state") {
  const auto model = oracle::two_state_reference_model();
  const std::map<int, Point> observed{{0, {0.0}}};
  const auto range = anchored_posterior_range(model, observed, -1, 0, {0});
  const double v0 = conditional_state_posterior(model, observed, -1, 0, 0, {0});
  const double v1 = conditional_state_posterior(model, observed, -1, 1, 0, {0});
  CHECK(range.max_prob == doctest::Approx(std::max(v0, v1)));
  CHECK(range.min_prob == doctest::Approx(std::min(v0, v1)));
}
