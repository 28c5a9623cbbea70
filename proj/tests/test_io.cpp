#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "hmmclass/hmmclass.hpp"
#include "oracle.hpp"

using namespace hmmclass;

namespace {

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / name;
}

}  // namespace

TEST_CASE("model json: discrete round trip of the reference model") {
  const auto j = nlohmann::json::parse(R"({
    "transition": [[0.9, 0.1], [0.1, 0.9]],
    "emission": {"type": "discrete", "table": [[0.8, 0.2], [0.2, 0.8]]}
  })");
  const auto model = model_from_json(j);
  CHECK(model.num_classes() == 2);
  CHECK(model.transition()(0, 0) == 0.9);
  CHECK(model.emission().discrete().prob(0, 0) == 0.8);
  // no "initial" means the stationary distribution
  CHECK(model.initial()[0] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("model json: gaussian with explicit initial") {
  const auto j = nlohmann::json::parse(R"({
    "transition": [[0.6, 0.4], [0.3, 0.7]],
    "emission": {"type": "gaussian",
                 "means": [[0.0, 0.0], [1.5, -1.0]],
                 "covariance": [[1.0, 0.2], [0.2, 2.0]]},
    "initial": [0.25, 0.75]
  })");
  const auto model = model_from_json(j);
  CHECK_FALSE(model.emission().is_discrete());
  CHECK(model.initial()[1] == 0.75);
  CHECK(model.emission().gaussian().dim() == 2);
}

TEST_CASE("model json: decimal literals parse to the nearest double") {
  const auto j = nlohmann::json::parse(R"({
    "transition": [[0.1, 0.9], [0.3, 0.7]],
    "emission": {"type": "discrete", "table": [[1e-3, 0.999], [0.5, 0.5]]}
  })");
  const auto model = model_from_json(j);
  CHECK(model.transition()(0, 0) == 0.1);
  CHECK(model.emission().discrete().prob(0, 0) == 1e-3);
}

TEST_CASE("model json: malformed documents are rejected with ParseError") {
  CHECK_THROWS_AS(model_from_json(nlohmann::json::parse("[1,2]")), ParseError);
  CHECK_THROWS_AS(model_from_json(nlohmann::json::parse(R"({"emission": {}})")),
                  ParseError);
  CHECK_THROWS_AS(
      model_from_json(nlohmann::json::parse(
          R"({"transition": [[0.5, 0.5],[0.5, 0.5]], "emission": {"type": "nope"}})")),
      ParseError);
  CHECK_THROWS_AS(model_from_json(nlohmann::json::parse(
                      R"({"transition": [[1.0]], "emission": {"type": "nope"}})")),
                  ConfigError);
  CHECK_THROWS_AS(
      model_from_json(nlohmann::json::parse(
          R"({"transition": [[0.5, 0.5],[0.5, 0.5]],
              "emission": {"type": "discrete", "table": [[0.5, "x"],[0.5, 0.5]]}})")),
      ParseError);
}

TEST_CASE("model file loading") {
  const auto path = temp_file("hmmclass_model_test.json");
  {
    std::ofstream out(path);
    out << R"({"transition": [[0.5,0.5],[0.5,0.5]],
               "emission": {"type":"discrete","table":[[1.0,0.0],[0.0,1.0]]}})";
  }
  const auto model = load_model_file(path.string());
  CHECK(model.num_classes() == 2);
  CHECK_THROWS_AS(load_model_file("/nonexistent/x.json"), ConfigError);
  std::filesystem::remove(path);
}

TEST_CASE("labeled csv: single gaussian row") {
  std::istringstream in("x_1,x_2,x_3,label\n0.5,1.2,0.0,2\n");
  const auto seq = read_labeled_csv(in, 4);
  CHECK(seq.length() == 1);
  CHECK(seq.observations[0] == Point{0.5, 1.2, 0.0});
  CHECK(seq.labels[0] == 2);
}

TEST_CASE("labeled csv: errors carry line numbers") {
  std::istringstream empty("x_1,label\n");
  CHECK_THROWS_WITH_AS(read_labeled_csv(empty, 2), "no data rows after the header",
                       ParseError);

  std::istringstream bad_header("a,b\n1,0\n");
  CHECK_THROWS_AS(read_labeled_csv(bad_header, 2), ParseError);

  std::istringstream bad_number("x_1,label\n0.5,0\nnope,1\n");
  try {
    read_labeled_csv(bad_number, 2);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }

  std::istringstream bad_label("x_1,label\n0.5,7\n");
  CHECK_THROWS_AS(read_labeled_csv(bad_label, 2), LabelOutOfRange);

  std::istringstream ragged("x_1,label\n0.5,1,9\n");
  CHECK_THROWS_AS(read_labeled_csv(ragged, 2), ParseError);

  std::istringstream wrong_dim("x_1,x_2,label\n0.5,0.5,1\n");
  CHECK_THROWS_AS(read_labeled_csv(wrong_dim, 2, 3), ParseError);
}

TEST_CASE("labeled csv round trip is bit exact") {
  Mat cov(3, 3);
  cov(0, 0) = 1.0;
  cov(1, 1) = 0.5;
  cov(2, 2) = 2.0;
  cov(0, 1) = cov(1, 0) = 0.3;
  const HiddenMarkovModel model(
      TransitionMatrix(Mat{{0.6, 0.4}, {0.1, 0.9}}),
      GaussianEmission({{0.0, 0.0, 0.0}, {1.0, -2.0, 0.5}}, cov));
  const auto seq = simulate(model, 500, 424242);

  std::ostringstream out;
  write_labeled_csv(out, seq);
  std::istringstream in(out.str());
  const auto back = read_labeled_csv(in, 2);

  REQUIRE(back.length() == seq.length());
  CHECK(back.labels == seq.labels);
  CHECK(back.observations == seq.observations);  // bitwise-equal doubles
}

TEST_CASE("format_double round trips random values") {
  Rng rng(71);
  for (int i = 0; i < 2000; ++i) {
    const double v = (rng.uniform() - 0.5) * std::pow(10.0, rng.uniform() * 12.0 - 6.0);
    CHECK(parse_double(format_double(v), 0) == v);
  }
}

TEST_CASE("result table: shape checks, metadata and csv layout") {
  ResultTable t({"l", "risk"});
  t.set_meta("seed", "42");
  t.set_meta("config_hash", hex64(fnv1a("abc")));
  t.add_row({"0", "0.25"});
  t.add_row({"1", "0.20"});
  CHECK_THROWS_AS(t.add_row({"2"}), ConfigError);

  const std::string csv = t.to_csv();
  CHECK(csv.find("# seed=42\n") != std::string::npos);
  CHECK(csv.find("# config_hash=") != std::string::npos);
  CHECK(csv.find("l,risk\n") != std::string::npos);
  CHECK(csv.find("1,0.20\n") != std::string::npos);
  CHECK(t.cell(1, 1) == "0.20");
}

TEST_CASE("fnv1a is stable") {
  CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a("a") == fnv1a("a"));
  CHECK(fnv1a("a") != fnv1a("b"));
}

TEST_CASE("validate_against flags foreign sequences") {
  const auto model = oracle::two_state_reference_model();
  LabeledSequence seq;
  seq.observations.push_back({0.0});
  seq.labels.push_back(5);
  CHECK_THROWS_AS(seq.validate_against(model), LabelOutOfRange);
  seq.labels[0] = 1;
  CHECK_NOTHROW(seq.validate_against(model));
  seq.observations[0] = {9.0};
  CHECK_THROWS_AS(seq.validate_against(model), ConfigError);
}
