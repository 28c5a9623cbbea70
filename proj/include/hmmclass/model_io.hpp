#pragma once

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "hmmclass/errors.hpp"
#include "hmmclass/model.hpp"
#include "hmmclass/sequence.hpp"

namespace hmmclass {

// Shortest decimal representation that parses back to the same double.
inline std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view s, std::size_t line_no) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw ParseError("line " + std::to_string(line_no) + ": bad number '" +
                     std::string(s) + "'");
  return v;
}

namespace detail {

inline Mat json_matrix(const nlohmann::json& j, const std::string& what) {
  if (!j.is_array() || j.empty() || !j.front().is_array())
    throw ParseError(what + " must be an array of rows");
  const std::size_t rows = j.size(), cols = j.front().size();
  Mat m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    if (!j[i].is_array() || j[i].size() != cols)
      throw ParseError(what + " is ragged at row " + std::to_string(i));
    for (std::size_t k = 0; k < cols; ++k) {
      if (!j[i][k].is_number()) throw ParseError(what + " has a non-numeric entry");
      m(i, k) = j[i][k].get<double>();
    }
  }
  return m;
}

inline Vec json_vector(const nlohmann::json& j, const std::string& what) {
  if (!j.is_array()) throw ParseError(what + " must be an array");
  Vec v;
  v.reserve(j.size());
  for (const auto& e : j) {
    if (!e.is_number()) throw ParseError(what + " has a non-numeric entry");
    v.push_back(e.get<double>());
  }
  return v;
}

}  // namespace detail

// Model document:
//   { "transition": [[...], ...],
//     "emission": {"type": "discrete", "table": [[...], ...]}
//              |  {"type": "gaussian", "means": [[...], ...], "covariance": [[...], ...]},
//     "initial": [...] }            (optional; omitted means stationary)
inline HiddenMarkovModel model_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ParseError("model document must be an object");
  if (!j.contains("transition")) throw ParseError("model is missing 'transition'");
  if (!j.contains("emission")) throw ParseError("model is missing 'emission'");

  TransitionMatrix transition(detail::json_matrix(j["transition"], "transition"));

  const auto& je = j["emission"];
  if (!je.is_object() || !je.contains("type"))
    throw ParseError("emission must be an object with a 'type'");
  const std::string type = je["type"].get<std::string>();
  std::optional<EmissionModel> emission;
  if (type == "discrete") {
    if (!je.contains("table")) throw ParseError("discrete emission is missing 'table'");
    emission.emplace(DiscreteEmission(detail::json_matrix(je["table"], "emission table")));
  } else if (type == "gaussian") {
    if (!je.contains("means") || !je.contains("covariance"))
      throw ParseError("gaussian emission needs 'means' and 'covariance'");
    const Mat means = detail::json_matrix(je["means"], "means");
    std::vector<Vec> mu(means.rows());
    for (std::size_t i = 0; i < means.rows(); ++i)
      mu[i].assign(means.row(i).begin(), means.row(i).end());
    emission.emplace(
        GaussianEmission(std::move(mu), detail::json_matrix(je["covariance"], "covariance")));
  } else {
    throw ParseError("unknown emission type '" + type + "'");
  }

  if (j.contains("initial"))
    return HiddenMarkovModel(std::move(transition), std::move(*emission),
                             detail::json_vector(j["initial"], "initial"));
  return HiddenMarkovModel(std::move(transition), std::move(*emission));
}

inline HiddenMarkovModel load_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open model file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("model file '" + path + "': " + e.what());
  }
  return model_from_json(j);
}

// Labeled-sequence CSV: optional leading '# key=value' comment lines, then
// the header "x_1,...,x_d,label" and one row per time point. Decimal points,
// newline-delimited, no quoting.
inline void write_labeled_csv(
    std::ostream& out, const LabeledSequence& seq,
    const std::vector<std::pair<std::string, std::string>>& metadata = {}) {
  for (const auto& [k, v] : metadata) out << "# " << k << "=" << v << "\n";
  const std::size_t d = seq.observations.empty() ? 1 : seq.observations.front().size();
  for (std::size_t k = 1; k <= d; ++k) out << "x_" << k << ",";
  out << "label\n";
  for (std::size_t i = 0; i < seq.length(); ++i) {
    for (double v : seq.observations[i]) out << format_double(v) << ",";
    out << seq.labels[i] << "\n";
  }
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      cells.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  cells.push_back(cur);
  return cells;
}

// Reads the CSV format above. `num_classes` bounds the labels; when
// `expect_dim` is nonzero, the header must declare exactly that many columns.
inline LabeledSequence read_labeled_csv(std::istream& in, std::size_t num_classes,
                                        std::size_t expect_dim = 0) {
  std::string line;
  std::size_t header_line = 0;
  for (;;) {
    if (!std::getline(in, line))
      throw ParseError("line " + std::to_string(header_line + 1) + ": missing header");
    ++header_line;
    if (line.empty() || line[0] != '#') break;  // metadata comments precede the header
  }
  const auto header = split_csv_line(line);
  const std::string at_header = "line " + std::to_string(header_line) + ": ";
  if (header.size() < 2 || header.back() != "label")
    throw ParseError(at_header + "header must be x_1,...,x_d,label");
  const std::size_t d = header.size() - 1;
  for (std::size_t k = 0; k < d; ++k)
    if (header[k] != "x_" + std::to_string(k + 1))
      throw ParseError(at_header + "expected column 'x_" + std::to_string(k + 1) +
                       "', found '" + header[k] + "'");
  if (expect_dim != 0 && d != expect_dim)
    throw ParseError(at_header + "header declares " + std::to_string(d) +
                     " observation columns, expected " + std::to_string(expect_dim));

  LabeledSequence seq;
  std::size_t line_no = header_line;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != d + 1)
      throw ParseError("line " + std::to_string(line_no) + ": expected " +
                       std::to_string(d + 1) + " cells, found " +
                       std::to_string(cells.size()));
    Point x(d);
    for (std::size_t k = 0; k < d; ++k) x[k] = parse_double(cells[k], line_no);
    const double raw_label = parse_double(cells[d], line_no);
    const long long y = std::llround(raw_label);
    if (static_cast<double>(y) != raw_label || y < 0 ||
        y >= static_cast<long long>(num_classes))
      throw LabelOutOfRange("line " + std::to_string(line_no) + ": label " + cells[d] +
                            " outside 0.." + std::to_string(num_classes - 1));
    seq.observations.push_back(std::move(x));
    seq.labels.push_back(static_cast<int>(y));
  }
  if (seq.length() == 0) throw ParseError("no data rows after the header");
  return seq;
}

inline LabeledSequence ingest_labeled_csv(const std::string& path, std::size_t num_classes,
                                          std::size_t expect_dim = 0) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open CSV file '" + path + "'");
  return read_labeled_csv(in, num_classes, expect_dim);
}

}  // namespace hmmclass
