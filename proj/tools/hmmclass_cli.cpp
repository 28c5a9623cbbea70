// Command-line frontend: model I/O, simulation, windowed posterior
// inference, exact and Monte Carlo risk sweeps, convergence-bound reports,
// kernel classification risk, the bundled simulation study, and CSV
// ingestion checks. Exit codes: 0 success, 1 configuration error,
// 2 numeric failure.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "hmmclass/hmmclass.hpp"

namespace {

using nlohmann::json;
using namespace hmmclass;

struct CommonOpts {
  std::string config_path;
  std::string out_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> l;
  std::optional<long long> n;
  std::optional<double> h;
};

void attach_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->set_help_flag("--help", "print this help message");  // frees -h for --h
  cmd->add_option("--config", opts.config_path, "JSON config file");
  cmd->add_option("--out", opts.out_path, "output CSV path (default: stdout)");
  cmd->add_option("--seed", opts.seed, "random seed override");
  cmd->add_option("--l", opts.l, "memory length override");
  cmd->add_option("--n", opts.n, "sample/training-size override");
  cmd->add_option("--h", opts.h, "bandwidth override");
}

struct LoadedConfig {
  json doc = json::object();
  std::string hash;
};

LoadedConfig load_config(const std::string& path) {
  if (path.empty()) return {json::object(), hex64(fnv1a(""))};
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string bytes = buf.str();
  json doc;
  try {
    doc = json::parse(bytes);
  } catch (const json::exception& e) {
    throw ParseError("config '" + path + "': " + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  return {std::move(doc), hex64(fnv1a(bytes))};
}

void check_task(const json& cfg, const std::string& name) {
  if (cfg.contains("task") && cfg["task"].get<std::string>() != name)
    throw ConfigError("config task '" + cfg["task"].get<std::string>() +
                      "' does not match subcommand '" + name + "'");
}

HiddenMarkovModel model_from_config(const json& cfg) {
  if (cfg.contains("model")) return model_from_json(cfg["model"]);
  if (cfg.contains("model_path"))
    return load_model_file(cfg["model_path"].get<std::string>());
  throw ConfigError("config needs 'model' or 'model_path'");
}

std::uint64_t effective_seed(const json& cfg, const CommonOpts& opts,
                             std::uint64_t fallback = 0) {
  if (opts.seed) return *opts.seed;
  if (cfg.contains("seed")) return cfg["seed"].get<std::uint64_t>();
  return fallback;
}

std::optional<Vec> start_dist_from(const json& cfg) {
  if (!cfg.contains("start_dist")) return std::nullopt;
  return cfg["start_dist"].get<Vec>();
}

void emit(const ResultTable& table, const CommonOpts& opts,
          const std::string& summary) {
  if (opts.out_path.empty()) {
    table.write_csv(std::cout);
  } else {
    table.save_csv(opts.out_path);
    std::cout << summary << "\n" << "wrote " << opts.out_path << "\n";
  }
}

void base_meta(ResultTable& table, const LoadedConfig& cfg, std::uint64_t seed) {
  table.set_meta("tool_version", kVersion);
  table.set_meta("seed", std::to_string(seed));
  table.set_meta("config_hash", cfg.hash);
}

// ---- subcommands -------------------------------------------------------

void run_simulate(const CommonOpts& opts) {
  const auto cfg = load_config(opts.config_path);
  check_task(cfg.doc, "simulate");
  const auto model = model_from_config(cfg.doc);
  std::size_t length = 0;
  if (opts.n) {
    length = static_cast<std::size_t>(*opts.n);
  } else if (cfg.doc.contains("length")) {
    length = cfg.doc["length"].get<std::size_t>();
  } else {
    throw ConfigError("simulate needs a length (--n or config 'length')");
  }
  const std::uint64_t seed = effective_seed(cfg.doc, opts);
  const auto seq = simulate(model, length, seed);

  const std::vector<std::pair<std::string, std::string>> meta{
      {"tool_version", kVersion},
      {"seed", std::to_string(seed)},
      {"config_hash", cfg.hash}};
  if (opts.out_path.empty()) {
    write_labeled_csv(std::cout, seq, meta);
  } else {
    std::ofstream out(opts.out_path, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + opts.out_path + "'");
    write_labeled_csv(out, seq, meta);
    std::cout << "simulated " << length << " points\nwrote " << opts.out_path << "\n";
  }
}

void run_posterior(const CommonOpts& opts) {
  const auto cfg = load_config(opts.config_path);
  check_task(cfg.doc, "posterior");
  const auto model = model_from_config(cfg.doc);
  if (!cfg.doc.contains("window"))
    throw ConfigError("posterior needs a 'window' (array of points)");
  std::vector<Point> window;
  for (const auto& p : cfg.doc["window"]) window.push_back(p.get<Point>());

  const auto post = posterior_window(model, window, start_dist_from(cfg.doc));
  const int map_class = argmax_lowest(post.probs);

  ResultTable table({"class", "posterior"});
  base_meta(table, cfg, effective_seed(cfg.doc, opts));
  table.set_meta("log_evidence", format_double(post.log_evidence));
  table.set_meta("map_class", std::to_string(map_class));
  for (std::size_t y = 0; y < post.probs.size(); ++y)
    table.add_row({std::to_string(y), format_double(post.probs[y])});

  std::ostringstream summary;
  summary << "map_class=" << map_class
          << " log_evidence=" << format_double(post.log_evidence);
  emit(table, opts, summary.str());
}

void run_risk(const CommonOpts& opts) {
  const auto cfg = load_config(opts.config_path);
  check_task(cfg.doc, "risk");
  const auto model = model_from_config(cfg.doc);

  std::vector<unsigned> ls;
  if (opts.l) {
    ls.push_back(static_cast<unsigned>(*opts.l));
  } else if (cfg.doc.contains("l_values")) {
    for (const auto& v : cfg.doc["l_values"]) ls.push_back(v.get<unsigned>());
  } else if (cfg.doc.contains("l_max")) {
    for (unsigned l = 0; l <= cfg.doc["l_max"].get<unsigned>(); ++l) ls.push_back(l);
  } else if (cfg.doc.contains("l")) {
    ls.push_back(cfg.doc["l"].get<unsigned>());
  } else {
    throw ConfigError("risk needs --l, 'l', 'l_values' or 'l_max'");
  }

  const std::string method = cfg.doc.value("method", std::string("exact"));
  const std::uint64_t seed = effective_seed(cfg.doc, opts);
  std::uint64_t n_samples = 100'000;
  if (opts.n) n_samples = static_cast<std::uint64_t>(*opts.n);
  else if (cfg.doc.contains("n_samples")) n_samples = cfg.doc["n_samples"].get<std::uint64_t>();
  const auto start = start_dist_from(cfg.doc);

  ResultTable table({"l", "method", "value", "std_error", "n_samples"});
  base_meta(table, cfg, seed);
  std::ostringstream summary;
  for (unsigned l : ls) {
    RiskEstimate r;
    if (method == "exact") {
      r = bayes_risk_exact(model, l, start);
    } else if (method == "monte_carlo") {
      r = bayes_risk_monte_carlo(model, l, n_samples, seed, start);
    } else {
      throw ConfigError("risk method must be 'exact' or 'monte_carlo'");
    }
    table.add_row({std::to_string(l),
                   r.method == RiskMethod::exact_enumeration ? "exact" : "monte_carlo",
                   format_double(r.value), format_double(r.std_error),
                   std::to_string(r.n_samples)});
    summary << "R_" << l << "=" << format_double(r.value) << " ";
  }
  emit(table, opts, summary.str());
}

void run_bounds(const CommonOpts& opts) {
  const auto cfg = load_config(opts.config_path);
  check_task(cfg.doc, "bounds");
  const auto model = model_from_config(cfg.doc);

  std::optional<IntegrationSpec> integration;
  if (!model.emission().is_discrete() || cfg.doc.contains("n_samples")) {
    IntegrationSpec spec;
    spec.kind = model.emission().is_discrete() ? Integration::exact_sum
                                               : Integration::monte_carlo;
    if (cfg.doc.contains("n_samples"))
      spec.n_samples = cfg.doc["n_samples"].get<std::uint64_t>();
    spec.seed = effective_seed(cfg.doc, opts);
    integration = spec;
  }
  const auto c = compute_bound_constants(model, integration);

  unsigned l_max = 10;
  if (opts.l) l_max = static_cast<unsigned>(*opts.l);
  else if (cfg.doc.contains("l_max")) l_max = cfg.doc["l_max"].get<unsigned>();

  ResultTable table({"key", "value"});
  base_meta(table, cfg, effective_seed(cfg.doc, opts));
  const auto kv = [&](const std::string& k, const std::string& v) {
    table.add_row({k, v});
  };
  kv("alpha", format_double(c.alpha));
  kv("eta", format_double(c.eta));
  kv("beta", format_double(c.beta));
  kv("gamma", format_double(c.gamma));
  kv("a", format_double(c.a));
  kv("b", format_double(c.b));
  kv("not_one_step_contractive", c.not_one_step_contractive ? "true" : "false");
  kv("beta_method",
     c.beta_detail.method == Integration::exact_sum ? "exact_sum" : "monte_carlo");
  if (c.beta_detail.method == Integration::monte_carlo) {
    kv("beta_std_error", format_double(c.beta_detail.std_error));
    kv("beta_n_samples", std::to_string(c.beta_detail.n_samples));
  }
  for (unsigned l = 0; l <= l_max; ++l) {
    const auto bounds = risk_gap_bounds(l, c);
    kv("same_model_bound_l" + std::to_string(l),
       format_double(std::min(1.0, bounds.same_model)));
    kv("general_bound_l" + std::to_string(l),
       format_double(std::min(1.0, bounds.general)));
  }

  std::ostringstream summary;
  summary << "alpha=" << format_double(c.alpha) << " eta=" << format_double(c.eta)
          << " beta=" << format_double(c.beta) << " gamma=" << format_double(c.gamma)
          << " a=" << format_double(c.a) << " b=" << format_double(c.b);
  emit(table, opts, summary.str());
}

TrainingSequence sequence_from_config(const json& spec, const HiddenMarkovModel* model,
                                      unsigned l, std::uint64_t fallback_seed,
                                      std::size_t num_classes) {
  if (spec.contains("csv")) {
    return {ingest_labeled_csv(spec["csv"].get<std::string>(), num_classes),
            Provenance::ingested};
  }
  if (!model)
    throw ConfigError("simulated sequences need a model ('model' or 'model_path')");
  if (!spec.contains("n")) throw ConfigError("sequence spec needs 'n' or 'csv'");
  const std::size_t n = spec["n"].get<std::size_t>();
  const std::uint64_t seed =
      spec.contains("seed") ? spec["seed"].get<std::uint64_t>() : fallback_seed;
  return {simulate(*model, n + l, seed), Provenance::simulated};
}

void run_kernel_risk(const CommonOpts& opts) {
  const auto cfg = load_config(opts.config_path);
  check_task(cfg.doc, "kernel-risk");

  std::optional<HiddenMarkovModel> model;
  if (cfg.doc.contains("model") || cfg.doc.contains("model_path"))
    model = model_from_config(cfg.doc);

  unsigned l = 0;
  if (opts.l) l = static_cast<unsigned>(*opts.l);
  else if (cfg.doc.contains("l")) l = cfg.doc["l"].get<unsigned>();

  const KernelSpec kernel =
      kernel_by_name(cfg.doc.value("kernel", std::string("gaussian")));

  std::vector<double> h_grid;
  if (opts.h) h_grid.push_back(*opts.h);
  else if (cfg.doc.contains("h_grid"))
    h_grid = cfg.doc["h_grid"].get<std::vector<double>>();
  else if (cfg.doc.contains("h")) h_grid.push_back(cfg.doc["h"].get<double>());
  else throw ConfigError("kernel-risk needs --h, 'h' or 'h_grid'");

  std::size_t num_classes = cfg.doc.value("num_classes", std::size_t{0});
  if (num_classes == 0 && model) num_classes = model->num_classes();
  if (num_classes == 0)
    throw ConfigError("kernel-risk needs 'num_classes' when data comes from CSV");

  const std::uint64_t seed = effective_seed(cfg.doc, opts);
  if (!cfg.doc.contains("train") || !cfg.doc.contains("test"))
    throw ConfigError("kernel-risk needs 'train' and 'test' sections");
  json train_spec = cfg.doc["train"];
  if (opts.n) train_spec["n"] = static_cast<std::size_t>(*opts.n);
  const auto train = sequence_from_config(train_spec, model ? &*model : nullptr, l,
                                          derive_seed(seed, 1), num_classes);
  const auto test = sequence_from_config(cfg.doc["test"], model ? &*model : nullptr, l,
                                         derive_seed(seed, 2), num_classes);

  const auto rows = bandwidth_grid_eval(train, l, kernel, h_grid, test.data);
  ResultTable table({"h", "error_rate", "std_error", "n_windows"});
  base_meta(table, cfg, seed);
  table.set_meta("kernel", kernel.name());
  table.set_meta("l", std::to_string(l));
  std::ostringstream summary;
  for (const auto& [h, r] : rows) {
    table.add_row({format_double(h), format_double(r.value),
                   format_double(r.std_error), std::to_string(r.n_samples)});
    summary << "h=" << format_double(h) << ": " << format_double(r.value) << " ";
  }
  emit(table, opts, summary.str());
}

void run_sim_table(const CommonOpts& opts) {
  const auto cfg = load_config(opts.config_path);
  check_task(cfg.doc, "reproduce-sim-table");
  SimTableOptions table_opts;
  if (cfg.doc.contains("bandwidth")) table_opts.bandwidth = cfg.doc["bandwidth"].get<double>();
  if (opts.h) table_opts.bandwidth = *opts.h;
  if (cfg.doc.contains("sigma")) table_opts.sigma = cfg.doc["sigma"].get<double>();
  if (opts.n) table_opts.test_windows = static_cast<std::size_t>(*opts.n);
  if (cfg.doc.contains("test_windows"))
    table_opts.test_windows = cfg.doc["test_windows"].get<std::size_t>();
  if (cfg.doc.contains("reps")) table_opts.reps = cfg.doc["reps"].get<std::size_t>();
  const std::uint64_t seed = effective_seed(cfg.doc, opts, 1);

  auto table = reproduce_sim_table(seed, table_opts);
  if (!opts.config_path.empty()) table.set_meta("config_hash", cfg.hash);

  std::ostringstream summary;
  summary << "sim study: " << table.rows().size() << " cells (sim x l x n)";
  emit(table, opts, summary.str());
}

void run_ingest_check(const CommonOpts& opts) {
  const auto cfg = load_config(opts.config_path);
  check_task(cfg.doc, "ingest-check");
  if (!cfg.doc.contains("csv") || !cfg.doc.contains("num_classes"))
    throw ConfigError("ingest-check needs 'csv' and 'num_classes'");
  const auto seq = ingest_labeled_csv(cfg.doc["csv"].get<std::string>(),
                                      cfg.doc["num_classes"].get<std::size_t>(),
                                      cfg.doc.value("dim", std::size_t{0}));
  std::vector<std::size_t> counts(cfg.doc["num_classes"].get<std::size_t>(), 0);
  for (int y : seq.labels) ++counts[static_cast<std::size_t>(y)];
  std::cout << "ok: rows=" << seq.length()
            << " dim=" << seq.observations.front().size() << " label_counts=";
  for (std::size_t k = 0; k < counts.size(); ++k)
    std::cout << counts[k] << (k + 1 < counts.size() ? "/" : "\n");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hidden-Markov window classification toolkit"};
  app.require_subcommand(1);

  CommonOpts opts;
  const struct {
    const char* name;
    const char* help;
    void (*run)(const CommonOpts&);
  } commands[] = {
      {"simulate", "simulate a labeled sequence and write it as CSV", run_simulate},
      {"posterior", "windowed posterior of the class at the window end", run_posterior},
      {"risk", "exact or Monte Carlo misclassification risk per memory length", run_risk},
      {"bounds", "convergence-bound constants and bound curves", run_bounds},
      {"kernel-risk", "empirical risk of the kernel rule with memory", run_kernel_risk},
      {"reproduce-sim-table", "run the bundled simulation study", run_sim_table},
      {"ingest-check", "validate a labeled-sequence CSV file", run_ingest_check},
  };
  for (const auto& c : commands) attach_common(app.add_subcommand(c.name, c.help), opts);

  try {
    app.parse(argc, argv);
    for (const auto& c : commands)
      if (app.get_subcommand(c.name)->parsed()) {
        c.run(opts);
        return 0;
      }
    return 1;
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
