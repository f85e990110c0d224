// gapo: group-relative advantage toolkit.
//
// Subcommands operate on JSONL streams (one record per line, order
// preserved) except `analyze`, which emits a single JSON report, and
// `simulate`, which writes a JSONL metrics stream plus a one-line summary.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "gapo/advantage.hpp"
#include "gapo/analysis.hpp"
#include "gapo/hdi.hpp"
#include "gapo/reward.hpp"
#include "gapo/sim.hpp"

namespace {

using ordered_json = nlohmann::ordered_json;

struct StreamOptions {
  std::string input_path;   // empty: stdin
  std::string output_path;  // empty: stdout
};

void add_stream_options(CLI::App* cmd, StreamOptions& opts) {
  cmd->add_option("--input", opts.input_path, "Read from PATH instead of standard input");
  cmd->add_option("--output", opts.output_path, "Write to PATH instead of standard output");
}

// Runs fn(line_number, line) over every non-blank input line; returns the
// process exit code (0 iff every line succeeded).
template <typename Fn>
int for_each_line(std::istream& in, Fn&& fn) {
  std::string line;
  std::size_t line_number = 0;
  bool ok = true;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    ok &= fn(line_number, line);
  }
  return ok ? 0 : 1;
}

bool parse_reward_array(const nlohmann::json& value, std::vector<double>& out,
                        std::string& error) {
  if (!value.is_array() || value.empty()) {
    error = "\"rewards\" must be a non-empty array of numbers";
    return false;
  }
  out.clear();
  out.reserve(value.size());
  for (const auto& item : value) {
    if (!item.is_number()) {
      error = "\"rewards\" must contain only numbers";
      return false;
    }
    const double r = item.get<double>();
    if (!std::isfinite(r) || r < 0.0 || r > 1.0) {
      error = "reward out of range [0, 1]";
      return false;
    }
    out.push_back(r);
  }
  return true;
}

bool parse_group_record(const std::string& line, gapo::RewardGroup& group, std::string& error) {
  nlohmann::json record = nlohmann::json::parse(line, nullptr, false);
  if (record.is_discarded() || !record.is_object()) {
    error = "not a JSON object";
    return false;
  }
  if (!record.contains("prompt_id") || !record["prompt_id"].is_string()) {
    error = "missing string field \"prompt_id\"";
    return false;
  }
  if (!record.contains("rewards")) {
    error = "missing field \"rewards\"";
    return false;
  }
  group.prompt_id = record["prompt_id"].get<std::string>();
  return parse_reward_array(record["rewards"], group.rewards, error);
}

int run_advantage(std::istream& in, std::ostream& out, const gapo::AdvantageConfig& config,
                  double skew_threshold) {
  const gapo::AnalysisConfig analysis{config.tau, skew_threshold};
  return for_each_line(in, [&](std::size_t line_number, const std::string& line) {
    gapo::RewardGroup group;
    std::string error;
    if (!parse_group_record(line, group, error)) {
      std::cerr << "advantage: line " << line_number << ": " << error << "\n";
      return false;
    }
    const gapo::GroupAdvantages result = gapo::compute_advantages(group, config);
    const gapo::GroupDiagnostics diag = gapo::classify_group(group, analysis);
    ordered_json record;
    record["prompt_id"] = group.prompt_id;
    record["estimator"] = gapo::estimator_name(config.estimator);
    record["tau"] = config.tau;
    record["advantages"] = result.advantages;
    record["center"] = result.center;
    record["denominator"] = result.denominator;
    record["degenerate"] = result.degenerate;
    record["skew_label"] = gapo::skew_label_name(diag.label);
    out << record.dump() << "\n";
    return true;
  });
}

int run_reward(std::istream& in, std::ostream& out) {
  return for_each_line(in, [&](std::size_t line_number, const std::string& line) {
    nlohmann::json record = nlohmann::json::parse(line, nullptr, false);
    if (record.is_discarded() || !record.is_object() || !record.contains("predicted") ||
        !record.contains("truth") || !record["predicted"].is_string() ||
        !record["truth"].is_string()) {
      std::cerr << "reward: line " << line_number
                << ": expected {\"predicted\": string, \"truth\": string}\n";
      return false;
    }
    const gapo::EditPair pair{record["predicted"].get<std::string>(),
                              record["truth"].get<std::string>()};
    ordered_json result;
    result["reward"] = gapo::composite_reward(pair);
    out << result.dump() << "\n";
    return true;
  });
}

ordered_json diagnostics_to_json(const gapo::GroupDiagnostics& diag) {
  ordered_json j;
  j["prompt_id"] = diag.prompt_id;
  j["mean"] = diag.mean;
  j["median"] = diag.median;
  j["q"] = diag.q;
  j["sample_skewness"] = diag.sample_skewness;
  j["label"] = gapo::skew_label_name(diag.label);
  j["mean_median_gap"] = diag.mean_median_gap;
  j["low_confidence"] = diag.low_confidence;
  return j;
}

int run_analyze(std::istream& in, std::ostream& out, const gapo::AnalysisConfig& config) {
  std::vector<gapo::RewardGroup> groups;
  const int status = for_each_line(in, [&](std::size_t line_number, const std::string& line) {
    gapo::RewardGroup group;
    std::string error;
    if (!parse_group_record(line, group, error)) {
      std::cerr << "analyze: line " << line_number << ": " << error << "\n";
      return false;
    }
    groups.push_back(std::move(group));
    return true;
  });
  if (status != 0) return status;

  const gapo::BatchReport report = gapo::batch_report(groups, config);
  ordered_json j;
  j["groups"] = report.group_count;
  ordered_json counts, fractions;
  for (const gapo::SkewLabel label :
       {gapo::SkewLabel::left_skewed, gapo::SkewLabel::right_skewed,
        gapo::SkewLabel::approx_normal, gapo::SkewLabel::degenerate}) {
    const auto idx = static_cast<std::size_t>(label);
    counts[std::string(gapo::skew_label_name(label))] = report.counts[idx];
    fractions[std::string(gapo::skew_label_name(label))] = report.fractions[idx];
  }
  j["counts"] = counts;
  j["fractions"] = fractions;
  j["per_group"] = ordered_json::array();
  for (const gapo::GroupDiagnostics& diag : report.groups)
    j["per_group"].push_back(diagnostics_to_json(diag));
  out << j.dump(2) << "\n";
  return 0;
}

// simulate config: plain-text `key = value` lines, '#' comments
bool apply_config_entry(gapo::sim::TrainConfig& config, const std::string& key,
                        const std::string& value, std::string& error) {
  try {
    if (key == "estimator") {
      const auto estimator = gapo::parse_estimator(value);
      if (!estimator) {
        error = "unknown estimator \"" + value + "\"";
        return false;
      }
      config.advantage.estimator = *estimator;
    } else if (key == "tau") {
      config.advantage.tau = std::stod(value);
    } else if (key == "degenerate_threshold") {
      config.advantage.degenerate_threshold = std::stod(value);
    } else if (key == "group_size") {
      config.group_size = std::stoi(value);
    } else if (key == "epsilon") {
      config.epsilon = std::stod(value);
    } else if (key == "beta") {
      config.beta = std::stod(value);
    } else if (key == "learning_rate") {
      config.learning_rate = std::stod(value);
    } else if (key == "steps") {
      config.steps = std::stoi(value);
    } else if (key == "inner_epochs") {
      config.inner_epochs = std::stoi(value);
    } else if (key == "dynamic_sampling") {
      if (value == "true" || value == "1") config.dynamic_sampling = true;
      else if (value == "false" || value == "0") config.dynamic_sampling = false;
      else {
        error = "dynamic_sampling must be true or false";
        return false;
      }
    } else if (key == "outlier_probability") {
      config.outlier.probability = std::stod(value);
    } else if (key == "outlier_mode") {
      const auto mode = gapo::sim::parse_outlier_mode(value);
      if (!mode) {
        error = "unknown outlier_mode \"" + value + "\"";
        return false;
      }
      config.outlier.mode = *mode;
    } else if (key == "seed") {
      config.seed = std::stoull(value);
    } else if (key == "num_prompts") {
      config.num_prompts = std::stoi(value);
    } else if (key == "task_length") {
      config.task_length = std::stoi(value);
    } else if (key == "vocab_size") {
      config.vocab_size = std::stoi(value);
    } else if (key == "eval_rollouts") {
      config.eval_rollouts = std::stoi(value);
    } else {
      error = "unknown config key \"" + key + "\"";
      return false;
    }
  } catch (const std::exception&) {
    error = "invalid value for \"" + key + "\": \"" + value + "\"";
    return false;
  }
  return true;
}

std::string trim(const std::string& s) {
  const std::size_t first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const std::size_t last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

bool load_train_config(const std::string& path, gapo::sim::TrainConfig& config,
                       std::string& error) {
  std::ifstream in(path);
  if (!in) {
    error = "cannot read config file: " + path;
    return false;
  }
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string trimmed = trim(line);
    if (trimmed.empty()) continue;
    const std::size_t eq = trimmed.find('=');
    if (eq == std::string::npos) {
      error = "line " + std::to_string(line_number) + ": expected key = value";
      return false;
    }
    const std::string key = trim(trimmed.substr(0, eq));
    const std::string value = trim(trimmed.substr(eq + 1));
    std::string entry_error;
    if (!apply_config_entry(config, key, value, entry_error)) {
      error = "line " + std::to_string(line_number) + ": " + entry_error;
      return false;
    }
  }
  return true;
}

ordered_json metrics_to_json(const gapo::sim::StepMetrics& m) {
  ordered_json j;
  j["step"] = m.step;
  j["mean_reward"] = m.mean_reward;
  j["exact_match_rate"] = m.exact_match_rate;
  j["pg_clipfrac"] = m.pg_clipfrac;
  j["kl_to_ref"] = m.kl_to_ref;
  j["negative_advantage_fraction"] = m.negative_advantage_fraction;
  j["skipped"] = m.skipped;
  return j;
}

int run_simulate(const std::string& config_path, const std::string& out_path) {
  gapo::sim::TrainConfig config;
  std::string error;
  if (!load_train_config(config_path, config, error)) {
    std::cerr << "simulate: " << error << "\n";
    return 1;
  }
  try {
    config.validate();
  } catch (const std::exception& e) {
    std::cerr << "simulate: " << e.what() << "\n";
    return 1;
  }

  std::ofstream out(out_path);
  if (!out) {
    std::cerr << "simulate: cannot open output: " << out_path << "\n";
    return 1;
  }

  const std::vector<gapo::sim::EditTask> eval_tasks = gapo::sim::make_tasks(config);
  const gapo::sim::ExperimentResult result = gapo::sim::run_experiment(config, eval_tasks);

  for (const gapo::sim::StepMetrics& m : result.metrics) out << metrics_to_json(m).dump() << "\n";
  out.flush();
  if (!out) {
    std::cerr << "simulate: write failed: " << out_path << "\n";
    return 1;
  }

  ordered_json summary;
  summary["seed"] = result.summary.seed;
  summary["steps"] = result.summary.steps;
  summary["final_exact_match"] = result.summary.final_exact_match;
  summary["final_mean_reward"] = result.summary.final_mean_reward;
  summary["mean_pg_clipfrac"] = result.summary.mean_pg_clipfrac;
  std::cout << summary.dump() << "\n";
  return 0;
}

double default_tau() {
  if (const char* env = std::getenv("GAPO_TAU")) {
    try {
      return std::stod(env);
    } catch (const std::exception&) {
      // fall through to the built-in default
    }
  }
  return 0.5;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Group-relative advantage estimation toolkit"};
  app.require_subcommand(1);

  const std::vector<std::string> estimator_names = {"grpo", "gapo-median-div",
                                                    "gapo-median-std", "gapo-mean-div"};

  // advantage
  StreamOptions adv_streams;
  std::string adv_estimator;
  double adv_tau = default_tau();
  double adv_threshold = 1e-8;
  double adv_skew_threshold = 0.5;
  CLI::App* adv = app.add_subcommand("advantage",
                                     "Compute per-group advantages over a JSONL batch");
  adv->add_option("--estimator", adv_estimator, "Advantage estimator")
      ->required()
      ->check(CLI::IsMember(estimator_names));
  adv->add_option("--tau", adv_tau, "HDI coverage fraction (default 0.5, env GAPO_TAU)");
  adv->add_option("--degenerate-threshold", adv_threshold,
                  "Zero out advantages when the denominator falls below this");
  adv->add_option("--skew-threshold", adv_skew_threshold,
                  "Skewness magnitude that counts as skewed");
  add_stream_options(adv, adv_streams);

  // reward
  StreamOptions reward_streams;
  CLI::App* reward = app.add_subcommand("reward",
                                        "Score predicted/truth pairs with the composite reward");
  add_stream_options(reward, reward_streams);

  // analyze
  StreamOptions analyze_streams;
  double analyze_tau = default_tau();
  double analyze_skew_threshold = 0.5;
  CLI::App* analyze = app.add_subcommand("analyze",
                                         "Report the reward-distribution mix of a JSONL batch");
  analyze->add_option("--tau", analyze_tau, "HDI coverage fraction (default 0.5, env GAPO_TAU)");
  analyze->add_option("--skew-threshold", analyze_skew_threshold,
                      "Skewness magnitude that counts as skewed");
  add_stream_options(analyze, analyze_streams);

  // simulate
  std::string sim_config_path;
  std::string sim_out_path;
  CLI::App* simulate = app.add_subcommand("simulate",
                                          "Run the policy-gradient simulator");
  simulate->add_option("--config", sim_config_path, "Plain-text key=value experiment config")
      ->required();
  simulate->add_option("--out", sim_out_path, "Metrics JSONL output path")->required();

  CLI11_PARSE(app, argc, argv);

  const auto with_streams = [](const StreamOptions& opts, auto&& fn) -> int {
    std::ifstream in_file;
    std::ofstream out_file;
    std::istream* in = &std::cin;
    std::ostream* out = &std::cout;
    if (!opts.input_path.empty()) {
      in_file.open(opts.input_path);
      if (!in_file) {
        std::cerr << "cannot read input: " << opts.input_path << "\n";
        return 1;
      }
      in = &in_file;
    }
    if (!opts.output_path.empty()) {
      out_file.open(opts.output_path);
      if (!out_file) {
        std::cerr << "cannot open output: " << opts.output_path << "\n";
        return 1;
      }
      out = &out_file;
    }
    const int status = fn(*in, *out);
    out->flush();
    if (!*out) {
      std::cerr << "write failed\n";
      return 1;
    }
    return status;
  };

  try {
    if (adv->parsed()) {
      gapo::AdvantageConfig config;
      config.estimator = *gapo::parse_estimator(adv_estimator);
      config.tau = adv_tau;
      config.degenerate_threshold = adv_threshold;
      if (!(config.tau >= 0.0 && config.tau <= 1.0)) {
        std::cerr << "advantage: tau must be in [0, 1]\n";
        return 1;
      }
      return with_streams(adv_streams, [&](std::istream& in, std::ostream& out) {
        return run_advantage(in, out, config, adv_skew_threshold);
      });
    }
    if (reward->parsed()) {
      return with_streams(reward_streams, [&](std::istream& in, std::ostream& out) {
        return run_reward(in, out);
      });
    }
    if (analyze->parsed()) {
      if (!(analyze_tau >= 0.0 && analyze_tau <= 1.0)) {
        std::cerr << "analyze: tau must be in [0, 1]\n";
        return 1;
      }
      return with_streams(analyze_streams, [&](std::istream& in, std::ostream& out) {
        return run_analyze(in, out, gapo::AnalysisConfig{analyze_tau, analyze_skew_threshold});
      });
    }
    if (simulate->parsed()) {
      return run_simulate(sim_config_path, sim_out_path);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
