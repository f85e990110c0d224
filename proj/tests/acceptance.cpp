// Acceptance suite: runs every release criterion and prints one line per
// criterion. Exit code is the number of failures.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "gapo/advantage.hpp"
#include "gapo/analysis.hpp"
#include "gapo/hdi.hpp"
#include "gapo/reward.hpp"
#include "gapo/sim.hpp"

namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* format, ...) {
  va_list args;
  va_start(args, format);
  char buffer[512];
  std::vsnprintf(buffer, sizeof(buffer), format, args);
  va_end(args);
  return buffer;
}

// ---------------------------------------------------------------------------
// shared generators
// ---------------------------------------------------------------------------

std::vector<double> random_group(std::mt19937_64& rng, std::size_t n, int flavor) {
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::normal_distribution<double> jitter(0.0, 0.04);
  std::vector<double> rewards(n);
  switch (flavor % 3) {
    case 0:  // plain uniform
      for (double& r : rewards) r = uniform(rng);
      break;
    case 1: {  // tight bulk high + low outliers (left-skew shape)
      for (double& r : rewards)
        r = uniform(rng) < 0.8 ? std::clamp(0.8 + jitter(rng), 0.0, 1.0)
                               : 0.3 * uniform(rng);
      break;
    }
    default: {  // two clusters
      const double a = 0.2 + 0.2 * uniform(rng);
      const double b = 0.6 + 0.3 * uniform(rng);
      for (double& r : rewards)
        r = std::clamp((uniform(rng) < 0.5 ? a : b) + jitter(rng), 0.0, 1.0);
      break;
    }
  }
  return rewards;
}

// ---------------------------------------------------------------------------
// 1. HDI oracle equivalence
// ---------------------------------------------------------------------------

double brute_force_min_length(std::vector<double> rewards, double tau) {
  std::sort(rewards.begin(), rewards.end());
  const std::size_t n = rewards.size();
  const std::size_t k = gapo::hdi_window_size(n, tau);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t size = k; size <= n; ++size)
    for (std::size_t start = 0; start + size <= n; ++start)
      best = std::min(best, rewards[start + size - 1] - rewards[start]);
  return best;
}

Outcome criterion_hdi_oracle() {
  const auto start = Clock::now();
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<std::size_t> size_dist(2, 512);
  std::uniform_real_distribution<double> tau_dist(0.0, 1.0);
  const int trials = 1000;
  for (int trial = 0; trial < trials; ++trial) {
    const std::vector<double> rewards = random_group(rng, size_dist(rng), trial);
    const double tau = tau_dist(rng);
    const double got = gapo::find_hdi(rewards, {tau}).length;
    const double expected = brute_force_min_length(rewards, tau);
    if (got != expected)
      return {false, fmt("trial %d: window length %.17g != oracle %.17g", trial, got, expected)};
  }
  const double elapsed = seconds_since(start);
  return {elapsed < 10.0, fmt("%d/%d window lengths exact in %.2fs (limit 10s)", trials, trials,
                              elapsed)};
}

// ---------------------------------------------------------------------------
// 2. HDI performance at one million rewards
// ---------------------------------------------------------------------------

Outcome criterion_hdi_performance() {
  std::mt19937_64 rng(4096);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::vector<double> rewards(1000000);
  for (double& r : rewards) r = uniform(rng);
  const auto start = Clock::now();
  const gapo::HdiResult hdi = gapo::find_hdi(rewards, {0.5});
  const double elapsed = seconds_since(start);
  if (hdi.length < 0.0) return {false, "negative interval length"};
  return {elapsed < 1.0, fmt("10^6 rewards in %.3fs (limit 1s)", elapsed)};
}

// ---------------------------------------------------------------------------
// 3. edit-distance oracle, exhaustive over 3 symbols up to length 6
// ---------------------------------------------------------------------------

std::size_t naive_ed(const std::string& a, std::size_t i, const std::string& b, std::size_t j) {
  if (i == 0) return j;
  if (j == 0) return i;
  if (a[i - 1] == b[j - 1]) return naive_ed(a, i - 1, b, j - 1);
  const std::size_t del = naive_ed(a, i - 1, b, j);
  const std::size_t ins = naive_ed(a, i, b, j - 1);
  const std::size_t sub = naive_ed(a, i - 1, b, j - 1);
  return 1 + std::min({del, ins, sub});
}

Outcome criterion_edit_distance_oracle() {
  const auto start = Clock::now();
  std::vector<std::string> all{""};
  std::size_t begin = 0;
  for (int len = 1; len <= 6; ++len) {
    const std::size_t end = all.size();
    for (std::size_t i = begin; i < end; ++i)
      for (const char c : {'a', 'b', 'c'}) all.push_back(all[i] + c);
    begin = end;
  }
  // all now holds every string of length <= 6 over {a, b, c}
  std::size_t checked = 0;
  for (const std::string& a : all) {
    for (const std::string& b : all) {
      const std::size_t dp = gapo::edit_distance(a, b);
      const std::size_t oracle = naive_ed(a, a.size(), b, b.size());
      if (dp != oracle)
        return {false, fmt("mismatch on (\"%s\", \"%s\"): dp %zu oracle %zu", a.c_str(),
                           b.c_str(), dp, oracle)};
      ++checked;
    }
  }
  return {true, fmt("%zu pairs exact in %.1fs", checked, seconds_since(start))};
}

// ---------------------------------------------------------------------------
// 4. composite-reward spot values
// ---------------------------------------------------------------------------

Outcome criterion_reward_spot_values() {
  const double tol = 1e-12;
  struct Case {
    gapo::EditPair pair;
    double expected;
  };
  const std::vector<Case> cases{
      {{"kitten", "sitting"}, 2.0 / 7.0},
      {{"", "abc"}, 0.0},
      {{"abc", "abc"}, 1.0},
      {{"x", "x"}, 1.0},
      {{"return a + b;", "return a + b;"}, 1.0},
  };
  for (const Case& c : cases) {
    const double got = gapo::composite_reward(c.pair);
    if (std::abs(got - c.expected) > tol)
      return {false, fmt("(\"%s\",\"%s\") gave %.17g, expected %.17g", c.pair.predicted.c_str(),
                         c.pair.truth.c_str(), got, c.expected)};
  }
  return {true, fmt("%zu spot values within 1e-12", cases.size())};
}

// ---------------------------------------------------------------------------
// 5. affine invariance of the div estimators
// ---------------------------------------------------------------------------

Outcome criterion_affine_invariance() {
  std::mt19937_64 rng(555);
  std::uniform_int_distribution<std::size_t> size_dist(2, 64);
  const std::vector<gapo::Estimator> estimators{
      gapo::Estimator::grpo, gapo::Estimator::gapo_median_div, gapo::Estimator::gapo_mean_div};
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::vector<double> rewards = random_group(rng, size_dist(rng), trial);
    gapo::RewardGroup group{"g", rewards};
    for (const gapo::Estimator estimator : estimators) {
      gapo::AdvantageConfig config;
      config.estimator = estimator;
      const gapo::GroupAdvantages base = gapo::compute_advantages(group, config);
      for (const double a : {0.5, 2.0, 10.0}) {
        for (const double c : {-0.3, 0.2}) {
          gapo::RewardGroup mapped{"g", rewards};
          for (double& r : mapped.rewards) r = a * r + c;
          const gapo::GroupAdvantages transformed = gapo::compute_advantages(mapped, config);
          for (std::size_t i = 0; i < rewards.size(); ++i) {
            const double diff = std::abs(transformed.advantages[i] - base.advantages[i]);
            worst = std::max(worst, diff);
            if (diff > 1e-9)
              return {false, fmt("%s deviates by %.3g under r -> %.1f*r%+.1f",
                                 std::string(gapo::estimator_name(estimator)).c_str(), diff, a, c)};
          }
        }
      }
    }
  }
  return {true, fmt("1000 groups x 6 maps x 3 estimators, max deviation %.2g (limit 1e-9)", worst)};
}

// ---------------------------------------------------------------------------
// 6. sign-set containment between gapo and grpo
// ---------------------------------------------------------------------------

Outcome criterion_sign_containment() {
  std::mt19937_64 rng(666);
  std::uniform_int_distribution<std::size_t> size_dist(2, 32);
  gapo::AdvantageConfig gapo_config;
  gapo_config.estimator = gapo::Estimator::gapo_median_div;
  int q_above = 0, q_below = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    gapo::RewardGroup group{"g", random_group(rng, size_dist(rng), trial)};
    const gapo::GroupAdvantages grpo = gapo::grpo_advantage(group, {});
    const gapo::GroupAdvantages gapo_out = gapo::gapo_advantage(group, gapo_config);
    if (grpo.degenerate || gapo_out.degenerate) continue;
    if (gapo_out.center > grpo.center) {
      ++q_above;
      if (gapo_out.negative_count < grpo.negative_count)
        return {false, fmt("trial %d: Q > mean but %zu < %zu negatives", trial,
                           gapo_out.negative_count, grpo.negative_count)};
    } else if (gapo_out.center < grpo.center) {
      ++q_below;
      if (gapo_out.negative_count > grpo.negative_count)
        return {false, fmt("trial %d: Q < mean but %zu > %zu negatives", trial,
                           gapo_out.negative_count, grpo.negative_count)};
    }
  }
  return {q_above > 0 && q_below > 0,
          fmt("containment held in 100%% of cases (%d with Q>mean, %d with Q<mean)", q_above,
              q_below)};
}

// ---------------------------------------------------------------------------
// 7. simulator gradient vs central finite differences
// ---------------------------------------------------------------------------

gapo::sim::TabularPolicy random_policy(int length, int vocab, std::uint64_t seed,
                                       double scale = 1.0) {
  gapo::sim::TabularPolicy policy(length, vocab);
  gapo::sim::Rng rng(seed);
  for (int pos = 0; pos < length; ++pos)
    for (int v = 0; v < vocab; ++v) policy.set_logit(pos, v, scale * (rng.u01() - 0.5));
  return policy;
}

Outcome criterion_gradient_check() {
  const int length = 2, vocab = 3;
  const gapo::sim::EditTask task{"t", {0, 2}};
  double worst = 0.0;
  for (const gapo::Estimator estimator :
       {gapo::Estimator::grpo, gapo::Estimator::gapo_median_div,
        gapo::Estimator::gapo_median_std, gapo::Estimator::gapo_mean_div}) {
    gapo::AdvantageConfig adv_config;
    adv_config.estimator = estimator;
    for (const double beta : {0.0, 0.05}) {
      for (int instance = 0; instance < 5; ++instance) {
        const std::uint64_t base = 7000 + 100 * instance;
        const gapo::sim::TabularPolicy old_policy = random_policy(length, vocab, base + 1);
        const gapo::sim::TabularPolicy ref = random_policy(length, vocab, base + 2);
        gapo::sim::TabularPolicy policy = random_policy(length, vocab, base + 3);

        gapo::sim::SurrogateData data;
        for (int g = 0; g < 2; ++g) {
          gapo::sim::Rng rng(base + 10 + g);
          data.groups.push_back(gapo::sim::rollout_group(
              old_policy, task, 6, {0.3, gapo::sim::OutlierMode::low_tail}, rng));
          data.advantages.push_back(gapo::compute_advantages(data.groups.back().group, adv_config));
        }

        const std::vector<double> grad =
            gapo::sim::surrogate_gradient(policy, old_policy, ref, data, 0.2, beta);
        const double h = 1e-5;
        double max_diff = 0.0, max_grad = 0.0;
        for (int pos = 0; pos < length; ++pos) {
          for (int v = 0; v < vocab; ++v) {
            const double saved = policy.logit(pos, v);
            policy.set_logit(pos, v, saved + h);
            const double up =
                gapo::sim::surrogate_objective(policy, old_policy, ref, data, 0.2, beta);
            policy.set_logit(pos, v, saved - h);
            const double down =
                gapo::sim::surrogate_objective(policy, old_policy, ref, data, 0.2, beta);
            policy.set_logit(pos, v, saved);
            const double fd = (up - down) / (2.0 * h);
            max_diff = std::max(max_diff, std::abs(fd - grad[pos * vocab + v]));
            max_grad = std::max(max_grad, std::abs(grad[pos * vocab + v]));
          }
        }
        const double rel = max_diff / std::max(max_grad, 1e-12);
        worst = std::max(worst, rel);
        if (rel >= 1e-6)
          return {false, fmt("%s beta=%.2f instance %d: relative error %.3g",
                             std::string(gapo::estimator_name(estimator)).c_str(), beta, instance,
                             rel)};
      }
    }
  }
  return {true, fmt("4 estimators x beta {0, 0.05}, max relative error %.2g (limit 1e-6)", worst)};
}

// ---------------------------------------------------------------------------
// 8 + 9. directional training experiment and ablation ordering
// ---------------------------------------------------------------------------

struct DirectionalRuns {
  std::map<gapo::Estimator, std::vector<gapo::sim::RunSummary>> summaries;
  double elapsed = 0.0;
};

// The criterion's protocol. The learning rate is calibrated so the runs sit
// in the stressed regime where clip fractions land in the few-percent range
// the training curves report; gentler rates leave every estimator far from
// the clipping boundary and the comparison degenerates into step-size noise.
gapo::sim::TrainConfig protocol_config(gapo::Estimator estimator, std::uint64_t seed) {
  gapo::sim::TrainConfig config;
  config.group_size = 8;
  config.epsilon = 0.2;
  config.beta = 0.01;
  config.learning_rate = 60.0;
  config.steps = 300;
  config.inner_epochs = 2;
  config.dynamic_sampling = false;
  config.advantage.estimator = estimator;
  config.advantage.tau = 0.5;
  config.outlier = {0.15, gapo::sim::OutlierMode::low_tail};
  config.seed = seed;
  config.num_prompts = 32;
  config.task_length = 6;
  config.vocab_size = 5;
  config.eval_rollouts = 256;
  return config;
}

const DirectionalRuns& directional_runs() {
  static DirectionalRuns runs = [] {
    DirectionalRuns out;
    const auto start = Clock::now();
    for (const gapo::Estimator estimator :
         {gapo::Estimator::grpo, gapo::Estimator::gapo_median_div,
          gapo::Estimator::gapo_mean_div, gapo::Estimator::gapo_median_std}) {
      for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const gapo::sim::TrainConfig config = protocol_config(estimator, seed);
        const std::vector<gapo::sim::EditTask> eval_tasks = gapo::sim::make_tasks(config);
        out.summaries[estimator].push_back(
            gapo::sim::run_experiment(config, eval_tasks).summary);
      }
    }
    out.elapsed = seconds_since(start);
    return out;
  }();
  return runs;
}

double mean_final_reward(const std::vector<gapo::sim::RunSummary>& summaries) {
  double sum = 0.0;
  for (const gapo::sim::RunSummary& s : summaries) sum += s.final_mean_reward;
  return sum / static_cast<double>(summaries.size());
}

double mean_clipfrac(const std::vector<gapo::sim::RunSummary>& summaries) {
  double sum = 0.0;
  for (const gapo::sim::RunSummary& s : summaries) sum += s.mean_pg_clipfrac;
  return sum / static_cast<double>(summaries.size());
}

Outcome criterion_directional() {
  const DirectionalRuns& runs = directional_runs();
  const auto& grpo = runs.summaries.at(gapo::Estimator::grpo);
  const auto& gapo_runs = runs.summaries.at(gapo::Estimator::gapo_median_div);
  int wins = 0;
  for (std::size_t seed = 0; seed < grpo.size(); ++seed)
    if (gapo_runs[seed].final_mean_reward >= grpo[seed].final_mean_reward) ++wins;
  const double clip_gapo = mean_clipfrac(gapo_runs);
  const double clip_grpo = mean_clipfrac(grpo);
  const bool pass = wins >= 7 && clip_gapo <= clip_grpo;
  return {pass, fmt("gapo won %d/10 seeds (need 7); clipfrac %.4f vs %.4f grpo; "
                     "reward %.4f vs %.4f; runs took %.0fs",
                     wins, clip_gapo, clip_grpo, mean_final_reward(gapo_runs),
                     mean_final_reward(grpo), runs.elapsed)};
}

Outcome criterion_ablation() {
  const DirectionalRuns& runs = directional_runs();
  const double median_div = mean_final_reward(runs.summaries.at(gapo::Estimator::gapo_median_div));
  const double mean_div = mean_final_reward(runs.summaries.at(gapo::Estimator::gapo_mean_div));
  const double median_std = mean_final_reward(runs.summaries.at(gapo::Estimator::gapo_median_std));
  const double grpo = mean_final_reward(runs.summaries.at(gapo::Estimator::grpo));
  const bool pass = median_div >= mean_div;
  return {pass, fmt("median-div %.4f >= mean-div %.4f; reported: median-std %.4f, grpo %.4f",
                     median_div, mean_div, median_std, grpo)};
}

// ---------------------------------------------------------------------------
// 10. degenerate handling end to end
// ---------------------------------------------------------------------------

Outcome criterion_degenerate() {
  for (const double value : {0.0, 0.5, 1.0}) {
    gapo::RewardGroup group{"g", std::vector<double>(8, value)};
    for (const gapo::Estimator estimator :
         {gapo::Estimator::grpo, gapo::Estimator::gapo_median_div,
          gapo::Estimator::gapo_median_std, gapo::Estimator::gapo_mean_div}) {
      gapo::AdvantageConfig config;
      config.estimator = estimator;
      const gapo::GroupAdvantages out = gapo::compute_advantages(group, config);
      if (!out.degenerate) return {false, "constant group not flagged degenerate"};
      for (const double a : out.advantages)
        if (a != 0.0) return {false, "constant group produced a nonzero advantage"};
    }
    const gapo::FilterResult filtered = gapo::dynamic_sample_filter(std::vector{group});
    if (!filtered.kept.empty() || filtered.dropped.size() != 1)
      return {false, "dynamic sampling kept a constant group"};
  }

  // a policy pinned on its target makes every reward exactly 1.0
  gapo::sim::TrainConfig config;
  config.group_size = 8;
  config.beta = 0.0;
  config.num_prompts = 4;
  config.task_length = 4;
  config.vocab_size = 3;
  config.outlier.probability = 0.0;
  const std::vector<int> target{1, 2, 0, 1};
  gapo::sim::TabularPolicy pinned(4, 3);
  for (int pos = 0; pos < 4; ++pos) pinned.set_logit(pos, target[pos], 50.0);
  const gapo::sim::TabularPolicy ref = pinned;
  std::vector<gapo::sim::EditTask> batch;
  for (int j = 0; j < config.num_prompts; ++j)
    batch.push_back({"p" + std::to_string(j), target});

  for (const bool dynamic : {false, true}) {
    config.dynamic_sampling = dynamic;
    gapo::sim::TabularPolicy trained = pinned;
    const gapo::sim::StepMetrics metrics =
        gapo::sim::train_step(trained, ref, batch, config, 99);
    if (dynamic && !metrics.skipped) return {false, "all-degenerate batch was not skipped"};
    if (std::memcmp(trained.logits().data(), pinned.logits().data(),
                    pinned.logits().size() * sizeof(double)) != 0)
      return {false, fmt("policy changed on a degenerate batch (dynamic_sampling=%d)", dynamic)};
  }
  return {true, "zero advantages, filtered groups, and bit-identical policy"};
}

// ---------------------------------------------------------------------------
// 11. CLI golden files
// ---------------------------------------------------------------------------

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return "<missing:" + path.string() + ">";
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

int run_cli(const std::string& args, const fs::path& out, const fs::path& err) {
  const std::string cmd = std::string("\"") + GAPO_CLI_PATH + "\" " + args + " > \"" +
                          out.string() + "\" 2> \"" + err.string() + "\"";
  const int status = std::system(cmd.c_str());
  return status != -1 && WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Outcome criterion_cli_golden() {
  const fs::path data(GAPO_TEST_DATA_DIR);
  const fs::path dir = fs::temp_directory_path() / "gapo_acceptance";
  fs::create_directories(dir);

  struct Command {
    std::string name;
    std::string args;
    fs::path golden_stdout;
  };
  const std::vector<Command> commands{
      {"reward", "reward --input \"" + (data / "reward_in.jsonl").string() + "\"",
       data / "reward_out.jsonl"},
      {"advantage-grpo",
       "advantage --estimator grpo --input \"" + (data / "advantage_in.jsonl").string() + "\"",
       data / "advantage_grpo_out.jsonl"},
      {"advantage-gapo",
       "advantage --estimator gapo-median-div --tau 0.5 --input \"" +
           (data / "advantage_in.jsonl").string() + "\"",
       data / "advantage_gapo_out.jsonl"},
      {"analyze", "analyze --input \"" + (data / "analyze_in.jsonl").string() + "\"",
       data / "analyze_out.json"},
  };
  for (const Command& cmd : commands) {
    const fs::path out1 = dir / (cmd.name + ".1");
    const fs::path out2 = dir / (cmd.name + ".2");
    if (run_cli(cmd.args, out1, dir / "err") != 0) return {false, cmd.name + " exited nonzero"};
    if (run_cli(cmd.args, out2, dir / "err") != 0) return {false, cmd.name + " exited nonzero"};
    if (read_file(out1) != read_file(out2)) return {false, cmd.name + " differs between runs"};
    if (read_file(out1) != read_file(cmd.golden_stdout))
      return {false, cmd.name + " differs from its golden file"};
  }

  // simulate: metrics stream plus one-line summary, both pinned by seed
  const std::string sim_base = "simulate --config \"" + (data / "simulate.cfg").string() + "\"";
  const fs::path metrics1 = dir / "metrics.1", metrics2 = dir / "metrics.2";
  const fs::path summary1 = dir / "summary.1", summary2 = dir / "summary.2";
  if (run_cli(sim_base + " --out \"" + metrics1.string() + "\"", summary1, dir / "err") != 0)
    return {false, "simulate exited nonzero"};
  if (run_cli(sim_base + " --out \"" + metrics2.string() + "\"", summary2, dir / "err") != 0)
    return {false, "simulate exited nonzero"};
  if (read_file(metrics1) != read_file(metrics2) || read_file(summary1) != read_file(summary2))
    return {false, "simulate differs between runs"};
  if (read_file(metrics1) != read_file(data / "simulate_metrics.jsonl"))
    return {false, "simulate metrics differ from the golden file"};
  if (read_file(summary1) != read_file(data / "simulate_summary.json"))
    return {false, "simulate summary differs from the golden file"};

  return {true, "4 commands byte-identical across runs and against goldens"};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {"hdi-oracle-equivalence", criterion_hdi_oracle},
      {"hdi-performance", criterion_hdi_performance},
      {"edit-distance-oracle", criterion_edit_distance_oracle},
      {"reward-spot-values", criterion_reward_spot_values},
      {"affine-invariance", criterion_affine_invariance},
      {"sign-set-containment", criterion_sign_containment},
      {"gradient-correctness", criterion_gradient_check},
      {"directional-training", criterion_directional},
      {"ablation-ordering", criterion_ablation},
      {"degenerate-handling", criterion_degenerate},
      {"cli-golden-files", criterion_cli_golden},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome outcome;
    try {
      outcome = criteria[i].run();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    if (!outcome.pass) ++failures;
    std::printf("[%s] %02zu %-24s %s\n", outcome.pass ? "PASS" : "FAIL", i + 1,
                criteria[i].name, outcome.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("acceptance: %zu/%zu criteria passed\n", criteria.size() - failures,
              criteria.size());
  return failures;
}
