#include "gapo/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "gapo/reward.hpp"

namespace gapo::sim {

std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  // splitmix64 finalizer over the combined words
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (a + 1) + 0xbf58476d1ce4e5b9ull * (b + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

std::string_view outlier_mode_name(OutlierMode mode) {
  switch (mode) {
    case OutlierMode::low_tail: return "low_tail";
    case OutlierMode::high_tail: return "high_tail";
    case OutlierMode::uniform: return "uniform";
  }
  return "unknown";
}

std::optional<OutlierMode> parse_outlier_mode(std::string_view name) {
  if (name == "low_tail") return OutlierMode::low_tail;
  if (name == "high_tail") return OutlierMode::high_tail;
  if (name == "uniform") return OutlierMode::uniform;
  return std::nullopt;
}

TabularPolicy::TabularPolicy(int length, int vocab)
    : length_(length), vocab_(vocab),
      logits_(static_cast<std::size_t>(length) * static_cast<std::size_t>(vocab), 0.0) {
  if (length < 1 || vocab < 2)
    throw std::invalid_argument("invalid config: policy needs length >= 1 and vocab >= 2");
}

std::vector<double> TabularPolicy::probabilities(int pos) const {
  std::vector<double> probs(static_cast<std::size_t>(vocab_));
  const double* row = logits_.data() + index(pos, 0);
  double max_logit = row[0];
  for (int v = 1; v < vocab_; ++v) max_logit = std::max(max_logit, row[v]);
  double sum = 0.0;
  for (int v = 0; v < vocab_; ++v) {
    probs[static_cast<std::size_t>(v)] = std::exp(row[v] - max_logit);
    sum += probs[static_cast<std::size_t>(v)];
  }
  for (double& p : probs) p /= sum;
  return probs;
}

std::vector<double> TabularPolicy::log_probabilities(int pos) const {
  std::vector<double> logp(static_cast<std::size_t>(vocab_));
  const double* row = logits_.data() + index(pos, 0);
  double max_logit = row[0];
  for (int v = 1; v < vocab_; ++v) max_logit = std::max(max_logit, row[v]);
  double sum = 0.0;
  for (int v = 0; v < vocab_; ++v) sum += std::exp(row[v] - max_logit);
  const double log_z = max_logit + std::log(sum);
  for (int v = 0; v < vocab_; ++v) logp[static_cast<std::size_t>(v)] = row[v] - log_z;
  return logp;
}

std::vector<double> TabularPolicy::all_probabilities() const {
  std::vector<double> all;
  all.reserve(logits_.size());
  for (int pos = 0; pos < length_; ++pos) {
    const std::vector<double> row = probabilities(pos);
    all.insert(all.end(), row.begin(), row.end());
  }
  return all;
}

std::vector<double> TabularPolicy::all_log_probabilities() const {
  std::vector<double> all;
  all.reserve(logits_.size());
  for (int pos = 0; pos < length_; ++pos) {
    const std::vector<double> row = log_probabilities(pos);
    all.insert(all.end(), row.begin(), row.end());
  }
  return all;
}

std::vector<int> TabularPolicy::greedy_decode() const {
  std::vector<int> seq(static_cast<std::size_t>(length_));
  for (int pos = 0; pos < length_; ++pos) {
    const double* row = logits_.data() + index(pos, 0);
    int best = 0;
    for (int v = 1; v < vocab_; ++v)
      if (row[v] > row[best]) best = v;
    seq[static_cast<std::size_t>(pos)] = best;
  }
  return seq;
}

std::vector<int> TabularPolicy::sample(Rng& rng) const {
  std::vector<int> seq(static_cast<std::size_t>(length_));
  for (int pos = 0; pos < length_; ++pos) {
    const std::vector<double> probs = probabilities(pos);
    seq[static_cast<std::size_t>(pos)] = static_cast<int>(rng.categorical(probs));
  }
  return seq;
}

void TabularPolicy::apply_gradient(std::span<const double> grad, double scale) {
  if (grad.size() != logits_.size())
    throw std::invalid_argument("invalid config: gradient shape mismatch");
  for (std::size_t i = 0; i < logits_.size(); ++i) logits_[i] += scale * grad[i];
  ++version_;
}

RolloutGroup rollout_group(const TabularPolicy& policy, const EditTask& task,
                           int group_size, const OutlierSpec& outlier, Rng& rng) {
  if (static_cast<int>(task.target.size()) != policy.length())
    throw std::invalid_argument("policy/task mismatch: target length != policy length");
  for (const int sym : task.target)
    if (sym < 0 || sym >= policy.vocab())
      throw std::invalid_argument("policy/task mismatch: target symbol outside vocab");
  if (group_size < 1) throw std::invalid_argument("invalid config: group_size must be >= 1");

  const std::vector<double> probs = policy.all_probabilities();
  const int vocab = policy.vocab();
  const int length = policy.length();

  RolloutGroup out;
  out.group.prompt_id = task.prompt_id;
  out.sequences.reserve(static_cast<std::size_t>(group_size));
  out.group.rewards.reserve(static_cast<std::size_t>(group_size));
  out.corrupted.assign(static_cast<std::size_t>(group_size), false);

  for (int i = 0; i < group_size; ++i) {
    std::vector<int> seq(static_cast<std::size_t>(length));
    for (int pos = 0; pos < length; ++pos) {
      const std::span<const double> row(probs.data() + static_cast<std::size_t>(pos) * vocab,
                                        static_cast<std::size_t>(vocab));
      seq[static_cast<std::size_t>(pos)] = static_cast<int>(rng.categorical(row));
    }
    double reward = composite_reward(seq, task.target);
    if (outlier.probability > 0.0 && rng.u01() < outlier.probability) {
      switch (outlier.mode) {
        case OutlierMode::low_tail:
          reward = 0.2 * reward * rng.u01();
          break;
        case OutlierMode::high_tail: {
          const double lo = reward + 0.8 * (1.0 - reward);
          reward = lo + (1.0 - lo) * rng.u01();
          break;
        }
        case OutlierMode::uniform:
          reward = rng.u01();
          break;
      }
      out.corrupted[static_cast<std::size_t>(i)] = true;
    }
    out.sequences.push_back(std::move(seq));
    out.group.rewards.push_back(reward);
  }
  return out;
}

void TrainConfig::validate() const {
  if (group_size < 2) throw std::invalid_argument("invalid config: group_size must be >= 2");
  if (!(epsilon > 0.0)) throw std::invalid_argument("invalid config: epsilon must be > 0");
  if (!(beta >= 0.0)) throw std::invalid_argument("invalid config: beta must be >= 0");
  if (!(learning_rate > 0.0))
    throw std::invalid_argument("invalid config: learning_rate must be > 0");
  if (steps < 0) throw std::invalid_argument("invalid config: steps must be >= 0");
  if (inner_epochs < 1) throw std::invalid_argument("invalid config: inner_epochs must be >= 1");
  if (!(advantage.tau >= 0.0 && advantage.tau <= 1.0))
    throw std::invalid_argument("invalid config: tau must be in [0, 1]");
  if (!(advantage.degenerate_threshold > 0.0))
    throw std::invalid_argument("invalid config: degenerate_threshold must be > 0");
  if (!(outlier.probability >= 0.0 && outlier.probability <= 1.0))
    throw std::invalid_argument("invalid config: outlier_probability must be in [0, 1]");
  if (num_prompts < 1) throw std::invalid_argument("invalid config: num_prompts must be >= 1");
  if (task_length < 1) throw std::invalid_argument("invalid config: task_length must be >= 1");
  if (vocab_size < 2) throw std::invalid_argument("invalid config: vocab_size must be >= 2");
  if (eval_rollouts < 1) throw std::invalid_argument("invalid config: eval_rollouts must be >= 1");
}

namespace {

// ratio*A vs clip(ratio)*A; the clipped branch is active when it is strictly
// smaller, in which case the term's gradient vanishes
struct TermEval {
  double value = 0.0;
  double coeff = 0.0;  // d value / d log-prob of the sampled symbol (ratio * A, or 0)
  bool clipped = false;
};

TermEval eval_term(double advantage, double log_ratio, double epsilon) {
  TermEval t;
  const double ratio = std::exp(log_ratio);
  const double clipped_ratio = std::clamp(ratio, 1.0 - epsilon, 1.0 + epsilon);
  const double unclipped = ratio * advantage;
  const double clipped = clipped_ratio * advantage;
  if (clipped < unclipped) {
    t.value = clipped;
    t.coeff = 0.0;
    t.clipped = true;
  } else {
    t.value = unclipped;
    t.coeff = unclipped;  // d(ratio*A)/d logp_new = ratio*A
  }
  return t;
}

}  // namespace

double surrogate_objective(const TabularPolicy& policy, const TabularPolicy& old_policy,
                           const TabularPolicy& ref, const SurrogateData& data,
                           double epsilon, double beta) {
  const std::vector<double> logp_new = policy.all_log_probabilities();
  const std::vector<double> logp_old = old_policy.all_log_probabilities();
  const int vocab = policy.vocab();
  const int length = policy.length();

  double total = 0.0;
  const double group_weight =
      data.groups.empty() ? 0.0 : 1.0 / static_cast<double>(data.groups.size());
  for (std::size_t g = 0; g < data.groups.size(); ++g) {
    const RolloutGroup& rollouts = data.groups[g];
    const GroupAdvantages& adv = data.advantages[g];
    const double rollout_weight =
        group_weight / static_cast<double>(rollouts.sequences.size());
    for (std::size_t i = 0; i < rollouts.sequences.size(); ++i) {
      const std::vector<int>& seq = rollouts.sequences[i];
      const double a = adv.advantages[i];
      const double token_weight = rollout_weight / static_cast<double>(seq.size());
      for (int pos = 0; pos < length; ++pos) {
        const std::size_t idx = static_cast<std::size_t>(pos) * vocab +
                                static_cast<std::size_t>(seq[static_cast<std::size_t>(pos)]);
        const TermEval t = eval_term(a, logp_new[idx] - logp_old[idx], epsilon);
        total += token_weight * t.value;
      }
    }
  }
  if (beta != 0.0) total -= beta * mean_kl(policy, ref);
  return total;
}

std::vector<double> surrogate_gradient(const TabularPolicy& policy,
                                       const TabularPolicy& old_policy,
                                       const TabularPolicy& ref, const SurrogateData& data,
                                       double epsilon, double beta, SurrogateStats* stats) {
  const std::vector<double> logp_new = policy.all_log_probabilities();
  const std::vector<double> logp_old = old_policy.all_log_probabilities();
  const int vocab = policy.vocab();
  const int length = policy.length();

  // d logp[pos][s] / d logit[pos][v] = 1[v == s] - p[pos][v], so accumulating
  // the per-term coefficients at the sampled symbols plus a per-position total
  // reconstructs the full gradient in O(L*V + terms).
  std::vector<double> coeff_at_symbol(logp_new.size(), 0.0);
  std::vector<double> coeff_sum(static_cast<std::size_t>(length), 0.0);

  const double group_weight =
      data.groups.empty() ? 0.0 : 1.0 / static_cast<double>(data.groups.size());
  for (std::size_t g = 0; g < data.groups.size(); ++g) {
    const RolloutGroup& rollouts = data.groups[g];
    const GroupAdvantages& adv = data.advantages[g];
    const double rollout_weight =
        group_weight / static_cast<double>(rollouts.sequences.size());
    for (std::size_t i = 0; i < rollouts.sequences.size(); ++i) {
      const std::vector<int>& seq = rollouts.sequences[i];
      const double a = adv.advantages[i];
      const double token_weight = rollout_weight / static_cast<double>(seq.size());
      for (int pos = 0; pos < length; ++pos) {
        const std::size_t idx = static_cast<std::size_t>(pos) * vocab +
                                static_cast<std::size_t>(seq[static_cast<std::size_t>(pos)]);
        const TermEval t = eval_term(a, logp_new[idx] - logp_old[idx], epsilon);
        if (stats) {
          ++stats->total;
          if (t.clipped) ++stats->clipped;
        }
        coeff_at_symbol[idx] += token_weight * t.coeff;
        coeff_sum[static_cast<std::size_t>(pos)] += token_weight * t.coeff;
      }
    }
  }

  std::vector<double> grad(logp_new.size(), 0.0);
  for (int pos = 0; pos < length; ++pos) {
    const std::vector<double> probs = policy.probabilities(pos);
    for (int v = 0; v < vocab; ++v) {
      const std::size_t idx = static_cast<std::size_t>(pos) * vocab + static_cast<std::size_t>(v);
      grad[idx] = coeff_at_symbol[idx] -
                  probs[static_cast<std::size_t>(v)] * coeff_sum[static_cast<std::size_t>(pos)];
    }
  }

  if (beta != 0.0) {
    // d KL_t / d logit[t][v] = p[t][v] * ((logp - logref)[t][v] - KL_t)
    const std::vector<double> logp_ref = ref.all_log_probabilities();
    const double kl_weight = beta / static_cast<double>(length);
    for (int pos = 0; pos < length; ++pos) {
      const std::vector<double> probs = policy.probabilities(pos);
      double kl = 0.0;
      for (int v = 0; v < vocab; ++v) {
        const std::size_t idx = static_cast<std::size_t>(pos) * vocab + static_cast<std::size_t>(v);
        kl += probs[static_cast<std::size_t>(v)] * (logp_new[idx] - logp_ref[idx]);
      }
      for (int v = 0; v < vocab; ++v) {
        const std::size_t idx = static_cast<std::size_t>(pos) * vocab + static_cast<std::size_t>(v);
        grad[idx] -= kl_weight * probs[static_cast<std::size_t>(v)] *
                     (logp_new[idx] - logp_ref[idx] - kl);
      }
    }
  }
  return grad;
}

double mean_kl(const TabularPolicy& policy, const TabularPolicy& ref) {
  const std::vector<double> logp = policy.all_log_probabilities();
  const std::vector<double> logp_ref = ref.all_log_probabilities();
  const int vocab = policy.vocab();
  double total = 0.0;
  for (int pos = 0; pos < policy.length(); ++pos) {
    const std::vector<double> probs = policy.probabilities(pos);
    for (int v = 0; v < vocab; ++v) {
      const std::size_t idx = static_cast<std::size_t>(pos) * vocab + static_cast<std::size_t>(v);
      total += probs[static_cast<std::size_t>(v)] * (logp[idx] - logp_ref[idx]);
    }
  }
  return total / static_cast<double>(policy.length());
}

StepMetrics train_step(TabularPolicy& policy, const TabularPolicy& ref,
                       std::span<const EditTask> batch, const TrainConfig& config,
                       std::uint64_t step_seed, int step_index) {
  config.validate();
  if (batch.empty()) throw std::invalid_argument("invalid config: empty task batch");

  StepMetrics metrics;
  metrics.step = step_index;

  const TabularPolicy old_policy = policy;  // rollout + ratio snapshot

  SurrogateData data;
  data.groups.reserve(batch.size());
  std::size_t rollout_count = 0;
  std::size_t exact_matches = 0;
  double reward_sum = 0.0;
  std::vector<RolloutGroup> sampled;
  sampled.reserve(batch.size());
  for (std::size_t j = 0; j < batch.size(); ++j) {
    Rng rng(derive_stream(step_seed, j));
    RolloutGroup rg =
        rollout_group(old_policy, batch[j], config.group_size, config.outlier, rng);
    for (std::size_t i = 0; i < rg.sequences.size(); ++i) {
      reward_sum += rg.group.rewards[i];
      if (rg.sequences[i] == batch[j].target) ++exact_matches;
      ++rollout_count;
    }
    sampled.push_back(std::move(rg));
  }
  metrics.mean_reward = reward_sum / static_cast<double>(rollout_count);
  metrics.exact_match_rate =
      static_cast<double>(exact_matches) / static_cast<double>(rollout_count);

  for (RolloutGroup& rg : sampled) {
    if (config.dynamic_sampling && is_degenerate_group(rg.group.rewards)) continue;
    data.groups.push_back(std::move(rg));
  }

  if (data.groups.empty()) {
    metrics.skipped = true;
    metrics.kl_to_ref = mean_kl(policy, ref);
    return metrics;
  }

  std::size_t negative = 0;
  std::size_t kept_rollouts = 0;
  data.advantages.reserve(data.groups.size());
  for (const RolloutGroup& rg : data.groups) {
    data.advantages.push_back(compute_advantages(rg.group, config.advantage));
    negative += data.advantages.back().negative_count;
    kept_rollouts += rg.group.rewards.size();
  }
  metrics.negative_advantage_fraction =
      static_cast<double>(negative) / static_cast<double>(kept_rollouts);

  SurrogateStats stats;
  for (int epoch = 0; epoch < config.inner_epochs; ++epoch) {
    const std::vector<double> grad =
        surrogate_gradient(policy, old_policy, ref, data, config.epsilon, config.beta, &stats);
    policy.apply_gradient(grad, config.learning_rate);
  }
  metrics.pg_clipfrac =
      stats.total == 0 ? 0.0
                       : static_cast<double>(stats.clipped) / static_cast<double>(stats.total);
  metrics.kl_to_ref = mean_kl(policy, ref);
  return metrics;
}

std::vector<EditTask> make_tasks(const TrainConfig& config) {
  Rng rng(derive_stream(config.seed, 0x7461736bull));  // task stream
  std::vector<EditTask> tasks;
  tasks.reserve(static_cast<std::size_t>(config.num_prompts));
  for (int j = 0; j < config.num_prompts; ++j) {
    EditTask task;
    task.prompt_id = "p" + std::to_string(j);
    task.target.resize(static_cast<std::size_t>(config.task_length));
    for (int pos = 0; pos < config.task_length; ++pos) {
      const int sym = static_cast<int>(rng.u01() * config.vocab_size);
      task.target[static_cast<std::size_t>(pos)] = std::min(sym, config.vocab_size - 1);
    }
    tasks.push_back(std::move(task));
  }
  return tasks;
}

EvalResult evaluate(const TabularPolicy& policy, std::span<const EditTask> tasks) {
  EvalResult result;
  if (tasks.empty()) return result;
  const std::vector<int> decoded = policy.greedy_decode();
  std::size_t matches = 0;
  double reward_sum = 0.0;
  for (const EditTask& task : tasks) {
    if (decoded == task.target) ++matches;
    reward_sum += composite_reward(decoded, task.target);
  }
  result.exact_match_rate = static_cast<double>(matches) / static_cast<double>(tasks.size());
  result.mean_reward = reward_sum / static_cast<double>(tasks.size());
  return result;
}

double sampled_eval_mean_reward(const TabularPolicy& policy, std::span<const EditTask> tasks,
                                int rollouts_per_task, std::uint64_t seed) {
  if (tasks.empty() || rollouts_per_task < 1) return 0.0;
  double sum = 0.0;
  for (std::size_t j = 0; j < tasks.size(); ++j) {
    Rng rng(derive_stream(seed, 0x6576616cull, j));  // eval stream, one per task
    for (int i = 0; i < rollouts_per_task; ++i)
      sum += composite_reward(policy.sample(rng), tasks[j].target);
  }
  return sum / (static_cast<double>(tasks.size()) * static_cast<double>(rollouts_per_task));
}

ExperimentResult run_experiment(const TrainConfig& config, std::span<const EditTask> eval_tasks) {
  config.validate();
  const std::vector<EditTask> tasks = make_tasks(config);

  TabularPolicy policy(config.task_length, config.vocab_size);
  const TabularPolicy ref = policy;  // uniform reference

  ExperimentResult result;
  result.metrics.reserve(static_cast<std::size_t>(config.steps));
  for (int step = 0; step < config.steps; ++step) {
    result.metrics.push_back(train_step(policy, ref, tasks, config,
                                        derive_stream(config.seed, 0x73746570ull, step), step));
  }

  const EvalResult eval = evaluate(policy, eval_tasks);
  result.summary.seed = config.seed;
  result.summary.steps = config.steps;
  result.summary.final_exact_match = eval.exact_match_rate;
  result.summary.final_mean_reward =
      sampled_eval_mean_reward(policy, eval_tasks, config.eval_rollouts, config.seed);
  double clip_sum = 0.0;
  std::size_t clip_steps = 0;
  for (const StepMetrics& m : result.metrics) {
    if (m.skipped) continue;
    clip_sum += m.pg_clipfrac;
    ++clip_steps;
  }
  result.summary.mean_pg_clipfrac =
      clip_steps == 0 ? 0.0 : clip_sum / static_cast<double>(clip_steps);
  return result;
}

}  // namespace gapo::sim
