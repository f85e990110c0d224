#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gapo/advantage.hpp"

namespace gapo::sim {

// Deterministic uniform stream. mt19937_64 has a standard-mandated sequence
// and the [0,1) mapping below avoids std::uniform_real_distribution, whose
// output is implementation-defined; streams are therefore reproducible
// across platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double u01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Index sampled by CDF inversion over the given probability row.
  std::size_t categorical(std::span<const double> probs) {
    const double u = u01();
    double cum = 0.0;
    for (std::size_t i = 0; i + 1 < probs.size(); ++i) {
      cum += probs[i];
      if (u < cum) return i;
    }
    return probs.size() - 1;
  }

 private:
  std::mt19937_64 engine_;
};

// splitmix64-style mixing of (seed, a, b) into an independent stream seed
std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

// A synthetic edit prompt: the rollout target over a small symbol alphabet.
struct EditTask {
  std::string prompt_id;
  std::vector<int> target;  // length L, symbols in [0, vocab)
};

enum class OutlierMode { low_tail, high_tail, uniform };

std::string_view outlier_mode_name(OutlierMode mode);
std::optional<OutlierMode> parse_outlier_mode(std::string_view name);

// Reward-level corruption, replacing a rollout's reward r with probability p:
//   low_tail   uniform in [0, 0.2*r]
//   high_tail  uniform in [r + 0.8*(1-r), 1]
//   uniform    uniform in [0, 1]
struct OutlierSpec {
  double probability = 0.0;
  OutlierMode mode = OutlierMode::low_tail;
};

// Position-factorized softmax policy over fixed-length sequences. Logits are
// a row-major length x vocab table; every row's softmax is an independent
// per-position distribution.
class TabularPolicy {
 public:
  TabularPolicy(int length, int vocab);

  int length() const { return length_; }
  int vocab() const { return vocab_; }
  std::uint64_t version() const { return version_; }

  double logit(int pos, int sym) const { return logits_[index(pos, sym)]; }
  void set_logit(int pos, int sym, double value) { logits_[index(pos, sym)] = value; }
  std::span<const double> logits() const { return logits_; }

  // softmax / log-softmax of one position row
  std::vector<double> probabilities(int pos) const;
  std::vector<double> log_probabilities(int pos) const;
  // all rows at once, row-major length x vocab
  std::vector<double> all_probabilities() const;
  std::vector<double> all_log_probabilities() const;

  std::vector<int> greedy_decode() const;  // per-position argmax, first on ties
  std::vector<int> sample(Rng& rng) const;

  // logits += scale * grad (same layout); bumps the update counter
  void apply_gradient(std::span<const double> grad, double scale);

 private:
  std::size_t index(int pos, int sym) const {
    return static_cast<std::size_t>(pos) * static_cast<std::size_t>(vocab_) +
           static_cast<std::size_t>(sym);
  }

  int length_;
  int vocab_;
  std::vector<double> logits_;
  std::uint64_t version_ = 0;
};

// One prompt's sampled group: sequences, their (possibly corrupted) rewards,
// and which rewards the outlier injector replaced.
struct RolloutGroup {
  std::vector<std::vector<int>> sequences;
  RewardGroup group;
  std::vector<bool> corrupted;
};

// Samples group_size sequences position-independently from the policy, scores
// each against task.target with the composite reward, then applies reward-level
// outlier injection. Throws std::invalid_argument on a policy/task shape
// mismatch.
RolloutGroup rollout_group(const TabularPolicy& policy, const EditTask& task,
                           int group_size, const OutlierSpec& outlier, Rng& rng);

struct TrainConfig {
  int group_size = 8;           // rollouts per prompt
  double epsilon = 0.2;         // ratio clip range
  double beta = 0.01;           // KL-to-reference coefficient
  double learning_rate = 1.0;
  int steps = 300;
  int inner_epochs = 2;         // updates per rollout snapshot; >1 exercises clipping
  bool dynamic_sampling = false;
  AdvantageConfig advantage{};
  OutlierSpec outlier{};
  std::uint64_t seed = 0;
  int num_prompts = 32;
  int task_length = 6;          // L
  int vocab_size = 5;           // V
  int eval_rollouts = 64;       // clean samples per eval task for the final mean reward

  void validate() const;  // throws std::invalid_argument naming the bad field
};

struct StepMetrics {
  int step = 0;
  double mean_reward = 0.0;           // post-injection, over all sampled rollouts
  double exact_match_rate = 0.0;      // sequence == target, over all sampled rollouts
  double pg_clipfrac = 0.0;           // clipped-branch fraction over (rollout, position) terms
  double kl_to_ref = 0.0;             // mean per-position KL(policy || ref) after the update
  double negative_advantage_fraction = 0.0;  // over kept groups
  bool skipped = false;               // dynamic sampling dropped every group
};

// Fixed data for one surrogate evaluation: sampled sequences and the
// per-rollout advantages they were assigned (broadcast across positions).
struct SurrogateData {
  std::vector<RolloutGroup> groups;
  std::vector<GroupAdvantages> advantages;  // parallel to groups
};

struct SurrogateStats {
  std::size_t clipped = 0;
  std::size_t total = 0;
};

// Clipped-surrogate objective with exact per-position KL penalty:
//   mean over (group, rollout, position) of min(ratio*A, clip(ratio)*A)
//   - beta * mean over positions of KL(policy || ref).
// The ratio compares policy to old_policy at the sampled symbol.
double surrogate_objective(const TabularPolicy& policy, const TabularPolicy& old_policy,
                           const TabularPolicy& ref, const SurrogateData& data,
                           double epsilon, double beta);

// Analytic gradient of surrogate_objective w.r.t. the policy logits (same
// row-major layout). A term's gradient is zero when the clipped branch is
// active, i.e. clip(ratio)*A < ratio*A; stats counts those terms.
std::vector<double> surrogate_gradient(const TabularPolicy& policy,
                                       const TabularPolicy& old_policy,
                                       const TabularPolicy& ref, const SurrogateData& data,
                                       double epsilon, double beta,
                                       SurrogateStats* stats = nullptr);

// Exact categorical KL(policy || ref), averaged over positions.
double mean_kl(const TabularPolicy& policy, const TabularPolicy& ref);

// One training step: snapshot the policy, sample a group per prompt from the
// snapshot, optionally drop zero-variance groups (dynamic sampling), compute
// per-group advantages, then ascend the clipped surrogate for
// config.inner_epochs updates. Per-prompt rollout streams derive from
// step_seed so serial and parallel execution agree.
StepMetrics train_step(TabularPolicy& policy, const TabularPolicy& ref,
                       std::span<const EditTask> batch, const TrainConfig& config,
                       std::uint64_t step_seed, int step_index = 0);

struct RunSummary {
  std::uint64_t seed = 0;
  int steps = 0;
  double final_exact_match = 0.0;   // greedy decode vs each eval task
  double final_mean_reward = 0.0;   // clean sampled eval: see sampled_eval_mean_reward
  double mean_pg_clipfrac = 0.0;    // over non-skipped steps; 0 when none ran
};

struct ExperimentResult {
  std::vector<StepMetrics> metrics;
  RunSummary summary;
};

// Training prompts for a config: num_prompts tasks with independent random
// targets drawn from the seed. The policy table is shared across prompts, so
// per-prompt achievable reward differs and the group-relative baseline has
// real work to do; hedging also produces organically skewed reward groups on
// top of any injected outliers.
std::vector<EditTask> make_tasks(const TrainConfig& config);

// Greedy-decode evaluation of a policy over tasks.
struct EvalResult {
  double exact_match_rate = 0.0;
  double mean_reward = 0.0;
};
EvalResult evaluate(const TabularPolicy& policy, std::span<const EditTask> tasks);

// Mean composite reward of rollouts_per_task clean samples (no outlier
// injection) per eval task. Greedy decoding saturates as soon as the argmax
// tilts onto the target, so the summary's final mean reward uses this sampled
// measure of how much probability mass the policy actually concentrates.
double sampled_eval_mean_reward(const TabularPolicy& policy, std::span<const EditTask> tasks,
                                int rollouts_per_task, std::uint64_t seed);

// Full training run: deterministic function of (config, eval_tasks). Emits one
// StepMetrics per step and a final greedy-decode evaluation summary.
ExperimentResult run_experiment(const TrainConfig& config, std::span<const EditTask> eval_tasks);

}  // namespace gapo::sim
