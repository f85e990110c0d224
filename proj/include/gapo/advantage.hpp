#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gapo/hdi.hpp"

namespace gapo {

// Group-relative advantage estimators.
//   grpo            (r_i - mean) / std                       -- the baseline
//   gapo_median_div (r_i - Q) / sqrt(sum_j (r_j - Q)^2 / (G-1)), Q = HDI median
//   gapo_median_std (r_i - Q) / std                          -- numerator-only variant
//   gapo_mean_div   like median_div but Q = mean of the HDI values
// std is always the sample standard deviation (divisor G-1), and the _div
// denominators sum over all G rewards, not only the HDI.
enum class Estimator { grpo, gapo_median_div, gapo_median_std, gapo_mean_div };

// Wire names: "grpo", "gapo-median-div", "gapo-median-std", "gapo-mean-div".
std::string_view estimator_name(Estimator estimator);
std::optional<Estimator> parse_estimator(std::string_view name);

// One prompt's rollout rewards: the unit of all group-relative computation.
struct RewardGroup {
  std::string prompt_id;
  std::vector<double> rewards;
};

struct AdvantageConfig {
  Estimator estimator = Estimator::grpo;
  double tau = 0.5;                    // HDI coverage for the gapo variants
  double degenerate_threshold = 1e-8;  // denominators below this give zero advantages
};

struct GroupAdvantages {
  std::vector<double> advantages;
  double center = 0.0;       // group mean for grpo, adaptive Q for the gapo variants
  double denominator = 0.0;
  bool degenerate = false;   // denominator below threshold or G == 1; all advantages 0
  std::size_t negative_count = 0;
};

// Baseline normalization: (r_i - mean) / sample std. A group with no variance
// carries no learning signal, so a denominator below the threshold yields
// all-zero advantages instead of an epsilon-inflated blowup.
GroupAdvantages grpo_advantage(const RewardGroup& group, const AdvantageConfig& config);

// Group-adaptive normalization around the HDI-derived Q. Requires a gapo
// estimator in the config ("invalid config" otherwise).
GroupAdvantages gapo_advantage(const RewardGroup& group, const AdvantageConfig& config);

// Dispatches on config.estimator.
GroupAdvantages compute_advantages(const RewardGroup& group, const AdvantageConfig& config);

// true iff every reward equals the first (zero variance, incl. G == 1)
bool is_degenerate_group(std::span<const double> rewards);

struct FilterResult {
  std::vector<RewardGroup> kept;
  std::vector<std::string> dropped;  // prompt ids, in input order
};

// Dynamic-sampling filter: drops groups whose rollouts all received the same
// reward (all-pass and all-fail are both zero-variance), keeps the rest in
// input order.
FilterResult dynamic_sample_filter(std::span<const RewardGroup> groups);

}  // namespace gapo
