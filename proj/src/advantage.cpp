#include "gapo/advantage.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace gapo {

std::string_view estimator_name(Estimator estimator) {
  switch (estimator) {
    case Estimator::grpo: return "grpo";
    case Estimator::gapo_median_div: return "gapo-median-div";
    case Estimator::gapo_median_std: return "gapo-median-std";
    case Estimator::gapo_mean_div: return "gapo-mean-div";
  }
  return "unknown";
}

std::optional<Estimator> parse_estimator(std::string_view name) {
  if (name == "grpo") return Estimator::grpo;
  if (name == "gapo-median-div") return Estimator::gapo_median_div;
  if (name == "gapo-median-std") return Estimator::gapo_median_std;
  if (name == "gapo-mean-div") return Estimator::gapo_mean_div;
  return std::nullopt;
}

namespace {

double mean_of(std::span<const double> values) {
  return std::accumulate(values.begin(), values.end(), 0.0) /
         static_cast<double>(values.size());
}

// sqrt( sum_j (r_j - center)^2 / (G-1) ); the sample std when center == mean
double spread_about(std::span<const double> values, double center) {
  double sum_sq = 0.0;
  for (const double v : values) {
    const double d = v - center;
    sum_sq += d * d;
  }
  return std::sqrt(sum_sq / static_cast<double>(values.size() - 1));
}

void validate_group(const RewardGroup& group) {
  if (group.rewards.empty()) throw std::invalid_argument("empty group");
  for (const double r : group.rewards)
    if (!std::isfinite(r)) throw std::invalid_argument("invalid reward: non-finite value");
}

GroupAdvantages normalize(std::span<const double> rewards, double center,
                          double denominator, double threshold) {
  GroupAdvantages out;
  out.center = center;
  out.denominator = denominator;
  if (rewards.size() < 2 || denominator < threshold) {
    out.degenerate = true;
    out.advantages.assign(rewards.size(), 0.0);
    return out;
  }
  out.advantages.reserve(rewards.size());
  for (const double r : rewards) {
    const double a = (r - center) / denominator;
    out.advantages.push_back(a);
    if (a < 0.0) ++out.negative_count;
  }
  return out;
}

}  // namespace

GroupAdvantages grpo_advantage(const RewardGroup& group, const AdvantageConfig& config) {
  validate_group(group);
  const std::span<const double> rewards(group.rewards);
  const double mean = mean_of(rewards);
  const double stddev = rewards.size() >= 2 ? spread_about(rewards, mean) : 0.0;
  return normalize(rewards, mean, stddev, config.degenerate_threshold);
}

GroupAdvantages gapo_advantage(const RewardGroup& group, const AdvantageConfig& config) {
  validate_group(group);
  const std::span<const double> rewards(group.rewards);

  double q = 0.0;
  double denominator = 0.0;
  switch (config.estimator) {
    case Estimator::gapo_median_div: {
      q = adaptive_q(rewards, HdiConfig{config.tau});
      denominator = rewards.size() >= 2 ? spread_about(rewards, q) : 0.0;
      break;
    }
    case Estimator::gapo_median_std: {
      q = adaptive_q(rewards, HdiConfig{config.tau});
      denominator = rewards.size() >= 2 ? spread_about(rewards, mean_of(rewards)) : 0.0;
      break;
    }
    case Estimator::gapo_mean_div: {
      const HdiResult hdi = find_hdi(rewards, HdiConfig{config.tau});
      q = mean_of(hdi.values);
      denominator = rewards.size() >= 2 ? spread_about(rewards, q) : 0.0;
      break;
    }
    case Estimator::grpo:
      throw std::invalid_argument("invalid config: gapo_advantage requires a gapo estimator");
  }
  return normalize(rewards, q, denominator, config.degenerate_threshold);
}

GroupAdvantages compute_advantages(const RewardGroup& group, const AdvantageConfig& config) {
  return config.estimator == Estimator::grpo ? grpo_advantage(group, config)
                                             : gapo_advantage(group, config);
}

bool is_degenerate_group(std::span<const double> rewards) {
  for (const double r : rewards)
    if (r != rewards.front()) return false;
  return true;
}

FilterResult dynamic_sample_filter(std::span<const RewardGroup> groups) {
  FilterResult result;
  for (const RewardGroup& group : groups) {
    if (!group.rewards.empty() && is_degenerate_group(group.rewards))
      result.dropped.push_back(group.prompt_id);
    else
      result.kept.push_back(group);
  }
  return result;
}

}  // namespace gapo
