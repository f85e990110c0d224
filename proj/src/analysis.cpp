#include "gapo/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace gapo {

std::string_view skew_label_name(SkewLabel label) {
  switch (label) {
    case SkewLabel::left_skewed: return "left_skewed";
    case SkewLabel::right_skewed: return "right_skewed";
    case SkewLabel::approx_normal: return "approx_normal";
    case SkewLabel::degenerate: return "degenerate";
  }
  return "unknown";
}

std::optional<SkewLabel> parse_skew_label(std::string_view name) {
  if (name == "left_skewed") return SkewLabel::left_skewed;
  if (name == "right_skewed") return SkewLabel::right_skewed;
  if (name == "approx_normal") return SkewLabel::approx_normal;
  if (name == "degenerate") return SkewLabel::degenerate;
  return std::nullopt;
}

double sample_median(std::span<const double> values) {
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  return n % 2 == 1 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
}

double sample_skewness(std::span<const double> values) {
  const double n = static_cast<double>(values.size());
  const double mean =
      std::accumulate(values.begin(), values.end(), 0.0) / n;
  double m2 = 0.0;
  double m3 = 0.0;
  for (const double v : values) {
    const double d = v - mean;
    m2 += d * d;
    m3 += d * d * d;
  }
  m2 /= n;
  m3 /= n;
  const double g1 = m3 / (m2 * std::sqrt(m2));
  return std::sqrt(n * (n - 1.0)) / (n - 2.0) * g1;
}

GroupDiagnostics classify_group(const RewardGroup& group, const AnalysisConfig& config) {
  if (group.rewards.empty()) throw std::invalid_argument("empty group");
  const std::span<const double> rewards(group.rewards);

  GroupDiagnostics diag;
  diag.prompt_id = group.prompt_id;
  diag.mean = std::accumulate(rewards.begin(), rewards.end(), 0.0) /
              static_cast<double>(rewards.size());
  diag.median = sample_median(rewards);
  diag.q = adaptive_q(rewards, HdiConfig{config.tau});
  diag.mean_median_gap = diag.mean - diag.median;

  if (is_degenerate_group(rewards)) {
    diag.label = SkewLabel::degenerate;
  } else if (rewards.size() < 3) {
    diag.label = SkewLabel::approx_normal;
    diag.low_confidence = true;
  } else {
    diag.sample_skewness = sample_skewness(rewards);
    if (diag.sample_skewness < -config.skew_threshold)
      diag.label = SkewLabel::left_skewed;
    else if (diag.sample_skewness > config.skew_threshold)
      diag.label = SkewLabel::right_skewed;
    else
      diag.label = SkewLabel::approx_normal;
  }
  return diag;
}

BatchReport batch_report(std::span<const RewardGroup> groups, const AnalysisConfig& config) {
  BatchReport report;
  report.group_count = groups.size();
  report.groups.reserve(groups.size());
  for (const RewardGroup& group : groups) {
    report.groups.push_back(classify_group(group, config));
    ++report.counts[static_cast<std::size_t>(report.groups.back().label)];
  }
  if (report.group_count > 0) {
    for (std::size_t i = 0; i < report.counts.size(); ++i)
      report.fractions[i] = static_cast<double>(report.counts[i]) /
                            static_cast<double>(report.group_count);
  }
  return report;
}

}  // namespace gapo
