#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "gapo/advantage.hpp"

namespace gapo {

enum class SkewLabel { left_skewed, right_skewed, approx_normal, degenerate };

// Wire names: "left_skewed", "right_skewed", "approx_normal", "degenerate".
std::string_view skew_label_name(SkewLabel label);
std::optional<SkewLabel> parse_skew_label(std::string_view name);

struct AnalysisConfig {
  double tau = 0.5;             // HDI coverage for the adaptive-Q diagnostic
  double skew_threshold = 0.5;  // |skewness| above this counts as skewed
};

// Per-group distribution diagnostics. sample_skewness is the adjusted
// Fisher-Pearson coefficient sqrt(n(n-1))/(n-2) * m3/m2^1.5; it is reported
// as 0 when undefined (degenerate group or G < 3, the latter flagged
// low_confidence).
struct GroupDiagnostics {
  std::string prompt_id;
  double mean = 0.0;
  double median = 0.0;
  double q = 0.0;  // adaptive Q at config.tau
  double sample_skewness = 0.0;
  SkewLabel label = SkewLabel::approx_normal;
  double mean_median_gap = 0.0;  // mean - median
  bool low_confidence = false;
};

struct BatchReport {
  std::size_t group_count = 0;
  std::array<std::size_t, 4> counts{};  // indexed by SkewLabel
  std::array<double, 4> fractions{};    // all zero when group_count == 0
  std::vector<GroupDiagnostics> groups;
};

// Median of the values (mean of the middle pair for even counts).
double sample_median(std::span<const double> values);

// Adjusted Fisher-Pearson sample skewness. Requires n >= 3 and nonzero
// variance; callers gate on those.
double sample_skewness(std::span<const double> values);

// Labels one group: degenerate if all rewards are equal, otherwise skewed
// left/right when the sample skewness crosses -/+ skew_threshold. Groups of
// fewer than 3 rewards have undefined skewness and fall back to approx_normal
// with low_confidence set. Throws std::invalid_argument on an empty group.
GroupDiagnostics classify_group(const RewardGroup& group, const AnalysisConfig& config);

// Per-label counts and fractions over the batch plus per-group diagnostics,
// in input order.
BatchReport batch_report(std::span<const RewardGroup> groups, const AnalysisConfig& config);

}  // namespace gapo
