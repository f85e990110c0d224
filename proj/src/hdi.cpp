#include "gapo/hdi.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gapo {

std::size_t hdi_window_size(std::size_t group_size, double tau) {
  const double k = std::ceil(tau * static_cast<double>(group_size));
  if (!(k >= 1.0)) return 1;  // tau == 0: a zero-width window is meaningless
  if (k >= static_cast<double>(group_size)) return group_size;
  return static_cast<std::size_t>(k);
}

HdiResult find_hdi(std::span<const double> rewards, const HdiConfig& config) {
  if (rewards.empty()) throw std::invalid_argument("empty group");
  if (!(config.tau >= 0.0 && config.tau <= 1.0))
    throw std::invalid_argument("invalid config: tau must be in [0, 1]");
  for (const double r : rewards)
    if (!std::isfinite(r)) throw std::invalid_argument("invalid reward: non-finite value");

  std::vector<double> sorted(rewards.begin(), rewards.end());
  std::sort(sorted.begin(), sorted.end());

  const std::size_t n = sorted.size();
  const std::size_t k = hdi_window_size(n, config.tau);

  std::size_t best_start = 0;
  double min_length = sorted[k - 1] - sorted[0];
  for (std::size_t start = 1; start + k <= n; ++start) {
    const double length = sorted[start + k - 1] - sorted[start];
    if (length < min_length) {
      min_length = length;
      best_start = start;
    }
  }

  HdiResult result;
  result.start_index = best_start;
  result.end_index = best_start + k - 1;
  result.values.assign(sorted.begin() + static_cast<std::ptrdiff_t>(best_start),
                       sorted.begin() + static_cast<std::ptrdiff_t>(best_start + k));
  result.length = min_length;
  result.q = k % 2 == 1 ? result.values[k / 2]
                        : 0.5 * (result.values[k / 2 - 1] + result.values[k / 2]);
  return result;
}

double adaptive_q(std::span<const double> rewards, const HdiConfig& config) {
  return find_hdi(rewards, config).q;
}

}  // namespace gapo
