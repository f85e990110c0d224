#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace gapo {

struct HdiConfig {
  double tau = 0.5;  // fraction of the group the interval must cover, in [0, 1]
};

// The minimal-length window of k = max(1, ceil(G*tau)) consecutive order
// statistics. Indices refer to the sorted order of the input; `values` holds
// the k covered rewards in ascending order.
struct HdiResult {
  std::size_t start_index = 0;
  std::size_t end_index = 0;  // inclusive, end - start + 1 == k
  std::vector<double> values;
  double length = 0.0;  // values.back() - values.front()
  double q = 0.0;       // median of values (mean of the middle pair for even k)
};

// Window size used by find_hdi: ceil(G*tau), clamped to [1, G].
std::size_t hdi_window_size(std::size_t group_size, double tau);

// Finds the highest-density interval by a sliding window over the sorted
// rewards. Any interval covering k points is a contiguous block of order
// statistics, and widening a block past k points can never shrink it, so
// scanning the G-k+1 blocks of exactly k points finds the optimum. Ties keep
// the lowest start index (update on strict "<" only). The input is copied,
// never mutated. O(G log G) time from the sort, O(G) extra space.
//
// Throws std::invalid_argument for an empty group ("empty group"), a
// non-finite reward ("invalid reward"), or tau outside [0, 1].
HdiResult find_hdi(std::span<const double> rewards, const HdiConfig& config);

// Median of the HDI values: the robust group center that replaces the mean in
// group-adaptive advantage estimation. Propagates find_hdi errors.
double adaptive_q(std::span<const double> rewards, const HdiConfig& config);

}  // namespace gapo
