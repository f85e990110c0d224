#pragma once

#include <algorithm>
#include <cstddef>
#include <iterator>
#include <numeric>
#include <string>
#include <string_view>
#include <vector>

namespace gapo {

// Levenshtein distance with unit-cost insert/delete/substitute over any pair
// of random-access sequences with comparable elements. Row-rolling DP:
// O(|a|*|b|) time, O(min(|a|,|b|)) extra space.
template <typename SeqA, typename SeqB>
std::size_t edit_distance(const SeqA& a, const SeqB& b) {
  const std::size_t la = std::size(a);
  const std::size_t lb = std::size(b);
  if (lb > la) return edit_distance(b, a);
  if (lb == 0) return la;

  std::vector<std::size_t> row(lb + 1);
  std::iota(row.begin(), row.end(), std::size_t{0});
  for (std::size_t i = 1; i <= la; ++i) {
    std::size_t diag = row[0];  // D[i-1][j-1]
    row[0] = i;
    for (std::size_t j = 1; j <= lb; ++j) {
      const std::size_t up = row[j];  // D[i-1][j]
      const std::size_t sub = diag + (a[i - 1] == b[j - 1] ? 0 : 1);
      row[j] = std::min({row[j - 1] + 1, up + 1, sub});
      diag = up;
    }
  }
  return row[lb];
}

// Composite reward: the average of an exact-match indicator and a normalized
// edit-distance similarity,
//   r = 1/2 * ( 1[pred = truth] + (1 - ed(pred, truth) / max(|pred|, |truth|)) ).
// Always in [0, 1]; equals 1 iff the sequences are identical. Two empty
// sequences score 1 (nothing to edit, and the pair matches exactly).
template <typename SeqA, typename SeqB>
double composite_reward(const SeqA& predicted, const SeqB& truth) {
  const std::size_t lp = std::size(predicted);
  const std::size_t lt = std::size(truth);
  if (lp == 0 && lt == 0) return 1.0;

  const std::size_t ed = edit_distance(predicted, truth);
  const double em = ed == 0 ? 1.0 : 0.0;
  const double ed_term =
      1.0 - static_cast<double>(ed) / static_cast<double>(std::max(lp, lt));
  return 0.5 * (em + ed_term);
}

// A predicted/ground-truth snippet pair scored at character granularity.
struct EditPair {
  std::string predicted;
  std::string truth;
};

inline double composite_reward(const EditPair& pair) {
  return composite_reward(std::string_view(pair.predicted),
                          std::string_view(pair.truth));
}

}  // namespace gapo
