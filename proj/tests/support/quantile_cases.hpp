#pragma once

#include <string>
#include <vector>

namespace othpo::testing {

// Per-task losses and their mid-rank quantiles (rank - 0.5) / n with ties
// sharing the average rank, computed by hand.
struct QuantileCase {
  std::string name;
  std::vector<double> losses;
  std::vector<double> expected;
};

inline std::vector<QuantileCase> quantile_cases() {
  return {
      {"three_distinct", {3, 1, 2}, {5.0 / 6.0, 1.0 / 6.0, 3.0 / 6.0}},
      {"leading_tie", {1, 1, 2}, {1.0 / 3.0, 1.0 / 3.0, 5.0 / 6.0}},
      {"singleton", {4}, {0.5}},
      {"all_tied", {2, 2, 2, 2}, {0.5, 0.5, 0.5, 0.5}},
      // Sorted 1,1 | 3 | 5,5: average ranks 1.5, 3, 4.5.
      {"two_tie_groups", {5, 1, 5, 3, 1}, {0.8, 0.2, 0.8, 0.5, 0.2}},
  };
}

}  // namespace othpo::testing
