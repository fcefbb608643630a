#pragma once

#include <utility>
#include <vector>

#include "rcl/types.hpp"

namespace rcl {

enum class CoverMode { exact, greedy };

/// A finite subset of a distribution family certified to cover it within eps
/// under the F-norm. certified_radius is the attained max-min distance.
struct EpsilonNet {
  std::vector<int> member_indices;
  double epsilon = 0.0;
  double certified_radius = 0.0;
};

struct CoveringResult {
  int count = 0;
  EpsilonNet net;
  bool exact = false;  // false: greedy upper bound on the covering number
};

/// Minimal (exact mode) or greedy eps-net of the family under the F-norm.
/// Net members are drawn from the family itself. Exact mode enumerates
/// subsets by increasing size and is guarded to |family| <= 20.
CoveringResult covering_number(const DistributionFamily& family, double eps,
                               const FunctionClass& f_class,
                               CoverMode mode = CoverMode::exact);

struct EntropyRatePoint {
  int n = 0;
  double eps = 0.0;
  double entropy = 0.0;  // log2 of the covering number, bits
  double rate = 0.0;     // entropy / n
};

/// log2 N_F(eps_n) / n along a schedule of (n, eps_n) pairs with n increasing
/// and eps_n nonincreasing; the empirical view of the vanishing-rate condition.
std::vector<EntropyRatePoint> entropy_rate_profile(
    const DistributionFamily& family, const FunctionClass& f_class,
    const std::vector<std::pair<int, double>>& eps_sequence,
    CoverMode mode = CoverMode::exact);

}  // namespace rcl
