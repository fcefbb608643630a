#include "rcl/covering.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

#include "rcl/errors.hpp"
#include "rcl/measures.hpp"

namespace rcl {

namespace {

Matrix pairwise_distances(const DistributionFamily& family,
                          const FunctionClass& f_class) {
  const int k = family.size();
  Matrix d = Matrix::Zero(k, k);
  for (int i = 0; i < k; ++i) {
    for (int j = i + 1; j < k; ++j) {
      const double v =
          f_norm_diff(family.members[static_cast<std::size_t>(i)].probs,
                      family.members[static_cast<std::size_t>(j)].probs,
                      f_class);
      d(i, j) = v;
      d(j, i) = v;
    }
  }
  return d;
}

double max_min_distance(const Matrix& d, const std::vector<int>& net) {
  double radius = 0.0;
  for (Eigen::Index i = 0; i < d.rows(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (int m : net) {
      best = std::min(best, d(i, m));
    }
    radius = std::max(radius, best);
  }
  return radius;
}

// First subset (in lexicographic order) of the given size whose coverage
// bitmasks OR to the full family, or empty if none.
std::vector<int> first_covering_subset(const std::vector<std::uint32_t>& covers,
                                       int k, int size, std::uint32_t full) {
  std::vector<int> pick(static_cast<std::size_t>(size));
  for (int i = 0; i < size; ++i) {
    pick[static_cast<std::size_t>(i)] = i;
  }
  while (true) {
    std::uint32_t mask = 0;
    for (int m : pick) {
      mask |= covers[static_cast<std::size_t>(m)];
    }
    if (mask == full) {
      return pick;
    }
    // advance to next combination
    int i = size - 1;
    while (i >= 0 && pick[static_cast<std::size_t>(i)] == k - size + i) {
      --i;
    }
    if (i < 0) {
      return {};
    }
    ++pick[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < size; ++j) {
      pick[static_cast<std::size_t>(j)] = pick[static_cast<std::size_t>(j - 1)] + 1;
    }
  }
}

}  // namespace

CoveringResult covering_number(const DistributionFamily& family, double eps,
                               const FunctionClass& f_class, CoverMode mode) {
  if (eps < 0.0) {
    throw std::invalid_argument("covering_number: eps must be >= 0");
  }
  const int k = family.size();
  if (k > 32) {
    throw GuardError("covering_number: families larger than 32 unsupported");
  }
  if (mode == CoverMode::exact && k > 20) {
    throw GuardError("covering_number: exact mode limited to families of <= 20");
  }
  const Matrix d = pairwise_distances(family, f_class);

  // covers[m] = bitmask of members within eps of member m
  std::vector<std::uint32_t> covers(static_cast<std::size_t>(k), 0);
  for (int m = 0; m < k; ++m) {
    for (int i = 0; i < k; ++i) {
      if (d(i, m) <= eps + kIneqTol) {
        covers[static_cast<std::size_t>(m)] |= (1u << i);
      }
    }
  }
  const std::uint32_t full =
      (k == 32) ? 0xffffffffu : ((1u << k) - 1u);

  std::vector<int> net_indices;
  bool exact = false;
  if (mode == CoverMode::exact) {
    for (int size = 1; size <= k; ++size) {
      net_indices = first_covering_subset(covers, k, size, full);
      if (!net_indices.empty()) {
        break;
      }
    }
    exact = true;
  } else {
    std::uint32_t uncovered = full;
    while (uncovered != 0) {
      int best = -1;
      int best_gain = -1;
      for (int m = 0; m < k; ++m) {
        const int gain =
            std::popcount(covers[static_cast<std::size_t>(m)] & uncovered);
        if (gain > best_gain) {
          best_gain = gain;
          best = m;
        }
      }
      net_indices.push_back(best);
      uncovered &= ~covers[static_cast<std::size_t>(best)];
    }
    std::sort(net_indices.begin(), net_indices.end());
  }

  EpsilonNet net{net_indices, eps, max_min_distance(d, net_indices)};
  return CoveringResult{static_cast<int>(net_indices.size()), std::move(net),
                        exact};
}

std::vector<EntropyRatePoint> entropy_rate_profile(
    const DistributionFamily& family, const FunctionClass& f_class,
    const std::vector<std::pair<int, double>>& eps_sequence, CoverMode mode) {
  for (std::size_t i = 1; i < eps_sequence.size(); ++i) {
    if (eps_sequence[i].first <= eps_sequence[i - 1].first) {
      throw std::invalid_argument("entropy_rate_profile: n must be increasing");
    }
    if (eps_sequence[i].second > eps_sequence[i - 1].second) {
      throw std::invalid_argument(
          "entropy_rate_profile: eps sequence must be nonincreasing");
    }
  }
  std::vector<EntropyRatePoint> out;
  out.reserve(eps_sequence.size());
  for (const auto& [n, eps] : eps_sequence) {
    if (n <= 0) {
      throw std::invalid_argument("entropy_rate_profile: n must be positive");
    }
    const CoveringResult cover = covering_number(family, eps, f_class, mode);
    const double entropy = std::log2(static_cast<double>(cover.count));
    out.push_back({n, eps, entropy, entropy / static_cast<double>(n)});
  }
  return out;
}

}  // namespace rcl
