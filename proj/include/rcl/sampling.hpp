#pragma once

#include <utility>
#include <vector>

#include "rcl/rng.hpp"
#include "rcl/types.hpp"

namespace rcl {

/// Inverse-CDF sampler over the flattened (row-major) pmf.
class PmfSampler {
 public:
  explicit PmfSampler(const JointPmf& p) : y_size_(p.y_size()) {
    cum_.reserve(static_cast<std::size_t>(p.x_size()) * p.y_size());
    double acc = 0.0;
    for (int x = 0; x < p.x_size(); ++x) {
      for (int y = 0; y < p.y_size(); ++y) {
        acc += p.probs(x, y);
        cum_.push_back(acc);
      }
    }
    cum_.back() = 1.0;  // guard the top against rounding
  }

  std::pair<int, int> draw(RandomStream& stream) const {
    const double u = stream.next_u01();
    std::size_t lo = 0;
    std::size_t hi = cum_.size() - 1;
    while (lo < hi) {
      const std::size_t mid = (lo + hi) / 2;
      if (u < cum_[mid]) {
        hi = mid;
      } else {
        lo = mid + 1;
      }
    }
    return {static_cast<int>(lo) / y_size_, static_cast<int>(lo) % y_size_};
  }

 private:
  std::vector<double> cum_;
  int y_size_;
};

/// n i.i.d. draws from p; deterministic given the stream.
inline std::vector<std::pair<int, int>> sample_training(const JointPmf& p,
                                                        int n,
                                                        RandomStream& stream) {
  const PmfSampler sampler(p);
  std::vector<std::pair<int, int>> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    out.push_back(sampler.draw(stream));
  }
  return out;
}

}  // namespace rcl
