#include "rcl/type1.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "rcl/losses.hpp"
#include "rcl/measures.hpp"

namespace rcl {

Type1Scheme Type1Scheme::build(DistributionFamily family,
                               FunctionClass f_class, double epsilon_n,
                               CoverMode mode) {
  if (epsilon_n < 0.0) {
    throw std::invalid_argument("Type1Scheme: epsilon_n must be >= 0");
  }
  CoveringResult cover = covering_number(family, epsilon_n, f_class, mode);
  Type1Scheme scheme{std::move(family), std::move(f_class),
                     std::move(cover.net), epsilon_n, {}};
  scheme.bayes_f_of_net.reserve(scheme.net.member_indices.size());
  for (std::size_t j = 0; j < scheme.net.member_indices.size(); ++j) {
    scheme.bayes_f_of_net.push_back(
        bayes_loss(scheme.f_class, scheme.net_member(static_cast<int>(j)))
            .f_star_index);
  }
  return scheme;
}

int encode_type1(const EmpiricalMeasure& emp, const Type1Scheme& scheme) {
  if (emp.x_size() != scheme.family.x_size() ||
      emp.y_size() != scheme.family.y_size()) {
    throw std::invalid_argument("encode_type1: dimension mismatch");
  }
  const Matrix freq = emp.frequencies();
  int best = 0;
  double best_dist = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < scheme.net.member_indices.size(); ++j) {
    const double dist = f_norm_diff(
        freq, scheme.net_member(static_cast<int>(j)).probs, scheme.f_class);
    if (dist < best_dist) {
      best_dist = dist;
      best = static_cast<int>(j);
    }
  }
  return best;
}

int encode_type1(std::span<const std::pair<int, int>> sample,
                 const Type1Scheme& scheme) {
  return encode_type1(
      empirical(sample, scheme.family.x_size(), scheme.family.y_size()),
      scheme);
}

int learn_type1(int j, const Type1Scheme& scheme) {
  if (j < 0 || j >= static_cast<int>(scheme.net.member_indices.size())) {
    throw std::invalid_argument("learn_type1: net index out of range");
  }
  return scheme.bayes_f_of_net[static_cast<std::size_t>(j)];
}

TrialRecord type1_trial(std::span<const std::pair<int, int>> sample,
                        const Type1Scheme& scheme, const JointPmf& true_p) {
  const EmpiricalMeasure emp =
      empirical(sample, scheme.family.x_size(), scheme.family.y_size());
  TrialRecord rec;
  rec.misspecified = scheme.family.index_of(true_p) < 0;
  rec.encoded_index = encode_type1(emp, scheme);
  rec.learned_f = learn_type1(rec.encoded_index, scheme);
  rec.loss = expected_loss(rec.learned_f, scheme.f_class, true_p);
  const double l_star = bayes_loss(scheme.f_class, true_p).l_star;
  rec.excess = rec.loss - l_star;
  rec.bound = 4.0 * f_norm_diff(true_p.probs, emp.frequencies(),
                                scheme.f_class) +
              2.0 * scheme.epsilon_n;
  rec.within_bound = rec.loss <= l_star + rec.bound + kIneqTol;
  return rec;
}

double rate_of_scheme(const Type1Scheme& scheme, int n) {
  if (n <= 0) {
    throw std::invalid_argument("rate_of_scheme: n must be positive");
  }
  return std::log2(static_cast<double>(scheme.net.member_indices.size())) /
         static_cast<double>(n);
}

double epsilon_schedule(double c, int n) {
  return c / std::log2(static_cast<double>(n) + 2.0);
}

}  // namespace rcl
