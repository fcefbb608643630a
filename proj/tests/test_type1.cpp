#include <doctest.h>

#include <vector>

#include "rcl/losses.hpp"
#include "rcl/measures.hpp"
#include "rcl/sampling.hpp"
#include "rcl/type1.hpp"
#include "test_support.hpp"

using namespace rcl;
using rcltest::random_class;
using rcltest::random_pmf;

namespace {

JointPmf pmf2x2(double a, double b, double c, double d) {
  Matrix m(2, 2);
  m << a, b, c, d;
  return JointPmf::from(m);
}

DistributionFamily two_deltaish() {
  // near-point masses at (0,0) and (1,1)
  return DistributionFamily::from({pmf2x2(0.94, 0.02, 0.02, 0.02),
                                   pmf2x2(0.02, 0.02, 0.02, 0.94)});
}

}  // namespace

TEST_CASE("encoder with a one-member net") {
  RandomStream stream(41, 0);
  const DistributionFamily family =
      DistributionFamily::from({random_pmf(2, 2, stream)});
  const FunctionClass f = classification_class(all_classifiers(2, 2));
  const Type1Scheme scheme = Type1Scheme::build(family, f, 0.5);
  REQUIRE(scheme.net.member_indices.size() == 1);
  const std::vector<std::pair<int, int>> sample = {{0, 0}, {1, 1}, {0, 1}};
  CHECK(encode_type1(sample, scheme) == 0);
}

TEST_CASE("encoder reaches zero distance on an exactly representable sample") {
  const DistributionFamily family = DistributionFamily::from(
      {pmf2x2(0.5, 0.25, 0.25, 0.0), pmf2x2(0.0, 0.25, 0.25, 0.5)});
  const FunctionClass f = classification_class(all_classifiers(2, 2));
  const Type1Scheme scheme = Type1Scheme::build(family, f, 0.0);
  // empirical measure equal to member 0
  const std::vector<std::pair<int, int>> sample = {
      {0, 0}, {0, 0}, {0, 1}, {1, 0}};
  const int j = encode_type1(sample, scheme);
  const EmpiricalMeasure emp = empirical(sample, 2, 2);
  CHECK(f_norm_diff(emp.frequencies(), scheme.net_member(j).probs, f) ==
        doctest::Approx(0.0));
}

TEST_CASE("encoder picks the nearby point mass") {
  const DistributionFamily family = two_deltaish();
  const FunctionClass f = classification_class(all_classifiers(2, 2));
  const Type1Scheme scheme = Type1Scheme::build(family, f, 0.0);
  const std::vector<std::pair<int, int>> sample(10, {0, 0});
  const EmpiricalMeasure emp = empirical(sample, 2, 2);
  // distances computed explicitly: member 0 must be strictly closer
  const double d0 =
      f_norm_diff(emp.frequencies(), family.members[0].probs, f);
  const double d1 =
      f_norm_diff(emp.frequencies(), family.members[1].probs, f);
  CHECK(d0 < d1);
  CHECK(encode_type1(emp, scheme) == 0);
}

TEST_CASE("encoder optimality certificate") {
  RandomStream stream(42, 0);
  std::vector<JointPmf> members;
  for (int i = 0; i < 6; ++i) {
    members.push_back(random_pmf(2, 2, stream));
  }
  const DistributionFamily family = DistributionFamily::from(members);
  const FunctionClass f = classification_class(all_classifiers(2, 2));
  const Type1Scheme scheme =
      Type1Scheme::build(family, f, epsilon_schedule(1.0, 100));
  for (int rep = 0; rep < 20; ++rep) {
    const JointPmf& true_p =
        family.members[stream.next_below(family.size())];
    RandomStream trial_stream(43, substream(rep));
    const auto sample = sample_training(true_p, 60, trial_stream);
    const EmpiricalMeasure emp = empirical(sample, 2, 2);
    const int j = encode_type1(emp, scheme);
    const double chosen =
        f_norm_diff(emp.frequencies(), scheme.net_member(j).probs, f);
    for (std::size_t m = 0; m < scheme.net.member_indices.size(); ++m) {
      CHECK(chosen <= f_norm_diff(emp.frequencies(),
                                  scheme.net_member(static_cast<int>(m)).probs,
                                  f) +
                          1e-15);
    }
  }
}

TEST_CASE("learner basics") {
  RandomStream stream(44, 0);
  const DistributionFamily family =
      DistributionFamily::from({random_pmf(2, 2, stream)});

  // singleton function class: always function 0
  const FunctionClass single = random_class(2, 2, 1, 1.0, stream);
  const Type1Scheme s1 = Type1Scheme::build(family, single, 0.1);
  CHECK(learn_type1(0, s1) == 0);

  // identical net members produce the same learned function
  const JointPmf p = random_pmf(2, 2, stream);
  const DistributionFamily twins = DistributionFamily::from({p, p});
  const FunctionClass f = classification_class(all_classifiers(2, 2));
  const Type1Scheme s2 = Type1Scheme::build(twins, f, 0.0);
  for (std::size_t j = 1; j < s2.net.member_indices.size(); ++j) {
    CHECK(learn_type1(static_cast<int>(j), s2) == learn_type1(0, s2));
  }
  CHECK_THROWS_AS(learn_type1(99, s2), std::invalid_argument);
}

TEST_CASE("learner plays the pointwise MAP classifier") {
  // product member: X uniform, Y = 1 more likely given either x
  const JointPmf member = pmf2x2(0.15, 0.35, 0.15, 0.35);
  const DistributionFamily family = DistributionFamily::from({member});
  const FunctionClass f = classification_class(all_classifiers(2, 2));
  const Type1Scheme scheme = Type1Scheme::build(family, f, 0.0);
  const int learned = learn_type1(0, scheme);
  // MAP by hand: argmax_y P(x, y) = 1 for both x; compare achieved losses
  double map_loss = 0.0;
  for (int x = 0; x < 2; ++x) {
    map_loss += member.probs.row(x).sum() - member.probs.row(x).maxCoeff();
  }
  CHECK(expected_loss(learned, f, member) == doctest::Approx(map_loss));
}

TEST_CASE("per-realization chain holds on every trial") {
  RandomStream stream(45, 0);
  std::vector<JointPmf> members;
  for (int i = 0; i < 5; ++i) {
    members.push_back(random_pmf(2, 2, stream));
  }
  const DistributionFamily family = DistributionFamily::from(members);
  const FunctionClass f = classification_class(all_classifiers(2, 2));

  for (int n : {20, 100}) {
    const Type1Scheme scheme =
        Type1Scheme::build(family, f, epsilon_schedule(1.0, n));
    double total_excess = 0.0;
    double total_bound = 0.0;
    for (int t = 0; t < 200; ++t) {
      const int mi = t % family.size();
      RandomStream trial_stream(46, substream(n, mi, t));
      const JointPmf& true_p =
          family.members[static_cast<std::size_t>(mi)];
      const auto sample = sample_training(true_p, n, trial_stream);
      const TrialRecord rec = type1_trial(sample, scheme, true_p);
      CHECK(rec.within_bound);
      CHECK(!rec.misspecified);
      CHECK(rec.excess >= -kIneqTol);
      // learner optimality certificate under the decoded member
      const JointPmf& decoded = scheme.net_member(rec.encoded_index);
      for (int fi = 0; fi < f.size(); ++fi) {
        CHECK(expected_loss(rec.learned_f, f, decoded) <=
              expected_loss(fi, f, decoded) + 1e-15);
      }
      total_excess += rec.excess;
      total_bound += rec.bound;
    }
    CHECK(total_excess <= total_bound + kIneqTol);
  }
}

TEST_CASE("trial against a singleton scheme has zero excess") {
  RandomStream stream(47, 0);
  const JointPmf p = random_pmf(2, 2, stream);
  const DistributionFamily family = DistributionFamily::from({p});
  const FunctionClass f = classification_class(all_classifiers(2, 2));
  const Type1Scheme scheme = Type1Scheme::build(family, f, 0.2);
  RandomStream trial_stream(48, 0);
  const auto sample = sample_training(p, 30, trial_stream);
  const TrialRecord rec = type1_trial(sample, scheme, p);
  CHECK(rec.excess == doctest::Approx(0.0));
  CHECK(rec.within_bound);
}

TEST_CASE("misspecified truth is flagged, not rejected") {
  RandomStream stream(49, 0);
  const DistributionFamily family =
      DistributionFamily::from({random_pmf(2, 2, stream)});
  const FunctionClass f = classification_class(all_classifiers(2, 2));
  const Type1Scheme scheme = Type1Scheme::build(family, f, 0.1);
  const JointPmf outsider = random_pmf(2, 2, stream);
  RandomStream trial_stream(50, 0);
  const auto sample = sample_training(outsider, 25, trial_stream);
  const TrialRecord rec = type1_trial(sample, scheme, outsider);
  CHECK(rec.misspecified);
}

TEST_CASE("scheme rate") {
  RandomStream stream(51, 0);
  const DistributionFamily family =
      DistributionFamily::from({random_pmf(2, 2, stream)});
  const FunctionClass f = classification_class(all_classifiers(2, 2));
  const Type1Scheme one = Type1Scheme::build(family, f, 0.0);
  CHECK(rate_of_scheme(one, 10) == 0.0);

  // four well-separated members at eps = 0 keep all four net points
  const DistributionFamily four = DistributionFamily::from(
      {pmf2x2(0.7, 0.1, 0.1, 0.1), pmf2x2(0.1, 0.7, 0.1, 0.1),
       pmf2x2(0.1, 0.1, 0.7, 0.1), pmf2x2(0.1, 0.1, 0.1, 0.7)});
  const Type1Scheme s4 = Type1Scheme::build(four, f, 0.0);
  REQUIRE(s4.net.member_indices.size() == 4);
  CHECK(rate_of_scheme(s4, 2) == doctest::Approx(1.0));
  // rate vanishes as n grows at fixed net size
  CHECK(rate_of_scheme(s4, 4000) < 1e-3);
}
