#include <doctest.h>

#include <cmath>
#include <vector>

#include "rcl/losses.hpp"
#include "rcl/errors.hpp"
#include "rcl/measures.hpp"
#include "rcl/montecarlo.hpp"
#include "test_support.hpp"

using namespace rcl;
using rcltest::dirac_pmf;
using rcltest::random_pmf;

namespace {

JointPmf pmf2x2(double a, double b, double c, double d) {
  Matrix m(2, 2);
  m << a, b, c, d;
  return JointPmf::from(m);
}

const FunctionClass kClassF = classification_class(all_classifiers(2, 2));

DistributionFamily mixed_family() {
  return DistributionFamily::from(
      {pmf2x2(0.40, 0.10, 0.10, 0.40), pmf2x2(0.10, 0.40, 0.40, 0.10),
       pmf2x2(0.30, 0.20, 0.20, 0.30), pmf2x2(0.20, 0.30, 0.30, 0.20)});
}

DistributionFamily eight_family() {
  return DistributionFamily::from(
      {pmf2x2(0.40, 0.10, 0.10, 0.40), pmf2x2(0.10, 0.40, 0.40, 0.10),
       pmf2x2(0.35, 0.15, 0.15, 0.35), pmf2x2(0.15, 0.35, 0.35, 0.15),
       pmf2x2(0.45, 0.05, 0.25, 0.25), pmf2x2(0.25, 0.25, 0.05, 0.45),
       pmf2x2(0.30, 0.20, 0.20, 0.30), pmf2x2(0.20, 0.30, 0.30, 0.20)});
}

}  // namespace

TEST_CASE("sampling determinism and point masses") {
  const JointPmf point = dirac_pmf(2, 2, 1, 0);
  RandomStream s1(99, 5);
  for (const auto& [x, y] : sample_training(point, 50, s1)) {
    CHECK(x == 1);
    CHECK(y == 0);
  }

  RandomStream a(123, 7);
  RandomStream b(123, 7);
  CHECK(sample_training(point, 20, a) == sample_training(point, 20, b));

  RandomStream c(123, 7);
  RandomStream d(123, 8);
  const JointPmf p = pmf2x2(0.3, 0.3, 0.2, 0.2);
  CHECK(sample_training(p, 100, c) != sample_training(p, 100, d));
}

TEST_CASE("a million uniform draws land near the uniform frequencies") {
  const JointPmf uniform = pmf2x2(0.25, 0.25, 0.25, 0.25);
  RandomStream stream(2024, 0);
  const auto sample = sample_training(uniform, 1000000, stream);
  const Matrix freq = empirical(sample, 2, 2).frequencies();
  for (int x = 0; x < 2; ++x) {
    for (int y = 0; y < 2; ++y) {
      CHECK(std::abs(freq(x, y) - 0.25) <= 0.002);  // ~4.6 binomial sigma
    }
  }
}

TEST_CASE("uniform-convergence decay") {
  // point mass: empirical equals the truth at every n
  const auto zero = gc_decay(dirac_pmf(2, 2, 0, 1), kClassF, {10, 50}, 40, 7);
  for (const auto& point : zero) {
    CHECK(point.mean_fnorm == 0.0);
  }

  const JointPmf p = pmf2x2(0.4, 0.1, 0.2, 0.3);
  const std::vector<int> n_grid = {50, 200, 1000};
  const auto curve = gc_decay(p, kClassF, n_grid, 300, 11);
  for (std::size_t i = 0; i < curve.size(); ++i) {
    // analytic envelope: B sqrt(|Z| / n)
    CHECK(curve[i].mean_fnorm <=
          kClassF.bound_b * std::sqrt(4.0 / curve[i].n));
    if (i > 0) {
      CHECK(curve[i].mean_fnorm <= curve[i - 1].mean_fnorm +
                                       2.0 * (curve[i].std_err +
                                              curve[i - 1].std_err));
    }
  }
}

TEST_CASE("experiment on a singleton family learns the best response") {
  ExperimentConfig config;
  config.family = DistributionFamily::from({pmf2x2(0.4, 0.1, 0.2, 0.3)});
  config.f_class = kClassF;
  config.scheme = SchemeType::type1;
  config.n_grid = {20, 80};
  config.trials = 50;
  config.seed = 31;
  for (const CurvePoint& point : run_experiment(config)) {
    CHECK(point.mean_excess == 0.0);
    CHECK(point.violations == 0);
  }
}

TEST_CASE("experiments are bit-identical across thread counts") {
  ExperimentConfig config;
  config.family = mixed_family();
  config.f_class = kClassF;
  config.scheme = SchemeType::type1;
  config.n_grid = {30, 120};
  config.trials = 64;
  config.seed = 417;
  config.pac_epsilon = 0.1;

  config.threads = 1;
  const auto serial = run_experiment(config);
  config.threads = 4;
  const auto parallel = run_experiment(config);
  REQUIRE(serial.size() == parallel.size());
  for (std::size_t i = 0; i < serial.size(); ++i) {
    CHECK(serial[i].n == parallel[i].n);
    CHECK(serial[i].true_p_index == parallel[i].true_p_index);
    CHECK(serial[i].mean_excess == parallel[i].mean_excess);
    CHECK(serial[i].std_err == parallel[i].std_err);
    CHECK(serial[i].mean_bound == parallel[i].mean_bound);
    CHECK(serial[i].exceedance_prob == parallel[i].exceedance_prob);
    CHECK(serial[i].violations == parallel[i].violations);
  }
}

TEST_CASE("excess-loss curve improves with the sample size") {
  ExperimentConfig config;
  config.family = mixed_family();
  config.f_class = kClassF;
  config.scheme = SchemeType::type1;
  config.n_grid = {30, 2000};
  config.trials = 250;
  config.seed = 91;
  const auto points = run_experiment(config);
  // worst-case rows are the last entry per n block
  const CurvePoint& small_n = points[config.family.size()];
  const CurvePoint& large_n = points.back();
  REQUIRE(small_n.true_p_index == -1);
  REQUIRE(large_n.true_p_index == -1);
  CHECK(large_n.mean_excess <=
        small_n.mean_excess + 2.0 * (small_n.std_err + large_n.std_err));
  for (const CurvePoint& point : points) {
    CHECK(point.violations == 0);
  }
}

TEST_CASE("mean excess stays below the mean bound at scale") {
  ExperimentConfig config;
  config.family = eight_family();
  config.f_class = kClassF;
  config.scheme = SchemeType::type1;
  config.n_grid = {500};
  config.trials = 1000;
  config.seed = 733;
  config.threads = 4;
  for (const CurvePoint& point : run_experiment(config)) {
    CHECK(point.mean_excess <= point.mean_bound + kIneqTol);
    CHECK(point.violations == 0);
  }
}

TEST_CASE("type2 worst-case excess is controlled by the distortion value") {
  ExperimentConfig config;
  config.family = DistributionFamily::from(
      {pmf2x2(0.40, 0.10, 0.10, 0.40), pmf2x2(0.10, 0.40, 0.40, 0.10)});
  config.f_class = kClassF;
  config.scheme = SchemeType::type2;
  config.rate = 1.0 / 3.0;
  config.n_grid = {3};
  config.trials = 400;
  config.seed = 57;
  const auto points = run_experiment(config);
  const DhatResult dhat =
      optimal_quantizer(3, config.rate, config.family, config.f_class);
  const CurvePoint& worst = points.back();
  REQUIRE(worst.true_p_index == -1);
  CHECK(worst.mean_excess <= 4.0 * dhat.value + 2.0 * worst.std_err);
  CHECK(worst.violations == 0);
}

TEST_CASE("guard violations surface the offending n") {
  ExperimentConfig config;
  config.family = DistributionFamily::from({pmf2x2(0.4, 0.1, 0.2, 0.3)});
  config.f_class = kClassF;
  config.scheme = SchemeType::type2;
  config.rate = 1.0;
  config.n_grid = {1, 8};
  config.trials = 5;
  config.seed = 3;
  CHECK_THROWS_WITH_AS(run_experiment(config),
                       doctest::Contains("n=8"), GuardError);
}

TEST_CASE("pac exceedance trivia") {
  ExperimentConfig config;
  config.family = mixed_family();
  config.f_class = kClassF;
  config.scheme = SchemeType::type1;
  config.n_grid = {30, 1500};
  config.trials = 200;
  config.seed = 5;

  // threshold above the loss bound: nothing can exceed it
  config.pac_epsilon = kClassF.bound_b + 0.5;
  for (const auto& [n, prob] : pac_exceedance(config)) {
    CHECK(prob == 0.0);
  }

  // exceedance decays with n
  config.pac_epsilon = 0.1;
  const auto decays = pac_exceedance(config);
  REQUIRE(decays.size() == 2);
  CHECK(decays.back().second <= decays.front().second + 1e-12);

  // singleton family never exceeds
  config.family = DistributionFamily::from({pmf2x2(0.4, 0.1, 0.2, 0.3)});
  for (const auto& [n, prob] : pac_exceedance(config)) {
    CHECK(prob == 0.0);
  }
}

TEST_CASE("experiment config validation") {
  ExperimentConfig config;
  config.family = DistributionFamily::from({pmf2x2(0.4, 0.1, 0.2, 0.3)});
  config.f_class = kClassF;
  config.n_grid = {10, 10};
  config.trials = 5;
  CHECK_THROWS_AS(run_experiment(config), std::invalid_argument);
  config.n_grid = {10, 20};
  config.trials = 0;
  CHECK_THROWS_AS(run_experiment(config), std::invalid_argument);
  config.trials = 5;
  config.pac_epsilon = -0.5;
  CHECK_THROWS_AS(run_experiment(config), std::invalid_argument);
}
