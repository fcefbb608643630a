#include <doctest.h>

#include "rcl/losses.hpp"
#include "rcl/measures.hpp"
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

}  // namespace

TEST_CASE("expected loss of constants and perfect classifiers") {
  RandomStream stream(21, 0);
  const JointPmf p = random_pmf(2, 2, stream);
  const FunctionClass constant =
      FunctionClass::from({Matrix::Constant(2, 2, 2.5)}, 2.5);
  CHECK(expected_loss(0, constant, p) == doctest::Approx(2.5));

  // classifier g(x) = x is perfect on a diagonal support
  const JointPmf diag = pmf2x2(0.5, 0.0, 0.0, 0.5);
  const FunctionClass f =
      classification_class(ClassifierFamily::from(2, 2, {{0, 1}}));
  CHECK(expected_loss(0, f, diag) == 0.0);
}

TEST_CASE("expected loss sums off-diagonal mass for the identity classifier") {
  const JointPmf p = pmf2x2(0.4, 0.1, 0.2, 0.3);
  const FunctionClass f =
      classification_class(ClassifierFamily::from(2, 2, {{0, 1}}));
  // hand sum: P(0,1) + P(1,0) = 0.1 + 0.2
  double brute = 0.0;
  for (int x = 0; x < 2; ++x) {
    for (int y = 0; y < 2; ++y) {
      brute += p.probs(x, y) * f.values[0](x, y);
    }
  }
  CHECK(brute == doctest::Approx(0.3));
  CHECK(expected_loss(0, f, p) == doctest::Approx(0.3));
}

TEST_CASE("bayes loss over the complete classifier family") {
  const JointPmf p = pmf2x2(0.4, 0.1, 0.2, 0.3);
  const FunctionClass f = classification_class(all_classifiers(2, 2));
  const BayesResult bayes = bayes_loss(f, p);
  CHECK(bayes.l_star == doctest::Approx(0.3));  // 1 - (0.4 + 0.3)

  // closed form 1 - sum_x max_y P(x,y) against enumeration, random instances
  RandomStream stream(22, 0);
  for (int rep = 0; rep < 50; ++rep) {
    const JointPmf q = random_pmf(2, 2, stream);
    double closed = 1.0;
    for (int x = 0; x < 2; ++x) {
      closed -= q.probs.row(x).maxCoeff();
    }
    CHECK(bayes_loss(f, q).l_star == doctest::Approx(closed).epsilon(1e-12));
  }
}

TEST_CASE("bayes loss trivial classes") {
  RandomStream stream(23, 0);
  const JointPmf p = random_pmf(2, 2, stream);
  const FunctionClass single = random_class(2, 2, 1, 1.0, stream);
  const BayesResult res = bayes_loss(single, p);
  CHECK(res.f_star_index == 0);
  CHECK(res.l_star == doctest::Approx(expected_loss(0, single, p)));

  FunctionClass with_zero = random_class(2, 2, 3, 1.0, stream);
  with_zero.values.push_back(Matrix::Zero(2, 2));
  CHECK(bayes_loss(with_zero, p).l_star == 0.0);
}

TEST_CASE("bayes argmin certificate and tie-breaking") {
  RandomStream stream(24, 0);
  for (int rep = 0; rep < 20; ++rep) {
    const JointPmf p = random_pmf(2, 3, stream);
    const FunctionClass f = random_class(2, 3, 6, 1.5, stream);
    const BayesResult res = bayes_loss(f, p);
    for (int i = 0; i < f.size(); ++i) {
      CHECK(res.l_star <= expected_loss(i, f, p) + 1e-15);
    }
  }
  // two identical functions: lowest index wins
  const Matrix m = Matrix::Constant(2, 2, 0.5);
  const FunctionClass dup = FunctionClass::from({m, m}, 1.0);
  CHECK(bayes_loss(dup, pmf2x2(0.25, 0.25, 0.25, 0.25)).f_star_index == 0);
}

TEST_CASE("classification_class layouts") {
  const FunctionClass identity =
      classification_class(ClassifierFamily::from(2, 2, {{0, 1}}));
  Matrix expect(2, 2);
  expect << 0, 1, 1, 0;
  CHECK((identity.values[0] - expect).cwiseAbs().maxCoeff() == 0.0);

  CHECK(classification_class(all_classifiers(2, 2)).size() == 4);

  const FunctionClass const0 =
      classification_class(ClassifierFamily::from(2, 2, {{0, 0}}));
  for (int x = 0; x < 2; ++x) {
    CHECK(const0.values[0](x, 0) == 0.0);
    CHECK(const0.values[0](x, 1) == 1.0);
  }
  CHECK_THROWS_AS(classification_class(ClassifierFamily{2, 2, {}}),
                  std::invalid_argument);
}

TEST_CASE("regression_class squared losses") {
  // g identically y_values[0] on grid {0, 1}
  const FunctionClass f = regression_class({{0.0, 0.0}}, {0.0, 1.0});
  CHECK(f.values[0](0, 0) == 0.0);
  CHECK(f.values[0](0, 1) == 1.0);
  CHECK(f.values[0](1, 0) == 0.0);
  CHECK(f.values[0](1, 1) == 1.0);
  CHECK(f.bound_b == doctest::Approx(1.0));

  // interpolating estimator has zero loss on its graph
  const FunctionClass interp = regression_class({{0.0, 1.0}}, {0.0, 1.0});
  const JointPmf graph = pmf2x2(0.5, 0.0, 0.0, 0.5);
  CHECK(expected_loss(0, interp, graph) == 0.0);

  const FunctionClass mid = regression_class({{0.5, 0.5}}, {0.0, 1.0});
  CHECK((mid.values[0].array() == 0.25).all());
}

TEST_CASE("optimal loss is Lipschitz in the F-norm") {
  RandomStream stream(25, 0);
  for (int rep = 0; rep < 100; ++rep) {
    const FunctionClass f = random_class(2, 2, 5, 1.0, stream);
    const JointPmf p = random_pmf(2, 2, stream);
    const JointPmf q = random_pmf(2, 2, stream);
    const double gap = std::abs(bayes_loss(f, p).l_star -
                                bayes_loss(f, q).l_star);
    CHECK(gap <= f_norm_diff(p.probs, q.probs, f) + kIneqTol);
  }
}

TEST_CASE("expected loss is linear in the distribution") {
  RandomStream stream(26, 0);
  const FunctionClass f = random_class(2, 2, 3, 1.0, stream);
  for (int rep = 0; rep < 20; ++rep) {
    const JointPmf p = random_pmf(2, 2, stream);
    const JointPmf q = random_pmf(2, 2, stream);
    const double lambda = stream.next_u01();
    const JointPmf mix =
        JointPmf::from(lambda * p.probs + (1.0 - lambda) * q.probs);
    CHECK(expected_loss(1, f, mix) ==
          doctest::Approx(lambda * expected_loss(1, f, p) +
                          (1.0 - lambda) * expected_loss(1, f, q))
              .epsilon(1e-12));
  }
}
