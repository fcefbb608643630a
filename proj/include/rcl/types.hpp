#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace rcl {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using CountMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;

// Absolute tolerance used when validating probability normalization.
inline constexpr double kNormalizationTol = 1e-12;
// Absolute tolerance for the inequality assertions made by tests and checks.
inline constexpr double kIneqTol = 1e-9;

/// A probability mass function on the product alphabet
/// {0..x_size-1} x {0..y_size-1}. probs(x, y) is the mass of the pair (x, y).
/// Supervised setting only: y_size >= 2.
struct JointPmf {
  Matrix probs;

  int x_size() const { return static_cast<int>(probs.rows()); }
  int y_size() const { return static_cast<int>(probs.cols()); }

  Vector x_marginal() const { return probs.rowwise().sum(); }
  Vector y_marginal() const { return probs.colwise().sum().transpose(); }

  /// Validates and wraps a matrix of probabilities.
  static JointPmf from(Matrix m);
};

/// Exact integer occurrence counts of training pairs, normalized on demand.
struct EmpiricalMeasure {
  CountMatrix counts;
  std::int64_t n = 0;

  int x_size() const { return static_cast<int>(counts.rows()); }
  int y_size() const { return static_cast<int>(counts.cols()); }

  Matrix frequencies() const {
    return counts.cast<double>() / static_cast<double>(n);
  }
  JointPmf normalized() const { return JointPmf::from(frequencies()); }
};

/// A signed measure on the product alphabet, typically a difference P - Q.
struct SignedMeasure {
  Matrix values;

  int x_size() const { return static_cast<int>(values.rows()); }
  int y_size() const { return static_cast<int>(values.cols()); }

  static SignedMeasure difference(const JointPmf& p, const JointPmf& q);
};

/// A finite class of loss functions f: X x Y -> [0, B], stored as one value
/// matrix per function.
struct FunctionClass {
  std::vector<Matrix> values;
  double bound_b = 1.0;
  std::vector<std::string> labels;  // optional, parallel to values when present

  int size() const { return static_cast<int>(values.size()); }
  int x_size() const { return static_cast<int>(values.front().rows()); }
  int y_size() const { return static_cast<int>(values.front().cols()); }

  static FunctionClass from(std::vector<Matrix> values, double bound_b,
                            std::vector<std::string> labels = {});
};

/// A family of classifiers g: X -> Y, each stored as an array of y-indices.
struct ClassifierFamily {
  int x_size = 0;
  int y_size = 0;
  std::vector<std::vector<int>> maps;

  static ClassifierFamily from(int x_size, int y_size,
                               std::vector<std::vector<int>> maps);
};

/// The prior family of candidate distributions, listed extensionally.
struct DistributionFamily {
  std::vector<JointPmf> members;

  int size() const { return static_cast<int>(members.size()); }
  int x_size() const { return members.front().x_size(); }
  int y_size() const { return members.front().y_size(); }

  static DistributionFamily from(std::vector<JointPmf> members);

  /// Index of a member equal to p (max-abs difference <= tol), or -1.
  int index_of(const JointPmf& p, double tol = 1e-12) const;
};

/// A row-stochastic conditional distribution q(u | y).
struct Channel {
  Matrix rows;  // (in_size, out_size); each row sums to 1

  int in_size() const { return static_cast<int>(rows.rows()); }
  int out_size() const { return static_cast<int>(rows.cols()); }

  static Channel from(Matrix rows);
  static Channel identity(int size);
  /// All rows equal to r: the output is independent of the input.
  static Channel constant(const Vector& r);
};

}  // namespace rcl
