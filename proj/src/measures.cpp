#include "rcl/measures.hpp"

#include <cmath>
#include <stdexcept>

#include "rcl/errors.hpp"

namespace rcl {

JointPmf JointPmf::from(Matrix m) {
  if (m.rows() < 1 || m.cols() < 2) {
    throw std::invalid_argument(
        "JointPmf: need x_size >= 1 and y_size >= 2 (supervised setting)");
  }
  if ((m.array() < 0.0).any()) {
    throw std::invalid_argument("JointPmf: negative probability entry");
  }
  if (std::abs(m.sum() - 1.0) > kNormalizationTol) {
    throw std::invalid_argument("JointPmf: entries do not sum to 1");
  }
  return JointPmf{std::move(m)};
}

SignedMeasure SignedMeasure::difference(const JointPmf& p, const JointPmf& q) {
  if (p.probs.rows() != q.probs.rows() || p.probs.cols() != q.probs.cols()) {
    throw std::invalid_argument("SignedMeasure: dimension mismatch");
  }
  return SignedMeasure{p.probs - q.probs};
}

FunctionClass FunctionClass::from(std::vector<Matrix> values, double bound_b,
                                  std::vector<std::string> labels) {
  if (values.empty()) {
    throw std::invalid_argument("FunctionClass: at least one function required");
  }
  if (bound_b <= 0.0) {
    throw std::invalid_argument("FunctionClass: bound B must be positive");
  }
  const auto rows = values.front().rows();
  const auto cols = values.front().cols();
  for (const Matrix& v : values) {
    if (v.rows() != rows || v.cols() != cols) {
      throw std::invalid_argument("FunctionClass: inconsistent dimensions");
    }
    if ((v.array() < 0.0).any() || (v.array() > bound_b).any()) {
      throw std::invalid_argument("FunctionClass: values outside [0, B]");
    }
  }
  if (!labels.empty() && labels.size() != values.size()) {
    throw std::invalid_argument("FunctionClass: labels do not match functions");
  }
  return FunctionClass{std::move(values), bound_b, std::move(labels)};
}

ClassifierFamily ClassifierFamily::from(int x_size, int y_size,
                                        std::vector<std::vector<int>> maps) {
  if (maps.empty()) {
    throw std::invalid_argument("ClassifierFamily: empty family");
  }
  for (const auto& g : maps) {
    if (static_cast<int>(g.size()) != x_size) {
      throw std::invalid_argument("ClassifierFamily: map length != x_size");
    }
    for (int y : g) {
      if (y < 0 || y >= y_size) {
        throw std::invalid_argument("ClassifierFamily: label out of range");
      }
    }
  }
  return ClassifierFamily{x_size, y_size, std::move(maps)};
}

DistributionFamily DistributionFamily::from(std::vector<JointPmf> members) {
  if (members.empty()) {
    throw std::invalid_argument("DistributionFamily: empty family");
  }
  const int xs = members.front().x_size();
  const int ys = members.front().y_size();
  for (const JointPmf& p : members) {
    if (p.x_size() != xs || p.y_size() != ys) {
      throw std::invalid_argument("DistributionFamily: mixed dimensions");
    }
  }
  return DistributionFamily{std::move(members)};
}

int DistributionFamily::index_of(const JointPmf& p, double tol) const {
  for (int i = 0; i < size(); ++i) {
    const JointPmf& m = members[static_cast<std::size_t>(i)];
    if (m.x_size() == p.x_size() && m.y_size() == p.y_size() &&
        (m.probs - p.probs).cwiseAbs().maxCoeff() <= tol) {
      return i;
    }
  }
  return -1;
}

Channel Channel::from(Matrix rows) {
  if (rows.rows() < 1 || rows.cols() < 1) {
    throw std::invalid_argument("Channel: empty matrix");
  }
  if ((rows.array() < 0.0).any()) {
    throw std::invalid_argument("Channel: negative entry");
  }
  for (Eigen::Index y = 0; y < rows.rows(); ++y) {
    if (std::abs(rows.row(y).sum() - 1.0) > kNormalizationTol) {
      throw std::invalid_argument("Channel: row does not sum to 1");
    }
  }
  return Channel{std::move(rows)};
}

Channel Channel::identity(int size) {
  return Channel{Matrix::Identity(size, size)};
}

Channel Channel::constant(const Vector& r) {
  Matrix rows(r.size(), r.size());
  rows.rowwise() = r.transpose();
  return Channel::from(std::move(rows));
}

EmpiricalMeasure empirical(std::span<const std::pair<int, int>> sample,
                           int x_size, int y_size) {
  if (sample.empty()) {
    throw std::invalid_argument("empty sample");
  }
  CountMatrix counts = CountMatrix::Zero(x_size, y_size);
  for (const auto& [x, y] : sample) {
    if (x < 0 || x >= x_size || y < 0 || y >= y_size) {
      throw std::invalid_argument("sample index out of range");
    }
    counts(x, y) += 1;
  }
  return EmpiricalMeasure{std::move(counts),
                          static_cast<std::int64_t>(sample.size())};
}

double f_norm(const SignedMeasure& mu, const FunctionClass& f_class) {
  if (mu.x_size() != f_class.x_size() || mu.y_size() != f_class.y_size()) {
    throw std::invalid_argument("f_norm: dimension mismatch");
  }
  double best = 0.0;
  for (const Matrix& f : f_class.values) {
    best = std::max(best, std::abs(mu.values.cwiseProduct(f).sum()));
  }
  return best;
}

double f_norm_diff(const Matrix& a, const Matrix& b,
                   const FunctionClass& f_class) {
  if (a.rows() != b.rows() || a.cols() != b.cols() ||
      a.rows() != f_class.x_size() || a.cols() != f_class.y_size()) {
    throw std::invalid_argument("f_norm_diff: dimension mismatch");
  }
  double best = 0.0;
  for (const Matrix& f : f_class.values) {
    best = std::max(best, std::abs(((a - b).cwiseProduct(f)).sum()));
  }
  return best;
}

double variational_distance(const JointPmf& p, const JointPmf& q) {
  if (p.x_size() != q.x_size() || p.y_size() != q.y_size()) {
    throw std::invalid_argument("variational_distance: dimension mismatch");
  }
  return (p.probs - q.probs).cwiseAbs().sum();
}

}  // namespace rcl
