#include "rcl/losses.hpp"

#include <cmath>
#include <stdexcept>

#include "rcl/errors.hpp"

namespace rcl {

double expected_loss(int f_index, const FunctionClass& f_class,
                     const JointPmf& p) {
  if (f_index < 0 || f_index >= f_class.size()) {
    throw std::invalid_argument("expected_loss: function index out of range");
  }
  if (p.x_size() != f_class.x_size() || p.y_size() != f_class.y_size()) {
    throw std::invalid_argument("expected_loss: dimension mismatch");
  }
  return p.probs
      .cwiseProduct(f_class.values[static_cast<std::size_t>(f_index)])
      .sum();
}

BayesResult bayes_loss(const FunctionClass& f_class, const JointPmf& p) {
  if (p.x_size() != f_class.x_size() || p.y_size() != f_class.y_size()) {
    throw std::invalid_argument("bayes_loss: dimension mismatch");
  }
  BayesResult best{0, expected_loss(0, f_class, p)};
  for (int f = 1; f < f_class.size(); ++f) {
    const double loss = expected_loss(f, f_class, p);
    if (loss < best.l_star) {
      best = {f, loss};
    }
  }
  return best;
}

FunctionClass classification_class(const ClassifierFamily& family) {
  if (family.maps.empty()) {
    throw std::invalid_argument("classification_class: empty classifier family");
  }
  std::vector<Matrix> values;
  values.reserve(family.maps.size());
  for (const auto& g : family.maps) {
    Matrix f = Matrix::Ones(family.x_size, family.y_size);
    for (int x = 0; x < family.x_size; ++x) {
      f(x, g[static_cast<std::size_t>(x)]) = 0.0;
    }
    values.push_back(std::move(f));
  }
  return FunctionClass::from(std::move(values), 1.0);
}

FunctionClass regression_class(const std::vector<std::vector<double>>& g_list,
                               const std::vector<double>& y_values) {
  if (g_list.empty()) {
    throw std::invalid_argument("regression_class: empty estimator family");
  }
  if (y_values.size() < 2) {
    throw std::invalid_argument("regression_class: need at least two y values");
  }
  const int x_size = static_cast<int>(g_list.front().size());
  const int y_size = static_cast<int>(y_values.size());
  std::vector<Matrix> values;
  values.reserve(g_list.size());
  double bound = 0.0;
  for (const auto& g : g_list) {
    if (static_cast<int>(g.size()) != x_size) {
      throw std::invalid_argument("regression_class: estimator length mismatch");
    }
    Matrix f(x_size, y_size);
    for (int x = 0; x < x_size; ++x) {
      for (int y = 0; y < y_size; ++y) {
        const double d = g[static_cast<std::size_t>(x)] -
                         y_values[static_cast<std::size_t>(y)];
        f(x, y) = d * d;
      }
    }
    bound = std::max(bound, f.maxCoeff());
    values.push_back(std::move(f));
  }
  // All-zero loss class still needs a positive bound for the 2B-type bounds.
  if (bound == 0.0) {
    bound = 1.0;
  }
  return FunctionClass::from(std::move(values), bound);
}

ClassifierFamily all_classifiers(int x_size, int y_size) {
  if (x_size < 1 || y_size < 2) {
    throw std::invalid_argument("all_classifiers: invalid alphabet");
  }
  double total = std::pow(static_cast<double>(y_size), x_size);
  if (total > 4096.0) {
    throw GuardError("all_classifiers: |Y|^|X| exceeds 4096");
  }
  const int count = static_cast<int>(total);
  std::vector<std::vector<int>> maps;
  maps.reserve(static_cast<std::size_t>(count));
  for (int r = 0; r < count; ++r) {
    std::vector<int> g(static_cast<std::size_t>(x_size));
    int rem = r;
    for (int x = x_size - 1; x >= 0; --x) {
      g[static_cast<std::size_t>(x)] = rem % y_size;
      rem /= y_size;
    }
    maps.push_back(std::move(g));
  }
  return ClassifierFamily::from(x_size, y_size, std::move(maps));
}

FunctionClass all_binary_losses(int x_size, int y_size) {
  const int cells = x_size * y_size;
  if (cells > 16) {
    throw GuardError("all_binary_losses: 2^(|X||Y|) exceeds 65536");
  }
  const int count = 1 << cells;
  std::vector<Matrix> values;
  values.reserve(static_cast<std::size_t>(count));
  for (int mask = 0; mask < count; ++mask) {
    Matrix f = Matrix::Zero(x_size, y_size);
    for (int x = 0; x < x_size; ++x) {
      for (int y = 0; y < y_size; ++y) {
        if (mask & (1 << (x * y_size + y))) {
          f(x, y) = 1.0;
        }
      }
    }
    values.push_back(std::move(f));
  }
  return FunctionClass::from(std::move(values), 1.0);
}

}  // namespace rcl
