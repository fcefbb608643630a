#pragma once

#include <vector>

#include "rcl/types.hpp"

namespace rcl {

/// Expected loss L(f, P) = sum_{x,y} P(x,y) f(x,y).
double expected_loss(int f_index, const FunctionClass& f_class,
                     const JointPmf& p);

struct BayesResult {
  int f_star_index = 0;
  double l_star = 0.0;
};

/// Minimizing function index (lowest index on ties) and the minimum expected
/// loss; exact since the class is finite.
BayesResult bayes_loss(const FunctionClass& f_class, const JointPmf& p);

/// 0-1 losses of a classifier family: f_g(x, y) = 1 if g(x) != y else 0, B = 1.
FunctionClass classification_class(const ClassifierFamily& family);

/// Squared losses f_g(x, y) = (g(x) - y_values[y])^2 for real-valued estimator
/// arrays g; B is the attained maximum entry (1 when all losses are zero).
FunctionClass regression_class(const std::vector<std::vector<double>>& g_list,
                               const std::vector<double>& y_values);

/// Every map X -> Y, enumerated with position x=0 most significant; the
/// complete classifier family on a finite alphabet (|Y|^|X| maps, guarded).
ClassifierFamily all_classifiers(int x_size, int y_size);

/// Every {0,1}-valued loss function on X x Y (2^(|X||Y|) functions, guarded);
/// functions ordered by the bitmask over cells, cell (x,y) at bit x*y_size+y.
FunctionClass all_binary_losses(int x_size, int y_size);

}  // namespace rcl
