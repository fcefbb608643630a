#pragma once

#include <span>
#include <utility>

#include "rcl/types.hpp"

namespace rcl {

/// Occurrence counts of a nonempty sample of (x, y) index pairs.
EmpiricalMeasure empirical(std::span<const std::pair<int, int>> sample,
                           int x_size, int y_size);

/// sup over f in F of |mu(f)|; exact since F is finite.
double f_norm(const SignedMeasure& mu, const FunctionClass& f_class);

/// f_norm of the difference a - b without materializing a SignedMeasure.
double f_norm_diff(const Matrix& a, const Matrix& b,
                   const FunctionClass& f_class);

/// Sum of |P(x,y) - Q(x,y)|. On a finite alphabet this equals the supremum
/// over finite partitions of the summed absolute discrepancies (the sign
/// partition attains it); that identity is exercised by the partition oracle
/// in the tests.
double variational_distance(const JointPmf& p, const JointPmf& q);

}  // namespace rcl
