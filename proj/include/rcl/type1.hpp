#pragma once

#include <span>
#include <utility>
#include <vector>

#include "rcl/covering.hpp"
#include "rcl/types.hpp"

namespace rcl {

/// Outcome of one train/evaluate round of either scheme, together with the
/// per-realization bound from the corresponding proof chain.
struct TrialRecord {
  double loss = 0.0;    // expected loss of the learned function under true_P
  double excess = 0.0;  // loss - L*(F, true_P)
  double bound = 0.0;   // data-dependent bound on the excess
  bool within_bound = false;  // loss <= L* + bound + tol; must always hold
  bool misspecified = false;  // true_P was not a family member
  int encoded_index = 0;
  int learned_f = 0;
};

/// Encoder/learner pair that quantizes the empirical distribution onto an
/// eps-net of the family and plays the best response to the decoded member.
struct Type1Scheme {
  DistributionFamily family;
  FunctionClass f_class;
  EpsilonNet net;
  double epsilon_n = 0.0;

  // learner's response for each net index, precomputed
  std::vector<int> bayes_f_of_net;

  const JointPmf& net_member(int j) const {
    return family.members[static_cast<std::size_t>(
        net.member_indices[static_cast<std::size_t>(j)])];
  }

  static Type1Scheme build(DistributionFamily family, FunctionClass f_class,
                           double epsilon_n,
                           CoverMode mode = CoverMode::exact);
};

/// Index of the net member closest to the sample's empirical measure in the
/// F-norm, lowest index on ties.
int encode_type1(const EmpiricalMeasure& emp, const Type1Scheme& scheme);
int encode_type1(std::span<const std::pair<int, int>> sample,
                 const Type1Scheme& scheme);

/// The learner's function index for message j: the best response to net
/// member j.
int learn_type1(int j, const Type1Scheme& scheme);

/// Runs encoder and learner on one sample and evaluates against true_p.
/// bound = 4 ||true_p - empirical||_F + 2 epsilon_n.
TrialRecord type1_trial(std::span<const std::pair<int, int>> sample,
                        const Type1Scheme& scheme, const JointPmf& true_p);

/// Description rate log2(|net|) / n in bits per training pair.
double rate_of_scheme(const Type1Scheme& scheme, int n);

/// Default radius schedule epsilon_n = c / log2(n + 2).
double epsilon_schedule(double c, int n);

}  // namespace rcl
