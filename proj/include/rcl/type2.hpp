#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "rcl/rng.hpp"
#include "rcl/type1.hpp"
#include "rcl/types.hpp"

namespace rcl {

/// Lexicographic rank of a sequence over {0..alphabet-1}, position 0 most
/// significant; the canonical ordering for assignment arrays.
long long rank_of_sequence(std::span<const int> seq, int alphabet);
std::vector<int> sequence_of_rank(long long rank, int n, int alphabet);
long long pow_ll(int base, int exp);

/// A block quantizer of output sequences: every length-n y-sequence maps to
/// one of M codewords, themselves y-sequences.
struct QuantizerMap {
  int n = 0;
  int y_size = 0;
  std::vector<int> assignment;             // y-seq rank -> codebook index
  std::vector<std::vector<int>> codebook;  // codewords, sorted by rank

  int codebook_size() const { return static_cast<int>(codebook.size()); }
  double rate() const;

  const std::vector<int>& codeword(int j) const {
    return codebook[static_cast<std::size_t>(j)];
  }

  /// Builds from a rank-valued assignment (y-seq rank -> codeword rank);
  /// the codebook is the sorted set of distinct targets.
  static QuantizerMap from_ranks(int n, int y_size,
                                 const std::vector<int>& target_ranks);
  static QuantizerMap identity(int n, int y_size);

  /// Checks structural invariants and that rate() <= declared_rate + 1e-9.
  void validate(double declared_rate) const;
};

/// Cost guards for the exact searches; explicit configuration, not hidden
/// heuristics.
struct SearchBudget {
  long long max_assignments = 20'000'000;  // functions enumerated by search
  double max_expectation_bits = 20.0;      // n*log2(|X||Y|) for exact sums
  long long max_table_entries = 1 << 26;   // S*S*|X|^n precompute cost
};

/// Exact expected F-norm distortion E_P ||emp(X^n, q(Y^n)) - P||_F, summing
/// over all (x^n, y^n); guarded by budget.max_expectation_bits.
double quantizer_distortion(const QuantizerMap& q, const JointPmf& p,
                            const FunctionClass& f_class,
                            const SearchBudget& budget = {});

struct McEstimate {
  double mean = 0.0;
  double std_err = 0.0;
  int trials = 0;
};

/// Monte Carlo estimate of the same expectation for instances beyond the
/// exact guard.
McEstimate quantizer_distortion_mc(const QuantizerMap& q, const JointPmf& p,
                                   const FunctionClass& f_class, int trials,
                                   RandomStream& stream);

/// A minimax quantizer and its value: max-over-family expected distortion,
/// minimized over all rate-feasible quantizers.
struct DhatResult {
  double value = 0.0;
  QuantizerMap quantizer;
  int n = 0;
  double rate = 0.0;
  std::vector<double> per_p_distortion;
  bool exact = false;
  long long assignments_searched = 0;
};

/// Largest codebook size with log2(M)/n <= rate: floor(2^(n*rate)).
int max_codebook_size(int n, double rate);

/// Exhaustive minimax search over all assignments with image size <= M,
/// enumerating each function once (image-size pruning); ties resolved toward
/// the lexicographically smallest rank-valued assignment.
DhatResult optimal_quantizer(int n, double rate,
                             const DistributionFamily& family,
                             const FunctionClass& f_class,
                             const SearchBudget& budget = {});

struct AssignmentSearch {
  std::vector<int> ranks;
  long long leaves = 0;
};

/// Shared exhaustive engine behind the minimax quantizer searches:
/// minimizes max_p sum_s tables[p][s*S + ranks[s]] over all assignments with
/// image size <= m_max. Additive nonnegative per-sequence costs only.
/// Returns the lexicographically smallest minimizer.
AssignmentSearch minimax_assignment_search(
    const std::vector<std::vector<double>>& tables, long long s_count,
    int m_max, long long max_assignments);

/// Local-search stand-in for the exhaustive optimum: single-sequence
/// reassignment moves from seeded random starts. Value is an upper bound on
/// the exact optimum; deterministic given the seed.
DhatResult greedy_quantizer(int n, double rate,
                            const DistributionFamily& family,
                            const FunctionClass& f_class, int restarts,
                            std::uint64_t seed,
                            const SearchBudget& budget = {});

/// Message index for an output block: the codebook slot of q(y_seq).
int encode_type2(std::span<const int> y_seq, const QuantizerMap& q);

struct Type2Learned {
  int p_hat_index = 0;  // family member closest to the decoded empirical
  int f_index = 0;      // best response to that member
};

/// Decodes codeword j, pairs it with the observed input block, projects the
/// empirical measure onto the family in the F-norm (lowest index on ties),
/// and plays the best response.
Type2Learned learn_type2(int j, std::span<const int> x_seq,
                         const QuantizerMap& q,
                         const DistributionFamily& family,
                         const FunctionClass& f_class);

/// Full encode/learn round against true_p.
/// bound = 4 ||true_p - emp(x^n, q(y^n))||_F.
TrialRecord type2_trial(std::span<const std::pair<int, int>> sample,
                        const QuantizerMap& q,
                        const DistributionFamily& family,
                        const FunctionClass& f_class, const JointPmf& true_p);

}  // namespace rcl
