#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "rcl/covering.hpp"
#include "rcl/sampling.hpp"
#include "rcl/type1.hpp"
#include "rcl/type2.hpp"
#include "rcl/types.hpp"

namespace rcl {

enum class SchemeType { type1, type2 };
enum class QuantMode { exact, greedy };

/// One reproducibility unit: everything needed to rerun an excess-loss curve.
struct ExperimentConfig {
  DistributionFamily family;
  FunctionClass f_class;
  SchemeType scheme = SchemeType::type1;

  // Type II
  double rate = 0.0;
  QuantMode quant_mode = QuantMode::exact;
  int restarts = 16;

  // Type I
  double epsilon_c = 1.0;  // epsilon_n = epsilon_c / log2(n + 2)
  CoverMode net_mode = CoverMode::exact;

  std::vector<int> n_grid;  // strictly increasing
  int trials = 1;
  std::uint64_t seed = 0;
  std::optional<double> pac_epsilon;
  int threads = 1;
  SearchBudget budget;

  void validate() const;
};

struct CurvePoint {
  int n = 0;
  int true_p_index = 0;  // -1 marks the worst-case-over-family row
  double mean_excess = 0.0;
  double std_err = 0.0;
  double mean_bound = 0.0;
  double exceedance_prob = 0.0;  // fraction of trials with excess > pac_epsilon
  long violations = 0;           // per-realization bound failures; must be 0
  int trials = 0;
};

/// Runs trials for every (n, family member) cell and aggregates. Each trial
/// draws from its own counter-based substream keyed by (n index, member,
/// trial), so results are bit-identical for any thread count. Per n, a
/// worst-case row (true_p_index = -1) mirrors the member with the largest
/// mean excess.
std::vector<CurvePoint> run_experiment(const ExperimentConfig& config);

struct GcPoint {
  int n = 0;
  double mean_fnorm = 0.0;
  double std_err = 0.0;
};

/// Monte Carlo means of ||emp(Z^n) - P||_F along n_grid: the empirical view
/// of the uniform-convergence decay.
std::vector<GcPoint> gc_decay(const JointPmf& p, const FunctionClass& f_class,
                              const std::vector<int>& n_grid, int trials,
                              std::uint64_t seed, int threads = 1);

/// Worst-case exceedance probabilities per n; requires pac_epsilon.
std::vector<std::pair<int, double>> pac_exceedance(
    const ExperimentConfig& config);

}  // namespace rcl
