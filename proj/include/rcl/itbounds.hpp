#pragma once

#include <vector>

#include "rcl/type2.hpp"
#include "rcl/types.hpp"

namespace rcl {

/// Shannon entropy of a probability vector, bits, 0 log 0 = 0.
double entropy_bits(const Vector& p);

/// I(Y;U) in bits when Y ~ p_y and U|Y ~ q.
double mutual_information(const Vector& p_y, const Channel& q);

/// I from an explicit joint matrix over (Y, U).
double mutual_information_joint(const Matrix& joint);

/// Joint of (X, U) under X -> Y -> U: P_XU(x,u) = sum_y P(x,y) q(u|y).
JointPmf induced_joint_xu(const JointPmf& p, const Channel& q);

/// ||delta_(x,u) - P||_F, the pointwise distortion of reproducing the pair
/// (x, u) when the truth is P.
double rho_distortion(int x, int u, const JointPmf& p,
                      const FunctionClass& f_class);

struct DksOptions {
  int grid_resolution = 50;       // per channel-row parameter
  double refine_tol = 1e-4;       // pattern-search step floor
  long long max_grid_points = 2'000'000;
  int max_refine_evals = 20000;
};

/// Minimizer report for the information-theoretic distortion-rate function
/// inf { ||P_XU - P||_F : X -> Y -> U, I(Y;U) <= R }. The solver (grid over
/// the channel polytope, then feasible pattern-search refinement) evaluates
/// only channels with I <= R + 1e-9, so value upper-bounds the infimum of
/// that slightly relaxed program within the refinement tolerance; the slack
/// can place it a few times 1e-4 below the exact-rate optimum.
struct DksResult {
  double value = 0.0;
  Channel channel;
  double achieved_mi = 0.0;
  long long grid_points = 0;
  int refine_steps = 0;
};

DksResult d_ks(const JointPmf& p, const FunctionClass& f_class, double rate,
               const DksOptions& options = {});

/// Minimax value of the averaged pointwise distortion
/// E_P [ (1/n) sum_i rho(X_i, q(Y^n)_i) ] over rate-feasible quantizers.
/// Dominates the block distortion by the triangle inequality.
struct SingleLetterResult {
  double value = 0.0;
  QuantizerMap quantizer;
  std::vector<double> per_p;
  long long assignments_searched = 0;
};

SingleLetterResult single_letter_bound(int n, double rate,
                                       const DistributionFamily& family,
                                       const FunctionClass& f_class,
                                       const SearchBudget& budget = {});

/// Per-member numerical audit of the converse argument: the time-averaged
/// triple built from the optimal quantizer must reproduce the source marginal,
/// its (X,U)-marginal must sit within the per-member block distortion, and its
/// Y-U mutual information must respect the rate.
struct LowerBoundMemberReport {
  int p_index = 0;
  double dks_value = 0.0;
  double per_p_distortion = 0.0;
  double averaged_distortion = 0.0;  // ||Pbar_XU - P||_F
  double marginal_error = 0.0;       // max_xy |sum_u Pbar(x,y,u) - P(x,y)|
  double averaged_mi = 0.0;          // I(Ybar; Ubar), bits
  bool marginal_ok = false;
  bool distortion_ok = false;
  bool mi_ok = false;
};

struct LowerBoundReport {
  int n = 0;
  double rate = 0.0;
  double dhat_value = 0.0;
  double max_dks = 0.0;
  bool ordering_ok = false;  // dhat_value >= max_dks - 1e-6
  bool chain_ok = false;     // all member sub-checks hold
  DhatResult dhat;
  std::vector<LowerBoundMemberReport> members;
};

LowerBoundReport lower_bound_check(int n, double rate,
                                   const DistributionFamily& family,
                                   const FunctionClass& f_class,
                                   const SearchBudget& budget = {},
                                   const DksOptions& dks_options = {});

/// Grid evaluation of the nested sup/inf upper-bound expression on the
/// limiting distortion: alpha (sup), delta (inf), P' over a simplex grid on
/// M(Y) (sup), channels with I(P' x Q) <= R + alpha (inf), family members
/// with ||P_Y - P'||_V <= delta (sup). An approximation on the configured
/// grids, not a certified bound in either direction.
struct GridBoundSpec {
  std::vector<double> alpha_list;
  std::vector<double> delta_list;
  int p_prime_resolution = 20;
  int channel_resolution = 10;
  long long max_evaluations = 100'000'000;
};

struct GridBoundCell {
  double alpha = 0.0;
  double delta = 0.0;
  double value = 0.0;  // -inf when every P' ball missed the family
};

struct GridBoundResult {
  double value = 0.0;
  double alpha_at = 0.0;
  double delta_at = 0.0;
  std::vector<GridBoundCell> cells;
  long long p_prime_count = 0;
  long long channel_count = 0;
};

GridBoundResult grid_upper_bound(const DistributionFamily& family,
                                 const FunctionClass& f_class, double rate,
                                 const GridBoundSpec& spec);

}  // namespace rcl
