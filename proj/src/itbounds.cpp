#include "rcl/itbounds.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>

#include "rcl/errors.hpp"
#include "rcl/losses.hpp"
#include "rcl/measures.hpp"

namespace rcl {

double entropy_bits(const Vector& p) {
  double h = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (p(i) > 0.0) {
      h -= p(i) * std::log2(p(i));
    }
  }
  return h;
}

double mutual_information_joint(const Matrix& joint) {
  const Vector ry = joint.rowwise().sum();
  const Vector cu = joint.colwise().sum().transpose();
  double info = 0.0;
  for (Eigen::Index y = 0; y < joint.rows(); ++y) {
    for (Eigen::Index u = 0; u < joint.cols(); ++u) {
      const double m = joint(y, u);
      if (m > 0.0) {
        info += m * std::log2(m / (ry(y) * cu(u)));
      }
    }
  }
  return std::max(info, 0.0);
}

double mutual_information(const Vector& p_y, const Channel& q) {
  if (p_y.size() != q.rows.rows()) {
    throw std::invalid_argument("mutual_information: dimension mismatch");
  }
  return mutual_information_joint(p_y.asDiagonal() * q.rows);
}

JointPmf induced_joint_xu(const JointPmf& p, const Channel& q) {
  if (q.in_size() != p.y_size()) {
    throw std::invalid_argument("induced_joint_xu: dimension mismatch");
  }
  return JointPmf::from(p.probs * q.rows);
}

double rho_distortion(int x, int u, const JointPmf& p,
                      const FunctionClass& f_class) {
  if (x < 0 || x >= p.x_size() || u < 0 || u >= p.y_size()) {
    throw std::invalid_argument("rho_distortion: index out of range");
  }
  Matrix dirac = Matrix::Zero(p.x_size(), p.y_size());
  dirac(x, u) = 1.0;
  return f_norm_diff(dirac, p.probs, f_class);
}

namespace {

// All vectors of length dim with entries k/resolution summing to 1,
// enumerated lexicographically.
std::vector<Vector> simplex_grid(int dim, int resolution) {
  std::vector<Vector> out;
  std::vector<int> parts(static_cast<std::size_t>(dim), 0);
  std::function<void(int, int)> rec = [&](int i, int remaining) {
    if (i == dim - 1) {
      parts[static_cast<std::size_t>(i)] = remaining;
      Vector v(dim);
      for (int k = 0; k < dim; ++k) {
        v(k) = static_cast<double>(parts[static_cast<std::size_t>(k)]) /
               resolution;
      }
      out.push_back(std::move(v));
      return;
    }
    for (int k = remaining; k >= 0; --k) {
      parts[static_cast<std::size_t>(i)] = k;
      rec(i + 1, remaining - k);
    }
  };
  rec(0, resolution);
  return out;
}

long long grid_channel_count(long long rows_per_choice, int y_size) {
  long long total = 1;
  for (int y = 0; y < y_size; ++y) {
    if (total > (1LL << 62) / rows_per_choice) {
      return std::numeric_limits<long long>::max();
    }
    total *= rows_per_choice;
  }
  return total;
}

// Zero-row-sum move directions for the pattern search: single-row mass
// transfers and simultaneous two-row transfers (the latter matter because the
// objective is a max of linear functionals and axis moves alone can stall).
std::vector<Matrix> search_directions(int y_size, int u_size) {
  std::vector<Matrix> dirs;
  std::vector<Matrix> singles;
  for (int y = 0; y < y_size; ++y) {
    for (int u = 0; u < u_size; ++u) {
      for (int v = 0; v < u_size; ++v) {
        if (u == v) {
          continue;
        }
        Matrix d = Matrix::Zero(y_size, u_size);
        d(y, u) = 1.0;
        d(y, v) = -1.0;
        singles.push_back(d);
        dirs.push_back(std::move(d));
      }
    }
  }
  const int per_row = u_size * (u_size - 1);
  for (int y1 = 0; y1 < y_size; ++y1) {
    for (int y2 = y1 + 1; y2 < y_size; ++y2) {
      for (int t1 = 0; t1 < per_row; ++t1) {
        for (int t2 = 0; t2 < per_row; ++t2) {
          dirs.push_back(singles[static_cast<std::size_t>(y1 * per_row + t1)] +
                         singles[static_cast<std::size_t>(y2 * per_row + t2)]);
        }
      }
    }
  }
  return dirs;
}

struct ChannelPoint {
  Matrix rows;
  double mi = 0.0;
  double value = 0.0;
};

// Clamps to the stochastic polytope, restores rate feasibility by mixing
// toward the constant output-marginal channel, and evaluates the distortion.
std::optional<ChannelPoint> evaluate_channel(Matrix rows, const JointPmf& p,
                                             const Vector& p_y,
                                             const FunctionClass& f_class,
                                             double rate) {
  for (Eigen::Index y = 0; y < rows.rows(); ++y) {
    rows.row(y) = rows.row(y).cwiseMax(0.0);
    const double sum = rows.row(y).sum();
    if (sum <= 0.0) {
      return std::nullopt;
    }
    rows.row(y) /= sum;
  }
  double mi = mutual_information_joint(p_y.asDiagonal() * rows);
  if (mi > rate + 1e-12) {
    const Vector pu = rows.transpose() * p_y;
    Matrix constant(rows.rows(), rows.cols());
    constant.rowwise() = pu.transpose();
    double lo = 0.0;
    double hi = 1.0;  // fully constant: zero information, always feasible
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      const Matrix mixed = (1.0 - mid) * rows + mid * constant;
      if (mutual_information_joint(p_y.asDiagonal() * mixed) <= rate) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
    rows = (1.0 - hi) * rows + hi * constant;
    mi = mutual_information_joint(p_y.asDiagonal() * rows);
    if (mi > rate + 1e-9) {
      return std::nullopt;
    }
  }
  const double value = f_norm_diff(p.probs * rows, p.probs, f_class);
  return ChannelPoint{std::move(rows), mi, value};
}

}  // namespace

DksResult d_ks(const JointPmf& p, const FunctionClass& f_class, double rate,
               const DksOptions& options) {
  if (rate < 0.0) {
    throw std::invalid_argument("d_ks: rate must be >= 0");
  }
  if (options.grid_resolution < 1) {
    throw std::invalid_argument("d_ks: grid_resolution must be >= 1");
  }
  if (p.x_size() != f_class.x_size() || p.y_size() != f_class.y_size()) {
    throw std::invalid_argument("d_ks: dimension mismatch");
  }
  const int y_size = p.y_size();
  const Vector p_y = p.y_marginal();

  const std::vector<Vector> row_grid =
      simplex_grid(y_size, options.grid_resolution);
  const long long channel_total = grid_channel_count(
      static_cast<long long>(row_grid.size()), y_size);
  if (channel_total > options.max_grid_points) {
    throw GuardError("d_ks: channel grid exceeds budget; lower the resolution");
  }

  Matrix best_rows;
  double best_value = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> pick(static_cast<std::size_t>(y_size), 0);
  long long evaluated = 0;
  while (true) {
    Matrix rows(y_size, y_size);
    for (int y = 0; y < y_size; ++y) {
      rows.row(y) = row_grid[pick[static_cast<std::size_t>(y)]].transpose();
    }
    ++evaluated;
    if (mutual_information_joint(p_y.asDiagonal() * rows) <= rate + 1e-12) {
      const double value = f_norm_diff(p.probs * rows, p.probs, f_class);
      if (value < best_value) {
        best_value = value;
        best_rows = rows;
      }
    }
    int y = y_size - 1;
    while (y >= 0 && ++pick[static_cast<std::size_t>(y)] == row_grid.size()) {
      pick[static_cast<std::size_t>(y)] = 0;
      --y;
    }
    if (y < 0) {
      break;
    }
  }
  // The fully constant channel is always feasible, so the grid found a point.

  int refine_steps = 0;
  if (best_value > 1e-15) {
    const std::vector<Matrix> dirs = search_directions(y_size, y_size);
    double step = 1.0 / options.grid_resolution;
    int evals = 0;
    while (step >= options.refine_tol && evals < options.max_refine_evals) {
      double move_value = best_value;
      Matrix move_rows;
      for (const Matrix& d : dirs) {
        const auto cand =
            evaluate_channel(best_rows + step * d, p, p_y, f_class, rate);
        ++evals;
        if (cand && cand->value < move_value - 1e-15) {
          move_value = cand->value;
          move_rows = cand->rows;
        }
      }
      if (move_value < best_value - 1e-15) {
        best_value = move_value;
        best_rows = std::move(move_rows);
        ++refine_steps;
      } else {
        step *= 0.5;
      }
      if (best_value <= 1e-15) {
        break;
      }
    }
  }

  DksResult res;
  res.value = best_value;
  res.channel = Channel::from(best_rows);
  res.achieved_mi = mutual_information(p_y, res.channel);
  res.grid_points = evaluated;
  res.refine_steps = refine_steps;
  return res;
}

SingleLetterResult single_letter_bound(int n, double rate,
                                       const DistributionFamily& family,
                                       const FunctionClass& f_class,
                                       const SearchBudget& budget) {
  const int y_size = family.y_size();
  const int x_size = family.x_size();
  const long long s_count = pow_ll(y_size, n);
  if (s_count * s_count > budget.max_table_entries) {
    throw GuardError("single_letter_bound: table precompute exceeds budget");
  }
  const int m_max = std::min<long long>(max_codebook_size(n, rate), s_count);

  std::vector<std::vector<int>> seqs(static_cast<std::size_t>(s_count));
  for (long long s = 0; s < s_count; ++s) {
    seqs[static_cast<std::size_t>(s)] = sequence_of_rank(s, n, y_size);
  }

  std::vector<std::vector<double>> tables;
  tables.reserve(static_cast<std::size_t>(family.size()));
  for (const JointPmf& p : family.members) {
    const Vector p_y = p.y_marginal();
    // joint-weighted pointwise distortion: rbar(y,u) = sum_x P(x,y) rho(x,u)
    Matrix rbar = Matrix::Zero(y_size, y_size);
    for (int y = 0; y < y_size; ++y) {
      for (int u = 0; u < y_size; ++u) {
        double acc = 0.0;
        for (int x = 0; x < x_size; ++x) {
          acc += p.probs(x, y) * rho_distortion(x, u, p, f_class);
        }
        rbar(y, u) = acc;
      }
    }
    std::vector<double> t(static_cast<std::size_t>(s_count * s_count));
    std::vector<double> prefix(static_cast<std::size_t>(n) + 1, 1.0);
    std::vector<double> suffix(static_cast<std::size_t>(n) + 1, 1.0);
    for (long long s = 0; s < s_count; ++s) {
      const auto& y_seq = seqs[static_cast<std::size_t>(s)];
      for (int i = 0; i < n; ++i) {
        prefix[static_cast<std::size_t>(i) + 1] =
            prefix[static_cast<std::size_t>(i)] *
            p_y(y_seq[static_cast<std::size_t>(i)]);
      }
      suffix[static_cast<std::size_t>(n)] = 1.0;
      for (int i = n - 1; i >= 0; --i) {
        suffix[static_cast<std::size_t>(i)] =
            suffix[static_cast<std::size_t>(i) + 1] *
            p_y(y_seq[static_cast<std::size_t>(i)]);
      }
      for (long long c = 0; c < s_count; ++c) {
        const auto& cw = seqs[static_cast<std::size_t>(c)];
        double acc = 0.0;
        for (int i = 0; i < n; ++i) {
          acc += prefix[static_cast<std::size_t>(i)] *
                 suffix[static_cast<std::size_t>(i) + 1] *
                 rbar(y_seq[static_cast<std::size_t>(i)],
                      cw[static_cast<std::size_t>(i)]);
        }
        t[static_cast<std::size_t>(s * s_count + c)] = acc / n;
      }
    }
    tables.push_back(std::move(t));
  }

  AssignmentSearch search = minimax_assignment_search(
      tables, s_count, m_max, budget.max_assignments);

  SingleLetterResult res;
  res.quantizer = QuantizerMap::from_ranks(n, y_size, search.ranks);
  res.assignments_searched = search.leaves;
  res.per_p.resize(static_cast<std::size_t>(family.size()));
  for (int p = 0; p < family.size(); ++p) {
    double sum = 0.0;
    for (long long s = 0; s < s_count; ++s) {
      sum += tables[static_cast<std::size_t>(p)][static_cast<std::size_t>(
          s * s_count + search.ranks[static_cast<std::size_t>(s)])];
    }
    res.per_p[static_cast<std::size_t>(p)] = sum;
  }
  res.value = *std::max_element(res.per_p.begin(), res.per_p.end());
  return res;
}

LowerBoundReport lower_bound_check(int n, double rate,
                                   const DistributionFamily& family,
                                   const FunctionClass& f_class,
                                   const SearchBudget& budget,
                                   const DksOptions& dks_options) {
  LowerBoundReport report;
  report.n = n;
  report.rate = rate;
  report.dhat = optimal_quantizer(n, rate, family, f_class, budget);
  report.dhat_value = report.dhat.value;

  const int y_size = family.y_size();
  const int x_size = family.x_size();
  const long long s_count = pow_ll(y_size, n);
  const QuantizerMap& q = report.dhat.quantizer;

  report.max_dks = 0.0;
  bool chain_ok = true;
  for (int p_idx = 0; p_idx < family.size(); ++p_idx) {
    const JointPmf& p = family.members[static_cast<std::size_t>(p_idx)];
    const Vector p_y = p.y_marginal();

    LowerBoundMemberReport member;
    member.p_index = p_idx;
    member.dks_value = d_ks(p, f_class, rate, dks_options).value;
    member.per_p_distortion =
        report.dhat.per_p_distortion[static_cast<std::size_t>(p_idx)];
    report.max_dks = std::max(report.max_dks, member.dks_value);

    // time-averaged (Y, quantized-Y) joint over the n positions
    Matrix ayu = Matrix::Zero(y_size, y_size);
    for (long long s = 0; s < s_count; ++s) {
      const std::vector<int> y_seq = sequence_of_rank(s, n, y_size);
      double w = 1.0;
      for (int i = 0; i < n; ++i) {
        w *= p_y(y_seq[static_cast<std::size_t>(i)]);
      }
      if (w == 0.0) {
        continue;
      }
      const auto& cw =
          q.codeword(q.assignment[static_cast<std::size_t>(s)]);
      for (int i = 0; i < n; ++i) {
        ayu(y_seq[static_cast<std::size_t>(i)],
            cw[static_cast<std::size_t>(i)]) += w / n;
      }
    }

    // averaged (X, U) marginal; X enters only through P(x|y) per position
    Matrix pxu = Matrix::Zero(x_size, y_size);
    double marginal_error = 0.0;
    for (int y = 0; y < y_size; ++y) {
      if (p_y(y) == 0.0) {
        continue;
      }
      const double row_sum = ayu.row(y).sum();
      for (int x = 0; x < x_size; ++x) {
        for (int u = 0; u < y_size; ++u) {
          pxu(x, u) += p.probs(x, y) / p_y(y) * ayu(y, u);
        }
        marginal_error = std::max(
            marginal_error,
            std::abs(p.probs(x, y) * row_sum / p_y(y) - p.probs(x, y)));
      }
    }

    member.marginal_error = marginal_error;
    member.averaged_distortion = f_norm_diff(pxu, p.probs, f_class);
    member.averaged_mi = mutual_information_joint(ayu);
    member.marginal_ok = member.marginal_error <= kIneqTol;
    member.distortion_ok =
        member.averaged_distortion <= member.per_p_distortion + kIneqTol;
    member.mi_ok = member.averaged_mi <= rate + 1e-6;
    chain_ok = chain_ok && member.marginal_ok && member.distortion_ok &&
               member.mi_ok;
    report.members.push_back(std::move(member));
  }

  report.ordering_ok = report.dhat_value >= report.max_dks - 1e-6;
  report.chain_ok = chain_ok;
  return report;
}

GridBoundResult grid_upper_bound(const DistributionFamily& family,
                                 const FunctionClass& f_class, double rate,
                                 const GridBoundSpec& spec) {
  if (spec.alpha_list.empty() || spec.delta_list.empty()) {
    throw std::invalid_argument("grid_upper_bound: empty grid list");
  }
  if (spec.p_prime_resolution < 1 || spec.channel_resolution < 1) {
    throw std::invalid_argument("grid_upper_bound: resolutions must be >= 1");
  }
  const int y_size = family.y_size();
  const int x_size = family.x_size();

  const std::vector<Vector> p_grid =
      simplex_grid(y_size, spec.p_prime_resolution);
  const std::vector<Vector> row_grid =
      simplex_grid(y_size, spec.channel_resolution);
  const long long channel_total = grid_channel_count(
      static_cast<long long>(row_grid.size()), y_size);
  const long long evals =
      static_cast<long long>(spec.alpha_list.size()) *
      static_cast<long long>(spec.delta_list.size()) *
      static_cast<long long>(p_grid.size()) * channel_total * family.size();
  if (channel_total > spec.max_evaluations || evals > spec.max_evaluations) {
    throw GuardError("grid_upper_bound: grid size exceeds budget");
  }

  // channels, enumerated row-major over the row grid
  std::vector<Matrix> channels;
  channels.reserve(static_cast<std::size_t>(channel_total));
  std::vector<std::size_t> pick(static_cast<std::size_t>(y_size), 0);
  while (true) {
    Matrix rows(y_size, y_size);
    for (int y = 0; y < y_size; ++y) {
      rows.row(y) = row_grid[pick[static_cast<std::size_t>(y)]].transpose();
    }
    channels.push_back(std::move(rows));
    int y = y_size - 1;
    while (y >= 0 && ++pick[static_cast<std::size_t>(y)] == row_grid.size()) {
      pick[static_cast<std::size_t>(y)] = 0;
      --y;
    }
    if (y < 0) {
      break;
    }
  }

  // expectation of the pointwise distortion, independent of P':
  // e[qi][pi] = sum_{y,u} Q(u|y) sum_x P(x,y) rho_P(x,u)
  std::vector<Matrix> g_p;
  g_p.reserve(static_cast<std::size_t>(family.size()));
  for (const JointPmf& p : family.members) {
    Matrix g = Matrix::Zero(y_size, y_size);
    for (int y = 0; y < y_size; ++y) {
      for (int u = 0; u < y_size; ++u) {
        double acc = 0.0;
        for (int x = 0; x < x_size; ++x) {
          acc += p.probs(x, y) * rho_distortion(x, u, p, f_class);
        }
        g(y, u) = acc;
      }
    }
    g_p.push_back(std::move(g));
  }
  std::vector<std::vector<double>> expect(channels.size());
  for (std::size_t qi = 0; qi < channels.size(); ++qi) {
    expect[qi].resize(static_cast<std::size_t>(family.size()));
    for (int p = 0; p < family.size(); ++p) {
      expect[qi][static_cast<std::size_t>(p)] =
          channels[qi].cwiseProduct(g_p[static_cast<std::size_t>(p)]).sum();
    }
  }
  // I(P' x Q) cache
  std::vector<std::vector<double>> mi(p_grid.size());
  for (std::size_t pi = 0; pi < p_grid.size(); ++pi) {
    mi[pi].resize(channels.size());
    for (std::size_t qi = 0; qi < channels.size(); ++qi) {
      mi[pi][qi] =
          mutual_information_joint(p_grid[pi].asDiagonal() * channels[qi]);
    }
  }
  // variational distance of each member's Y-marginal to each grid point
  std::vector<std::vector<double>> y_dist(p_grid.size());
  for (std::size_t pi = 0; pi < p_grid.size(); ++pi) {
    y_dist[pi].resize(static_cast<std::size_t>(family.size()));
    for (int p = 0; p < family.size(); ++p) {
      y_dist[pi][static_cast<std::size_t>(p)] =
          (family.members[static_cast<std::size_t>(p)].y_marginal() -
           p_grid[pi])
              .cwiseAbs()
              .sum();
    }
  }

  const double neg_inf = -std::numeric_limits<double>::infinity();
  GridBoundResult result;
  result.p_prime_count = static_cast<long long>(p_grid.size());
  result.channel_count = channel_total;
  result.value = neg_inf;

  for (double alpha : spec.alpha_list) {
    double inner_min = std::numeric_limits<double>::infinity();
    double delta_at = spec.delta_list.front();
    bool any_finite = false;
    for (double delta : spec.delta_list) {
      double sup_pprime = neg_inf;
      for (std::size_t pi = 0; pi < p_grid.size(); ++pi) {
        std::vector<int> ball;
        for (int p = 0; p < family.size(); ++p) {
          if (y_dist[pi][static_cast<std::size_t>(p)] <= delta + 1e-12) {
            ball.push_back(p);
          }
        }
        if (ball.empty()) {
          continue;  // vacuous branch: contributes -inf, skipped
        }
        double inf_q = std::numeric_limits<double>::infinity();
        for (std::size_t qi = 0; qi < channels.size(); ++qi) {
          if (mi[pi][qi] > rate + alpha + 1e-12) {
            continue;
          }
          double sup_p = 0.0;
          for (int p : ball) {
            sup_p = std::max(sup_p, expect[qi][static_cast<std::size_t>(p)]);
          }
          inf_q = std::min(inf_q, sup_p);
        }
        sup_pprime = std::max(sup_pprime, inf_q);
      }
      result.cells.push_back({alpha, delta, sup_pprime});
      // A cell where every P' ball missed the family is a grid artifact
      // (in the full expression P' ranges over all of M(Y), so some ball
      // is always nonempty); it does not enter the delta-infimum.
      if (sup_pprime == neg_inf) {
        continue;
      }
      any_finite = true;
      if (sup_pprime < inner_min) {
        inner_min = sup_pprime;
        delta_at = delta;
      }
    }
    if (any_finite && inner_min > result.value) {
      result.value = inner_min;
      result.alpha_at = alpha;
      result.delta_at = delta_at;
    }
  }
  return result;
}

}  // namespace rcl
