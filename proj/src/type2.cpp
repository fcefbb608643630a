#include "rcl/type2.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <unordered_map>

#include "rcl/errors.hpp"
#include "rcl/losses.hpp"
#include "rcl/measures.hpp"
#include "rcl/sampling.hpp"

namespace rcl {

long long pow_ll(int base, int exp) {
  long long v = 1;
  for (int i = 0; i < exp; ++i) {
    v *= base;
  }
  return v;
}

long long rank_of_sequence(std::span<const int> seq, int alphabet) {
  long long r = 0;
  for (int s : seq) {
    if (s < 0 || s >= alphabet) {
      throw std::invalid_argument("rank_of_sequence: symbol out of range");
    }
    r = r * alphabet + s;
  }
  return r;
}

std::vector<int> sequence_of_rank(long long rank, int n, int alphabet) {
  std::vector<int> seq(static_cast<std::size_t>(n));
  for (int i = n - 1; i >= 0; --i) {
    seq[static_cast<std::size_t>(i)] = static_cast<int>(rank % alphabet);
    rank /= alphabet;
  }
  return seq;
}

double QuantizerMap::rate() const {
  return std::log2(static_cast<double>(codebook.size())) / n;
}

QuantizerMap QuantizerMap::from_ranks(int n, int y_size,
                                      const std::vector<int>& target_ranks) {
  const long long s_count = pow_ll(y_size, n);
  if (static_cast<long long>(target_ranks.size()) != s_count) {
    throw std::invalid_argument("QuantizerMap: assignment length != |Y|^n");
  }
  std::vector<int> distinct = target_ranks;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());

  QuantizerMap q;
  q.n = n;
  q.y_size = y_size;
  q.codebook.reserve(distinct.size());
  for (int r : distinct) {
    if (r < 0 || r >= s_count) {
      throw std::invalid_argument("QuantizerMap: codeword rank out of range");
    }
    q.codebook.push_back(sequence_of_rank(r, n, y_size));
  }
  q.assignment.reserve(target_ranks.size());
  for (int r : target_ranks) {
    const auto it = std::lower_bound(distinct.begin(), distinct.end(), r);
    q.assignment.push_back(static_cast<int>(it - distinct.begin()));
  }
  return q;
}

QuantizerMap QuantizerMap::identity(int n, int y_size) {
  const long long s_count = pow_ll(y_size, n);
  std::vector<int> ranks(static_cast<std::size_t>(s_count));
  for (long long s = 0; s < s_count; ++s) {
    ranks[static_cast<std::size_t>(s)] = static_cast<int>(s);
  }
  return from_ranks(n, y_size, ranks);
}

void QuantizerMap::validate(double declared_rate) const {
  const long long s_count = pow_ll(y_size, n);
  if (static_cast<long long>(assignment.size()) != s_count) {
    throw std::invalid_argument("QuantizerMap: bad assignment length");
  }
  std::vector<bool> used(codebook.size(), false);
  for (int a : assignment) {
    if (a < 0 || a >= codebook_size()) {
      throw std::invalid_argument("QuantizerMap: assignment target out of range");
    }
    used[static_cast<std::size_t>(a)] = true;
  }
  if (!std::all_of(used.begin(), used.end(), [](bool b) { return b; })) {
    throw std::invalid_argument("QuantizerMap: unused codeword");
  }
  for (const auto& cw : codebook) {
    if (static_cast<int>(cw.size()) != n) {
      throw std::invalid_argument("QuantizerMap: codeword length != n");
    }
  }
  if (rate() > declared_rate + kIneqTol) {
    throw std::invalid_argument("QuantizerMap: rate exceeds declaration");
  }
}

int max_codebook_size(int n, double rate) {
  if (rate < 0.0) {
    throw std::invalid_argument("max_codebook_size: rate must be >= 0");
  }
  const double m = std::floor(std::exp2(n * rate) + kIneqTol);
  return static_cast<int>(std::min(m, 1e9));
}

namespace {

// Memoized ||counts/n - P||_F keyed by the count matrix.
class FnormByCounts {
 public:
  FnormByCounts(const JointPmf& p, const FunctionClass& f_class)
      : p_(p), f_class_(f_class) {}

  double get(const CountMatrix& counts, int n) {
    std::string key(static_cast<std::size_t>(counts.size()), '\0');
    for (Eigen::Index i = 0; i < counts.size(); ++i) {
      key[static_cast<std::size_t>(i)] =
          static_cast<char>(counts.data()[i]);
    }
    const auto it = cache_.find(key);
    if (it != cache_.end()) {
      return it->second;
    }
    const Matrix freq = counts.cast<double>() / static_cast<double>(n);
    const double v = f_norm_diff(freq, p_.probs, f_class_);
    cache_.emplace(std::move(key), v);
    return v;
  }

 private:
  const JointPmf& p_;
  const FunctionClass& f_class_;
  std::unordered_map<std::string, double> cache_;
};

// sum over x^n of P^n(x^n, y_seq) * ||emp(x^n, codeword) - P||_F
double conditional_distortion(const JointPmf& p, FnormByCounts& cache,
                              const std::vector<int>& y_seq,
                              const std::vector<int>& codeword, int n) {
  const int xs = p.x_size();
  CountMatrix counts = CountMatrix::Zero(xs, p.y_size());
  double total = 0.0;
  std::function<void(int, double)> rec = [&](int i, double prob) {
    if (i == n) {
      total += prob * cache.get(counts, n);
      return;
    }
    for (int x = 0; x < xs; ++x) {
      const double px = p.probs(x, y_seq[static_cast<std::size_t>(i)]);
      if (px == 0.0) {
        continue;
      }
      counts(x, codeword[static_cast<std::size_t>(i)]) += 1;
      rec(i + 1, prob * px);
      counts(x, codeword[static_cast<std::size_t>(i)]) -= 1;
    }
  };
  rec(0, 1.0);
  return total;
}

void check_expectation_guard(int n, const JointPmf& p,
                             const SearchBudget& budget) {
  const double bits =
      n * std::log2(static_cast<double>(p.x_size()) * p.y_size());
  if (bits > budget.max_expectation_bits + 1e-9) {
    throw GuardError(
        "quantizer distortion: (|X||Y|)^n exceeds the exact-expectation guard; "
        "use the Monte Carlo estimator");
  }
}

// tables[p][s * S + c] = conditional distortion of mapping y-sequence s to
// codeword-candidate c under family member p
std::vector<std::vector<double>> distortion_tables(
    int n, const DistributionFamily& family, const FunctionClass& f_class,
    const SearchBudget& budget) {
  const long long s_count = pow_ll(family.y_size(), n);
  const long long x_count = pow_ll(family.x_size(), n);
  if (s_count * s_count * x_count > budget.max_table_entries) {
    throw GuardError(
        "quantizer search: distortion-table precompute exceeds budget");
  }
  std::vector<std::vector<int>> seqs(static_cast<std::size_t>(s_count));
  for (long long s = 0; s < s_count; ++s) {
    seqs[static_cast<std::size_t>(s)] =
        sequence_of_rank(s, n, family.y_size());
  }
  std::vector<std::vector<double>> tables;
  tables.reserve(static_cast<std::size_t>(family.size()));
  for (const JointPmf& p : family.members) {
    FnormByCounts cache(p, f_class);
    std::vector<double> t(static_cast<std::size_t>(s_count * s_count));
    for (long long s = 0; s < s_count; ++s) {
      for (long long c = 0; c < s_count; ++c) {
        t[static_cast<std::size_t>(s * s_count + c)] = conditional_distortion(
            p, cache, seqs[static_cast<std::size_t>(s)],
            seqs[static_cast<std::size_t>(c)], n);
      }
    }
    tables.push_back(std::move(t));
  }
  return tables;
}

// Number of functions from S positions into S ranks with image size <= M.
long double feasible_function_count(int s_count, int m_max) {
  const int m_cap = std::min(m_max, s_count);
  if (m_cap == s_count) {
    return std::pow(static_cast<long double>(s_count), s_count);
  }
  long double total = 0.0L;
  for (int m = 1; m <= m_cap; ++m) {
    // C(S, m)
    long double choose = 1.0L;
    for (int i = 0; i < m; ++i) {
      choose = choose * (s_count - i) / (i + 1);
    }
    // surjections from S elements onto m labeled elements
    long double surj = 0.0L;
    long double sign = 1.0L;
    for (int j = 0; j <= m; ++j) {
      long double cmj = 1.0L;
      for (int i = 0; i < j; ++i) {
        cmj = cmj * (m - i) / (i + 1);
      }
      surj += sign * cmj * std::pow(static_cast<long double>(m - j), s_count);
      sign = -sign;
    }
    total += choose * std::max(surj, 0.0L);
    if (total > 1e18L) {
      return total;
    }
  }
  return total;
}

DhatResult result_from_ranks(int n, double rate,
                             const DistributionFamily& family,
                             const std::vector<int>& ranks,
                             const std::vector<std::vector<double>>& tables,
                             bool exact, long long searched) {
  const long long s_count = pow_ll(family.y_size(), n);
  DhatResult res;
  res.n = n;
  res.rate = rate;
  res.exact = exact;
  res.assignments_searched = searched;
  res.quantizer = QuantizerMap::from_ranks(n, family.y_size(), ranks);
  res.per_p_distortion.resize(static_cast<std::size_t>(family.size()));
  for (int p = 0; p < family.size(); ++p) {
    double sum = 0.0;
    for (long long s = 0; s < s_count; ++s) {
      sum += tables[static_cast<std::size_t>(p)][static_cast<std::size_t>(
          s * s_count + ranks[static_cast<std::size_t>(s)])];
    }
    res.per_p_distortion[static_cast<std::size_t>(p)] = sum;
  }
  res.value = *std::max_element(res.per_p_distortion.begin(),
                                res.per_p_distortion.end());
  return res;
}

}  // namespace

double quantizer_distortion(const QuantizerMap& q, const JointPmf& p,
                            const FunctionClass& f_class,
                            const SearchBudget& budget) {
  if (p.y_size() != q.y_size || p.x_size() != f_class.x_size() ||
      p.y_size() != f_class.y_size()) {
    throw std::invalid_argument("quantizer_distortion: dimension mismatch");
  }
  check_expectation_guard(q.n, p, budget);
  const long long s_count = pow_ll(q.y_size, q.n);
  FnormByCounts cache(p, f_class);
  double total = 0.0;
  for (long long s = 0; s < s_count; ++s) {
    const std::vector<int> y_seq = sequence_of_rank(s, q.n, q.y_size);
    total += conditional_distortion(
        p, cache, y_seq, q.codeword(q.assignment[static_cast<std::size_t>(s)]),
        q.n);
  }
  return total;
}

McEstimate quantizer_distortion_mc(const QuantizerMap& q, const JointPmf& p,
                                   const FunctionClass& f_class, int trials,
                                   RandomStream& stream) {
  if (trials < 1) {
    throw std::invalid_argument("quantizer_distortion_mc: trials must be >= 1");
  }
  const PmfSampler sampler(p);
  double sum = 0.0;
  double sum_sq = 0.0;
  std::vector<int> y_seq(static_cast<std::size_t>(q.n));
  for (int t = 0; t < trials; ++t) {
    CountMatrix counts = CountMatrix::Zero(p.x_size(), p.y_size());
    std::vector<std::pair<int, int>> pairs;
    pairs.reserve(static_cast<std::size_t>(q.n));
    for (int i = 0; i < q.n; ++i) {
      pairs.push_back(sampler.draw(stream));
      y_seq[static_cast<std::size_t>(i)] = pairs.back().second;
    }
    const auto& cw = q.codeword(encode_type2(y_seq, q));
    for (int i = 0; i < q.n; ++i) {
      counts(pairs[static_cast<std::size_t>(i)].first,
             cw[static_cast<std::size_t>(i)]) += 1;
    }
    const Matrix freq = counts.cast<double>() / static_cast<double>(q.n);
    const double v = f_norm_diff(freq, p.probs, f_class);
    sum += v;
    sum_sq += v * v;
  }
  const double mean = sum / trials;
  double var = (sum_sq - trials * mean * mean) / std::max(trials - 1, 1);
  var = std::max(var, 0.0);
  return McEstimate{mean, std::sqrt(var / trials), trials};
}

AssignmentSearch minimax_assignment_search(
    const std::vector<std::vector<double>>& tables, long long s_count,
    int m_max, long long max_assignments) {
  if (feasible_function_count(static_cast<int>(s_count), m_max) >
      static_cast<long double>(max_assignments)) {
    throw GuardError(
        "minimax search: assignment enumeration exceeds budget; use "
        "greedy_quantizer");
  }
  const int scenarios = static_cast<int>(tables.size());
  std::vector<int> current(static_cast<std::size_t>(s_count), 0);
  std::vector<int> best_ranks;
  double best_value = std::numeric_limits<double>::infinity();
  std::vector<double> psum(static_cast<std::size_t>(scenarios), 0.0);
  std::vector<int> used(static_cast<std::size_t>(s_count), 0);
  int distinct = 0;
  long long leaves = 0;

  std::function<void(long long)> dfs = [&](long long s) {
    if (s == s_count) {
      ++leaves;
      const double value = *std::max_element(psum.begin(), psum.end());
      if (value < best_value) {
        best_value = value;
        best_ranks = current;
      }
      return;
    }
    for (long long c = 0; c < s_count; ++c) {
      const bool fresh = used[static_cast<std::size_t>(c)] == 0;
      if (fresh && distinct == m_max) {
        continue;
      }
      double partial_max = 0.0;
      for (int p = 0; p < scenarios; ++p) {
        psum[static_cast<std::size_t>(p)] +=
            tables[static_cast<std::size_t>(p)]
                  [static_cast<std::size_t>(s * s_count + c)];
        partial_max =
            std::max(partial_max, psum[static_cast<std::size_t>(p)]);
      }
      // costs are nonnegative, so no completion can beat the incumbent
      if (partial_max < best_value) {
        current[static_cast<std::size_t>(s)] = static_cast<int>(c);
        used[static_cast<std::size_t>(c)] += 1;
        distinct += fresh ? 1 : 0;
        dfs(s + 1);
        distinct -= fresh ? 1 : 0;
        used[static_cast<std::size_t>(c)] -= 1;
      }
      for (int p = 0; p < scenarios; ++p) {
        psum[static_cast<std::size_t>(p)] -=
            tables[static_cast<std::size_t>(p)]
                  [static_cast<std::size_t>(s * s_count + c)];
      }
    }
  };
  dfs(0);
  return AssignmentSearch{std::move(best_ranks), leaves};
}

DhatResult optimal_quantizer(int n, double rate,
                             const DistributionFamily& family,
                             const FunctionClass& f_class,
                             const SearchBudget& budget) {
  check_expectation_guard(n, family.members.front(), budget);
  const long long s_count = pow_ll(family.y_size(), n);
  const int m_max = std::min<long long>(max_codebook_size(n, rate), s_count);
  if (m_max < 1) {
    throw std::invalid_argument("optimal_quantizer: empty codebook");
  }
  if (feasible_function_count(static_cast<int>(s_count), m_max) >
      static_cast<long double>(budget.max_assignments)) {
    throw GuardError(
        "optimal_quantizer: assignment enumeration exceeds budget; use "
        "greedy_quantizer");
  }
  const auto tables = distortion_tables(n, family, f_class, budget);
  AssignmentSearch search = minimax_assignment_search(
      tables, s_count, m_max, budget.max_assignments);
  return result_from_ranks(n, rate, family, search.ranks, tables, true,
                           search.leaves);
}

DhatResult greedy_quantizer(int n, double rate,
                            const DistributionFamily& family,
                            const FunctionClass& f_class, int restarts,
                            std::uint64_t seed, const SearchBudget& budget) {
  check_expectation_guard(n, family.members.front(), budget);
  const long long s_count = pow_ll(family.y_size(), n);
  const int m_max = std::min<long long>(max_codebook_size(n, rate), s_count);
  if (m_max < 1) {
    throw std::invalid_argument("greedy_quantizer: empty codebook");
  }
  if (restarts < 1) {
    throw std::invalid_argument("greedy_quantizer: restarts must be >= 1");
  }
  const auto tables = distortion_tables(n, family, f_class, budget);
  const int family_size = family.size();

  std::vector<int> best_ranks;
  double best_value = std::numeric_limits<double>::infinity();

  for (int r = 0; r < restarts; ++r) {
    RandomStream stream(seed, substream(static_cast<std::uint64_t>(r)));
    // random codeword set of size m_max, then best-cell initial assignment
    std::vector<int> pool(static_cast<std::size_t>(s_count));
    for (long long c = 0; c < s_count; ++c) {
      pool[static_cast<std::size_t>(c)] = static_cast<int>(c);
    }
    for (int i = 0; i < m_max; ++i) {
      const int j =
          i + static_cast<int>(stream.next_below(
                  static_cast<std::uint64_t>(s_count - i)));
      std::swap(pool[static_cast<std::size_t>(i)],
                pool[static_cast<std::size_t>(j)]);
    }
    std::vector<int> current(static_cast<std::size_t>(s_count));
    for (long long s = 0; s < s_count; ++s) {
      int pick = pool[0];
      double pick_cost = std::numeric_limits<double>::infinity();
      for (int i = 0; i < m_max; ++i) {
        const int c = pool[static_cast<std::size_t>(i)];
        double cost = 0.0;
        for (int p = 0; p < family_size; ++p) {
          cost = std::max(cost, tables[static_cast<std::size_t>(p)]
                                      [static_cast<std::size_t>(
                                          s * s_count + c)]);
        }
        if (cost < pick_cost || (cost == pick_cost && c < pick)) {
          pick_cost = cost;
          pick = c;
        }
      }
      current[static_cast<std::size_t>(s)] = pick;
    }

    std::vector<int> used(static_cast<std::size_t>(s_count), 0);
    int distinct = 0;
    for (int c : current) {
      if (used[static_cast<std::size_t>(c)]++ == 0) {
        ++distinct;
      }
    }
    std::vector<double> sums(static_cast<std::size_t>(family_size), 0.0);
    for (int p = 0; p < family_size; ++p) {
      for (long long s = 0; s < s_count; ++s) {
        sums[static_cast<std::size_t>(p)] +=
            tables[static_cast<std::size_t>(p)][static_cast<std::size_t>(
                s * s_count + current[static_cast<std::size_t>(s)])];
      }
    }

    bool improved = true;
    while (improved) {
      improved = false;
      for (long long s = 0; s < s_count; ++s) {
        const int c0 = current[static_cast<std::size_t>(s)];
        double cur_value = *std::max_element(sums.begin(), sums.end());
        int best_c = c0;
        double best_move = cur_value;
        for (long long c = 0; c < s_count; ++c) {
          if (c == c0) {
            continue;
          }
          const int new_distinct =
              distinct - (used[static_cast<std::size_t>(c0)] == 1 ? 1 : 0) +
              (used[static_cast<std::size_t>(c)] == 0 ? 1 : 0);
          if (new_distinct > m_max) {
            continue;
          }
          double value = 0.0;
          for (int p = 0; p < family_size; ++p) {
            const auto& t = tables[static_cast<std::size_t>(p)];
            value = std::max(
                value, sums[static_cast<std::size_t>(p)] -
                           t[static_cast<std::size_t>(s * s_count + c0)] +
                           t[static_cast<std::size_t>(s * s_count + c)]);
          }
          if (value < best_move) {
            best_move = value;
            best_c = static_cast<int>(c);
          }
        }
        if (best_c != c0) {
          for (int p = 0; p < family_size; ++p) {
            const auto& t = tables[static_cast<std::size_t>(p)];
            sums[static_cast<std::size_t>(p)] +=
                t[static_cast<std::size_t>(s * s_count + best_c)] -
                t[static_cast<std::size_t>(s * s_count + c0)];
          }
          if (--used[static_cast<std::size_t>(c0)] == 0) {
            --distinct;
          }
          if (used[static_cast<std::size_t>(best_c)]++ == 0) {
            ++distinct;
          }
          current[static_cast<std::size_t>(s)] = best_c;
          improved = true;
        }
      }
    }

    // exact recompute; incremental sums drift after many moves
    double value = 0.0;
    for (int p = 0; p < family_size; ++p) {
      double sum = 0.0;
      for (long long s = 0; s < s_count; ++s) {
        sum += tables[static_cast<std::size_t>(p)][static_cast<std::size_t>(
            s * s_count + current[static_cast<std::size_t>(s)])];
      }
      value = std::max(value, sum);
    }
    if (value < best_value ||
        (value == best_value && current < best_ranks)) {
      best_value = value;
      best_ranks = current;
    }
  }

  return result_from_ranks(n, rate, family, best_ranks, tables, false,
                           static_cast<long long>(restarts));
}

int encode_type2(std::span<const int> y_seq, const QuantizerMap& q) {
  if (static_cast<int>(y_seq.size()) != q.n) {
    throw std::invalid_argument("encode_type2: sequence length != n");
  }
  return q.assignment[static_cast<std::size_t>(
      rank_of_sequence(y_seq, q.y_size))];
}

Type2Learned learn_type2(int j, std::span<const int> x_seq,
                         const QuantizerMap& q,
                         const DistributionFamily& family,
                         const FunctionClass& f_class) {
  if (j < 0 || j >= q.codebook_size()) {
    throw std::invalid_argument("learn_type2: codeword index out of range");
  }
  if (static_cast<int>(x_seq.size()) != q.n) {
    throw std::invalid_argument("learn_type2: input length != n");
  }
  const auto& cw = q.codeword(j);
  std::vector<std::pair<int, int>> pairs;
  pairs.reserve(x_seq.size());
  for (int i = 0; i < q.n; ++i) {
    pairs.emplace_back(x_seq[static_cast<std::size_t>(i)],
                       cw[static_cast<std::size_t>(i)]);
  }
  const Matrix freq =
      empirical(pairs, family.x_size(), family.y_size()).frequencies();
  int p_hat = 0;
  double best = std::numeric_limits<double>::infinity();
  for (int p = 0; p < family.size(); ++p) {
    const double dist = f_norm_diff(
        freq, family.members[static_cast<std::size_t>(p)].probs, f_class);
    if (dist < best) {
      best = dist;
      p_hat = p;
    }
  }
  const int f = bayes_loss(f_class,
                           family.members[static_cast<std::size_t>(p_hat)])
                    .f_star_index;
  return Type2Learned{p_hat, f};
}

TrialRecord type2_trial(std::span<const std::pair<int, int>> sample,
                        const QuantizerMap& q,
                        const DistributionFamily& family,
                        const FunctionClass& f_class, const JointPmf& true_p) {
  if (static_cast<int>(sample.size()) != q.n) {
    throw std::invalid_argument("type2_trial: sample length != n");
  }
  std::vector<int> x_seq;
  std::vector<int> y_seq;
  x_seq.reserve(sample.size());
  y_seq.reserve(sample.size());
  for (const auto& [x, y] : sample) {
    x_seq.push_back(x);
    y_seq.push_back(y);
  }
  TrialRecord rec;
  rec.misspecified = family.index_of(true_p) < 0;
  rec.encoded_index = encode_type2(y_seq, q);
  const Type2Learned learned =
      learn_type2(rec.encoded_index, x_seq, q, family, f_class);
  rec.learned_f = learned.f_index;
  rec.loss = expected_loss(rec.learned_f, f_class, true_p);
  const double l_star = bayes_loss(f_class, true_p).l_star;
  rec.excess = rec.loss - l_star;

  const auto& cw = q.codeword(rec.encoded_index);
  CountMatrix counts = CountMatrix::Zero(family.x_size(), family.y_size());
  for (int i = 0; i < q.n; ++i) {
    counts(x_seq[static_cast<std::size_t>(i)],
           cw[static_cast<std::size_t>(i)]) += 1;
  }
  const Matrix freq = counts.cast<double>() / static_cast<double>(q.n);
  rec.bound = 4.0 * f_norm_diff(true_p.probs, freq, f_class);
  rec.within_bound = rec.loss <= l_star + rec.bound + kIneqTol;
  return rec;
}

}  // namespace rcl
