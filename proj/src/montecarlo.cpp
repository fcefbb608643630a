#include "rcl/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <thread>

#include "rcl/errors.hpp"
#include "rcl/losses.hpp"
#include "rcl/measures.hpp"

namespace rcl {

namespace {

void parallel_for(int total, int threads,
                  const std::function<void(int)>& body) {
  threads = std::max(1, std::min(threads, total));
  if (threads == 1) {
    for (int i = 0; i < total; ++i) {
      body(i);
    }
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      while (true) {
        const int i = next.fetch_add(1);
        if (i >= total) {
          break;
        }
        body(i);
      }
    });
  }
  for (auto& th : pool) {
    th.join();
  }
}

// Neumaier compensated sum over a fixed index order; the aggregation is the
// same no matter how trials were scheduled.
double compensated_sum(const std::vector<double>& xs) {
  double sum = 0.0;
  double comp = 0.0;
  for (double x : xs) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
      comp += (sum - t) + x;
    } else {
      comp += (x - t) + sum;
    }
    sum = t;
  }
  return sum + comp;
}

CurvePoint aggregate(int n, int member, const std::vector<TrialRecord>& recs,
                     std::optional<double> pac_epsilon) {
  const int trials = static_cast<int>(recs.size());
  std::vector<double> excesses(recs.size());
  std::vector<double> bounds(recs.size());
  long violations = 0;
  long exceed = 0;
  for (std::size_t i = 0; i < recs.size(); ++i) {
    if (recs[i].excess < -kIneqTol) {
      throw std::logic_error("trial excess below zero");
    }
    excesses[i] = recs[i].excess;
    bounds[i] = recs[i].bound;
    if (!recs[i].within_bound) {
      ++violations;
    }
    if (pac_epsilon && recs[i].excess > *pac_epsilon) {
      ++exceed;
    }
  }
  const double mean = compensated_sum(excesses) / trials;
  std::vector<double> sq(recs.size());
  for (std::size_t i = 0; i < recs.size(); ++i) {
    const double d = excesses[i] - mean;
    sq[i] = d * d;
  }
  const double var =
      trials > 1 ? compensated_sum(sq) / (trials - 1) : 0.0;
  CurvePoint point;
  point.n = n;
  point.true_p_index = member;
  point.mean_excess = mean;
  point.std_err = std::sqrt(var / trials);
  point.mean_bound = compensated_sum(bounds) / trials;
  point.exceedance_prob =
      pac_epsilon ? static_cast<double>(exceed) / trials : 0.0;
  point.violations = violations;
  point.trials = trials;
  return point;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (n_grid.empty()) {
    throw std::invalid_argument("ExperimentConfig: empty n_grid");
  }
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    if (n_grid[i] <= 0 || (i > 0 && n_grid[i] <= n_grid[i - 1])) {
      throw std::invalid_argument(
          "ExperimentConfig: n_grid must be positive and strictly increasing");
    }
  }
  if (trials < 1) {
    throw std::invalid_argument("ExperimentConfig: trials must be >= 1");
  }
  if (threads < 1) {
    throw std::invalid_argument("ExperimentConfig: threads must be >= 1");
  }
  if (scheme == SchemeType::type2 && rate < 0.0) {
    throw std::invalid_argument("ExperimentConfig: rate must be >= 0");
  }
  if (pac_epsilon && *pac_epsilon <= 0.0) {
    throw std::invalid_argument("ExperimentConfig: pac_epsilon must be > 0");
  }
}

std::vector<CurvePoint> run_experiment(const ExperimentConfig& config) {
  config.validate();
  std::vector<CurvePoint> points;

  for (std::size_t ni = 0; ni < config.n_grid.size(); ++ni) {
    const int n = config.n_grid[ni];

    Type1Scheme scheme1;
    QuantizerMap quantizer;
    if (config.scheme == SchemeType::type1) {
      scheme1 = Type1Scheme::build(config.family, config.f_class,
                                   epsilon_schedule(config.epsilon_c, n),
                                   config.net_mode);
    } else {
      try {
        quantizer =
            (config.quant_mode == QuantMode::exact)
                ? optimal_quantizer(n, config.rate, config.family,
                                    config.f_class, config.budget)
                      .quantizer
                : greedy_quantizer(n, config.rate, config.family,
                                   config.f_class, config.restarts,
                                   config.seed, config.budget)
                      .quantizer;
      } catch (const GuardError& e) {
        throw GuardError("n=" + std::to_string(n) + ": " + e.what());
      }
    }

    std::size_t worst = 0;
    std::vector<CurvePoint> member_points;
    for (int mi = 0; mi < config.family.size(); ++mi) {
      const JointPmf& true_p =
          config.family.members[static_cast<std::size_t>(mi)];
      std::vector<TrialRecord> recs(static_cast<std::size_t>(config.trials));
      parallel_for(config.trials, config.threads, [&](int t) {
        RandomStream stream(
            config.seed,
            substream(static_cast<std::uint64_t>(ni),
                      static_cast<std::uint64_t>(mi),
                      static_cast<std::uint64_t>(t)));
        const auto sample = sample_training(true_p, n, stream);
        recs[static_cast<std::size_t>(t)] =
            (config.scheme == SchemeType::type1)
                ? type1_trial(sample, scheme1, true_p)
                : type2_trial(sample, quantizer, config.family,
                              config.f_class, true_p);
      });
      member_points.push_back(aggregate(n, mi, recs, config.pac_epsilon));
      if (member_points.back().mean_excess >
          member_points[worst].mean_excess) {
        worst = member_points.size() - 1;
      }
    }
    CurvePoint worst_point = member_points[worst];
    worst_point.true_p_index = -1;
    points.insert(points.end(), member_points.begin(), member_points.end());
    points.push_back(worst_point);
  }
  return points;
}

std::vector<GcPoint> gc_decay(const JointPmf& p, const FunctionClass& f_class,
                              const std::vector<int>& n_grid, int trials,
                              std::uint64_t seed, int threads) {
  if (trials < 1) {
    throw std::invalid_argument("gc_decay: trials must be >= 1");
  }
  std::vector<GcPoint> out;
  for (std::size_t ni = 0; ni < n_grid.size(); ++ni) {
    const int n = n_grid[ni];
    if (n <= 0) {
      throw std::invalid_argument("gc_decay: n must be positive");
    }
    std::vector<double> values(static_cast<std::size_t>(trials));
    parallel_for(trials, threads, [&](int t) {
      RandomStream stream(seed,
                          substream(static_cast<std::uint64_t>(ni),
                                    static_cast<std::uint64_t>(t)));
      const auto sample = sample_training(p, n, stream);
      const EmpiricalMeasure emp =
          empirical(sample, p.x_size(), p.y_size());
      values[static_cast<std::size_t>(t)] =
          f_norm_diff(emp.frequencies(), p.probs, f_class);
    });
    double sum = 0.0;
    for (double v : values) {
      sum += v;
    }
    const double mean = sum / trials;
    double var = 0.0;
    for (double v : values) {
      var += (v - mean) * (v - mean);
    }
    var = trials > 1 ? var / (trials - 1) : 0.0;
    out.push_back({n, mean, std::sqrt(var / trials)});
  }
  return out;
}

std::vector<std::pair<int, double>> pac_exceedance(
    const ExperimentConfig& config) {
  if (!config.pac_epsilon) {
    throw std::invalid_argument("pac_exceedance: pac_epsilon required");
  }
  const std::vector<CurvePoint> points = run_experiment(config);
  // worst case over the family, per the universal quantifier
  std::vector<std::pair<int, double>> out;
  for (const CurvePoint& point : points) {
    if (point.true_p_index < 0) {
      continue;
    }
    if (out.empty() || out.back().first != point.n) {
      out.emplace_back(point.n, point.exceedance_prob);
    } else {
      out.back().second = std::max(out.back().second, point.exceedance_prob);
    }
  }
  return out;
}

}  // namespace rcl
