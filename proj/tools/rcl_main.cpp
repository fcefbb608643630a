// Command-line front end: one verb per quantity, JSON config in, CSV out.

#include <chrono>
#include <cstdint>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rcl/config.hpp"
#include "rcl/covering.hpp"
#include "rcl/errors.hpp"
#include "rcl/itbounds.hpp"
#include "rcl/losses.hpp"
#include "rcl/montecarlo.hpp"
#include "rcl/type1.hpp"
#include "rcl/type2.hpp"

namespace {

constexpr const char* kToolVersion = "1.0.0";

struct CommonArgs {
  std::string config_path;
  std::string out_path;
  std::uint64_t seed_override = 0;
  bool seed_given = false;
  int threads = 1;
  bool json_mirror = false;
};

std::string iso_utc(std::chrono::system_clock::time_point tp) {
  const std::time_t t = std::chrono::system_clock::to_time_t(tp);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return std::string(buf);
}

// Accumulates formatted rows, then writes the CSV (and optional JSON mirror
// with the same cells) plus a run manifest. Only the CSV/JSON bytes are
// deterministic; the manifest carries wall-clock timestamps.
class ResultWriter {
 public:
  ResultWriter(const rcl::RunConfig& config, std::vector<std::string> columns)
      : digest_(config.digest), seed_(config.seed),
        columns_(std::move(columns)),
        start_(std::chrono::system_clock::now()) {}

  void add_row(std::vector<std::string> cells) {
    rows_.push_back(std::move(cells));
  }

  void write(const std::string& path, bool mirror) const {
    {
      std::ofstream out(path, std::ios::binary);
      if (!out) {
        throw rcl::IoError("cannot write output: " + path);
      }
      out << "# config_digest=" << digest_ << " seed=" << seed_ << "\n";
      out << join(columns_) << "\n";
      for (const auto& row : rows_) {
        out << join(row) << "\n";
      }
      if (!out) {
        throw rcl::IoError("write failed: " + path);
      }
    }
    if (mirror) {
      nlohmann::json j;
      j["config_digest"] = digest_;
      j["seed"] = seed_;
      j["columns"] = columns_;
      j["rows"] = rows_;
      std::ofstream out(path + ".json", std::ios::binary);
      if (!out) {
        throw rcl::IoError("cannot write output: " + path + ".json");
      }
      out << j.dump(2) << "\n";
    }
    // run manifest: reproducibility metadata, not part of the stable output
    nlohmann::json manifest;
    manifest["config_digest"] = digest_;
    manifest["tool_version"] = kToolVersion;
    manifest["seed"] = seed_;
    manifest["started"] = iso_utc(start_);
    manifest["finished"] = iso_utc(std::chrono::system_clock::now());
    manifest["outputs"] =
        mirror ? std::vector<std::string>{path, path + ".json"}
               : std::vector<std::string>{path};
    std::ofstream mout(path + ".manifest.json", std::ios::binary);
    if (mout) {
      mout << manifest.dump(2) << "\n";
    }
  }

 private:
  static std::string join(const std::vector<std::string>& cells) {
    std::string line;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i > 0) {
        line += ',';
      }
      line += cells[i];
    }
    return line;
  }

  std::string digest_;
  std::uint64_t seed_;
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
  std::chrono::system_clock::time_point start_;
};

using rcl::format_g12;

std::string fmt_int(long long v) { return std::to_string(v); }

rcl::CoverMode cover_mode_from(const std::string& name,
                               const std::string& where) {
  if (name == "exact") {
    return rcl::CoverMode::exact;
  }
  if (name == "greedy") {
    return rcl::CoverMode::greedy;
  }
  throw rcl::ConfigError(where + ": mode must be 'exact' or 'greedy'");
}

rcl::QuantMode quant_mode_from(const std::string& name,
                               const std::string& where) {
  if (name == "exact") {
    return rcl::QuantMode::exact;
  }
  if (name == "greedy") {
    return rcl::QuantMode::greedy;
  }
  throw rcl::ConfigError(where + ": quantizer must be 'exact' or 'greedy'");
}

void write_curve(const rcl::RunConfig& config, const CommonArgs& args,
                 const std::vector<rcl::CurvePoint>& points) {
  ResultWriter writer(config,
                      {"n", "true_p_index", "mean_excess", "std_err",
                       "mean_bound", "exceedance_prob", "violations"});
  for (const auto& p : points) {
    writer.add_row({fmt_int(p.n), fmt_int(p.true_p_index),
                    format_g12(p.mean_excess), format_g12(p.std_err),
                    format_g12(p.mean_bound), format_g12(p.exceedance_prob),
                    fmt_int(p.violations)});
  }
  writer.write(args.out_path, args.json_mirror);
}

rcl::ExperimentConfig experiment_from(const rcl::RunConfig& config,
                                      const CommonArgs& args,
                                      const nlohmann::json& section,
                                      const std::string& where) {
  rcl::ExperimentConfig ec;
  ec.family = config.family;
  ec.f_class = config.f_class;
  ec.n_grid = rcl::require_int_list(section, "n_grid", where);
  ec.trials = rcl::require_int(section, "trials", where);
  ec.seed = config.seed;
  ec.threads = args.threads;
  if (section.contains("pac_epsilon")) {
    ec.pac_epsilon = rcl::parse_number(section["pac_epsilon"],
                                       where + ".pac_epsilon");
  }
  return ec;
}

void cmd_type1(const rcl::RunConfig& config, const CommonArgs& args) {
  const auto& sec = rcl::require_section(config, "type1");
  rcl::ExperimentConfig ec = experiment_from(config, args, sec, "type1");
  ec.scheme = rcl::SchemeType::type1;
  ec.epsilon_c = rcl::optional_double(sec, "epsilon_c", 1.0);
  ec.net_mode =
      cover_mode_from(rcl::optional_string(sec, "net_mode", "exact"), "type1");
  write_curve(config, args, rcl::run_experiment(ec));
}

void cmd_type2(const rcl::RunConfig& config, const CommonArgs& args) {
  const auto& sec = rcl::require_section(config, "type2");
  rcl::ExperimentConfig ec = experiment_from(config, args, sec, "type2");
  ec.scheme = rcl::SchemeType::type2;
  ec.rate = rcl::require_double(sec, "rate", "type2");
  ec.quant_mode = quant_mode_from(
      rcl::optional_string(sec, "quantizer", "exact"), "type2");
  ec.restarts = rcl::optional_int(sec, "restarts", 16);
  write_curve(config, args, rcl::run_experiment(ec));
}

void cmd_dhat(const rcl::RunConfig& config, const CommonArgs& args) {
  const auto& sec = rcl::require_section(config, "dhat");
  const int n = rcl::require_int(sec, "n", "dhat");
  const double rate = rcl::require_double(sec, "rate", "dhat");
  const rcl::QuantMode mode =
      quant_mode_from(rcl::optional_string(sec, "mode", "exact"), "dhat");
  const rcl::DhatResult res =
      mode == rcl::QuantMode::exact
          ? rcl::optimal_quantizer(n, rate, config.family, config.f_class)
          : rcl::greedy_quantizer(n, rate, config.family, config.f_class,
                                  rcl::optional_int(sec, "restarts", 16),
                                  config.seed);

  ResultWriter writer(config, {"n", "rate", "codebook_size", "p_index",
                               "distortion", "assignment"});
  for (std::size_t p = 0; p < res.per_p_distortion.size(); ++p) {
    writer.add_row({fmt_int(n), format_g12(rate),
                    fmt_int(res.quantizer.codebook_size()),
                    fmt_int(static_cast<long long>(p)),
                    format_g12(res.per_p_distortion[p]), ""});
  }
  std::string assignment;
  for (std::size_t s = 0; s < res.quantizer.assignment.size(); ++s) {
    if (s > 0) {
      assignment += ';';
    }
    assignment += std::to_string(rcl::rank_of_sequence(
        res.quantizer.codeword(res.quantizer.assignment[s]),
        res.quantizer.y_size));
  }
  writer.add_row({fmt_int(n), format_g12(rate),
                  fmt_int(res.quantizer.codebook_size()), "-1",
                  format_g12(res.value), assignment});
  writer.write(args.out_path, args.json_mirror);
}

void cmd_dks(const rcl::RunConfig& config, const CommonArgs& args) {
  const auto& sec = rcl::require_section(config, "dks");
  const std::vector<double> rates =
      rcl::require_double_list(sec, "rates", "dks");
  rcl::DksOptions options;
  options.grid_resolution = rcl::optional_int(sec, "grid_resolution", 50);
  options.refine_tol = rcl::optional_double(sec, "refine_tol", 1e-4);

  ResultWriter writer(config, {"p_index", "rate", "value", "achieved_mi",
                               "grid_points", "refine_steps"});
  for (int p = 0; p < config.family.size(); ++p) {
    for (double rate : rates) {
      const rcl::DksResult res =
          rcl::d_ks(config.family.members[static_cast<std::size_t>(p)],
                    config.f_class, rate, options);
      writer.add_row({fmt_int(p), format_g12(rate), format_g12(res.value),
                      format_g12(res.achieved_mi), fmt_int(res.grid_points),
                      fmt_int(res.refine_steps)});
    }
  }
  writer.write(args.out_path, args.json_mirror);
}

void cmd_eq6(const rcl::RunConfig& config, const CommonArgs& args) {
  const auto& sec = rcl::require_section(config, "eq6");
  const int n = rcl::require_int(sec, "n", "eq6");
  const double rate = rcl::require_double(sec, "rate", "eq6");
  const rcl::SingleLetterResult single =
      rcl::single_letter_bound(n, rate, config.family, config.f_class);
  const rcl::DhatResult dhat =
      rcl::optimal_quantizer(n, rate, config.family, config.f_class);

  ResultWriter writer(config, {"n", "rate", "value", "dhat", "gap"});
  writer.add_row({fmt_int(n), format_g12(rate), format_g12(single.value),
                  format_g12(dhat.value),
                  format_g12(single.value - dhat.value)});
  writer.write(args.out_path, args.json_mirror);
}

void cmd_eq7(const rcl::RunConfig& config, const CommonArgs& args) {
  const auto& sec = rcl::require_section(config, "eq7");
  rcl::GridBoundSpec spec;
  spec.alpha_list = rcl::require_double_list(sec, "alpha_list", "eq7");
  spec.delta_list = rcl::require_double_list(sec, "delta_list", "eq7");
  spec.p_prime_resolution = rcl::optional_int(sec, "p_prime_resolution", 20);
  spec.channel_resolution = rcl::optional_int(sec, "channel_resolution", 10);
  const double rate = rcl::require_double(sec, "rate", "eq7");
  const rcl::GridBoundResult res =
      rcl::grid_upper_bound(config.family, config.f_class, rate, spec);

  ResultWriter writer(config, {"kind", "alpha", "delta", "value"});
  for (const auto& cell : res.cells) {
    writer.add_row({"grid", format_g12(cell.alpha), format_g12(cell.delta),
                    format_g12(cell.value)});
  }
  writer.add_row({"overall", format_g12(res.alpha_at),
                  format_g12(res.delta_at), format_g12(res.value)});
  writer.write(args.out_path, args.json_mirror);
}

void cmd_gc(const rcl::RunConfig& config, const CommonArgs& args) {
  const auto& sec = rcl::require_section(config, "gc");
  const int p_index = rcl::optional_int(sec, "p_index", 0);
  if (p_index < 0 || p_index >= config.family.size()) {
    throw rcl::ConfigError("gc.p_index out of range");
  }
  const std::vector<int> n_grid = rcl::require_int_list(sec, "n_grid", "gc");
  const int trials = rcl::require_int(sec, "trials", "gc");
  const auto points =
      rcl::gc_decay(config.family.members[static_cast<std::size_t>(p_index)],
                    config.f_class, n_grid, trials, config.seed, args.threads);

  ResultWriter writer(config, {"n", "mean_fnorm", "std_err"});
  for (const auto& p : points) {
    writer.add_row({fmt_int(p.n), format_g12(p.mean_fnorm),
                    format_g12(p.std_err)});
  }
  writer.write(args.out_path, args.json_mirror);
}

void cmd_cover(const rcl::RunConfig& config, const CommonArgs& args) {
  const auto& sec = rcl::require_section(config, "cover");
  const std::vector<double> eps_list =
      rcl::require_double_list(sec, "eps_list", "cover");
  const std::string mode_name = rcl::optional_string(sec, "mode", "exact");
  const rcl::CoverMode mode = cover_mode_from(mode_name, "cover");

  ResultWriter writer(config, {"eps", "mode", "count", "certified_radius",
                               "members"});
  for (double eps : eps_list) {
    const rcl::CoveringResult res =
        rcl::covering_number(config.family, eps, config.f_class, mode);
    std::string members;
    for (std::size_t i = 0; i < res.net.member_indices.size(); ++i) {
      if (i > 0) {
        members += ';';
      }
      members += std::to_string(res.net.member_indices[i]);
    }
    writer.add_row({format_g12(eps), mode_name, fmt_int(res.count),
                    format_g12(res.net.certified_radius), members});
  }
  writer.write(args.out_path, args.json_mirror);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite-alphabet simulator for statistical learning under "
               "communication constraints"};
  app.require_subcommand(1);

  CommonArgs args;
  const std::vector<std::pair<std::string, std::string>> verbs = {
      {"type1", "excess-loss curve for the full-observation scheme"},
      {"type2", "excess-loss curve for the output-only-observation scheme"},
      {"dhat", "operational distortion-rate value via quantizer search"},
      {"dks", "information-theoretic distortion-rate lower-bound values"},
      {"eq6", "single-letter upper bound on the operational distortion"},
      {"eq7", "grid value of the limiting-distortion upper-bound expression"},
      {"gc", "uniform-convergence decay of the empirical measure"},
      {"cover", "covering numbers and eps-nets of the family"},
  };
  for (const auto& [name, desc] : verbs) {
    CLI::App* sub = app.add_subcommand(name, desc);
    sub->add_option("--config", args.config_path, "JSON run configuration")
        ->required();
    sub->add_option("--out", args.out_path, "CSV output path")->required();
    sub->add_option("--seed", args.seed_override, "override the config seed")
        ->each([&args](const std::string&) { args.seed_given = true; });
    sub->add_option("--threads", args.threads, "worker threads");
    sub->add_flag("--json", args.json_mirror,
                  "also write a JSON mirror next to the CSV");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    rcl::RunConfig config = rcl::load_config(args.config_path);
    if (args.seed_given) {
      config.seed = args.seed_override;
    }
    if (args.threads < 1) {
      throw rcl::ConfigError("--threads must be >= 1");
    }
    const std::string verb = app.get_subcommands().front()->get_name();
    try {
      if (verb == "type1") {
        cmd_type1(config, args);
      } else if (verb == "type2") {
        cmd_type2(config, args);
      } else if (verb == "dhat") {
        cmd_dhat(config, args);
      } else if (verb == "dks") {
        cmd_dks(config, args);
      } else if (verb == "eq6") {
        cmd_eq6(config, args);
      } else if (verb == "eq7") {
        cmd_eq7(config, args);
      } else if (verb == "gc") {
        cmd_gc(config, args);
      } else {
        cmd_cover(config, args);
      }
    } catch (const std::invalid_argument& e) {
      // parameter-level failures are configuration mistakes
      throw rcl::ConfigError(e.what());
    }
    return 0;
  } catch (const rcl::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const rcl::GuardError& e) {
    std::cerr << "guard exceeded: " << e.what() << "\n";
    return 3;
  } catch (const rcl::IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
