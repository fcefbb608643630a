#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "rcl/types.hpp"

namespace rcl {

/// A parsed run configuration: the shared pieces (alphabet, family, function
/// class, seed) plus the raw document for per-command sections.
struct RunConfig {
  int x_size = 0;
  int y_size = 0;
  DistributionFamily family;
  FunctionClass f_class;
  std::uint64_t seed = 0;
  nlohmann::json raw;
  std::string digest;  // FNV-1a 64 of the config file bytes, 16 hex chars
};

RunConfig load_config(const std::string& path);

/// FNV-1a 64-bit over raw bytes; stable across platforms.
std::uint64_t fnv1a64(std::string_view bytes);
std::string to_hex16(std::uint64_t v);

/// Number formatting used by every CSV cell: 12 significant digits.
std::string format_g12(double v);

/// Accepts a JSON number or a "p/q" rational string.
double parse_number(const nlohmann::json& v, const std::string& where);

// Field accessors that raise ConfigError naming the missing/bad field.
const nlohmann::json& require_section(const RunConfig& config,
                                      const std::string& name);
double require_double(const nlohmann::json& section, const std::string& field,
                      const std::string& where);
int require_int(const nlohmann::json& section, const std::string& field,
                const std::string& where);
std::vector<int> require_int_list(const nlohmann::json& section,
                                  const std::string& field,
                                  const std::string& where);
std::vector<double> require_double_list(const nlohmann::json& section,
                                        const std::string& field,
                                        const std::string& where);
std::string optional_string(const nlohmann::json& section,
                            const std::string& field,
                            const std::string& fallback);
double optional_double(const nlohmann::json& section, const std::string& field,
                       double fallback);
int optional_int(const nlohmann::json& section, const std::string& field,
                 int fallback);

}  // namespace rcl
