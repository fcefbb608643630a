#include "rcl/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "rcl/errors.hpp"
#include "rcl/losses.hpp"

namespace rcl {

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string to_hex16(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(v));
  return std::string(buf);
}

std::string format_g12(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return std::string(buf);
}

double parse_number(const nlohmann::json& v, const std::string& where) {
  if (v.is_number()) {
    return v.get<double>();
  }
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    const auto slash = s.find('/');
    try {
      if (slash == std::string::npos) {
        std::size_t used = 0;
        const double value = std::stod(s, &used);
        if (used != s.size()) {
          throw ConfigError(where + ": malformed number '" + s + "'");
        }
        return value;
      }
      const double num = std::stod(s.substr(0, slash));
      const double den = std::stod(s.substr(slash + 1));
      if (den == 0.0) {
        throw ConfigError(where + ": zero denominator in '" + s + "'");
      }
      return num / den;
    } catch (const std::invalid_argument&) {
      throw ConfigError(where + ": malformed number '" + s + "'");
    } catch (const std::out_of_range&) {
      throw ConfigError(where + ": number out of range '" + s + "'");
    }
  }
  throw ConfigError(where + ": expected a number or 'p/q' string");
}

namespace {

Matrix parse_matrix(const nlohmann::json& v, const std::string& where) {
  if (!v.is_array() || v.empty() || !v.front().is_array()) {
    throw ConfigError(where + ": expected a matrix (array of rows)");
  }
  const std::size_t rows = v.size();
  const std::size_t cols = v.front().size();
  Matrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    if (!v[r].is_array() || v[r].size() != cols) {
      throw ConfigError(where + ": ragged matrix rows");
    }
    for (std::size_t c = 0; c < cols; ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          parse_number(v[r][c], where);
    }
  }
  return m;
}

FunctionClass parse_function_class(const nlohmann::json& spec, int x_size,
                                   int y_size) {
  if (!spec.is_object() || !spec.contains("type")) {
    throw ConfigError("function_class: missing 'type'");
  }
  const std::string type = spec["type"].get<std::string>();
  if (type == "classification_all") {
    return classification_class(all_classifiers(x_size, y_size));
  }
  if (type == "binary_losses_all") {
    return all_binary_losses(x_size, y_size);
  }
  if (type == "classification") {
    if (!spec.contains("classifiers")) {
      throw ConfigError("function_class: missing 'classifiers'");
    }
    std::vector<std::vector<int>> maps;
    for (const auto& g : spec["classifiers"]) {
      maps.push_back(g.get<std::vector<int>>());
    }
    return classification_class(
        ClassifierFamily::from(x_size, y_size, std::move(maps)));
  }
  if (type == "regression") {
    if (!spec.contains("estimators") || !spec.contains("y_values")) {
      throw ConfigError("function_class: regression needs 'estimators' and 'y_values'");
    }
    std::vector<std::vector<double>> g_list;
    for (const auto& g : spec["estimators"]) {
      std::vector<double> row;
      for (const auto& v : g) {
        row.push_back(parse_number(v, "function_class.estimators"));
      }
      g_list.push_back(std::move(row));
    }
    std::vector<double> y_values;
    for (const auto& v : spec["y_values"]) {
      y_values.push_back(parse_number(v, "function_class.y_values"));
    }
    return regression_class(g_list, y_values);
  }
  if (type == "explicit") {
    if (!spec.contains("bound") || !spec.contains("values")) {
      throw ConfigError("function_class: explicit needs 'bound' and 'values'");
    }
    std::vector<Matrix> values;
    for (const auto& f : spec["values"]) {
      values.push_back(parse_matrix(f, "function_class.values"));
    }
    return FunctionClass::from(std::move(values),
                               parse_number(spec["bound"], "function_class.bound"));
  }
  throw ConfigError("function_class: unknown type '" + type + "'");
}

}  // namespace

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open config file: " + path);
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  const std::string bytes = buffer.str();

  RunConfig config;
  config.digest = to_hex16(fnv1a64(bytes));
  try {
    config.raw = nlohmann::json::parse(bytes);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  const nlohmann::json& root = config.raw;
  if (!root.contains("alphabet") || !root["alphabet"].contains("x_size") ||
      !root["alphabet"].contains("y_size")) {
    throw ConfigError("config: missing alphabet.x_size / alphabet.y_size");
  }
  config.x_size = root["alphabet"]["x_size"].get<int>();
  config.y_size = root["alphabet"]["y_size"].get<int>();
  if (!root.contains("seed")) {
    throw ConfigError("config: missing seed");
  }
  config.seed = root["seed"].get<std::uint64_t>();

  if (!root.contains("family") || !root["family"].is_array() ||
      root["family"].empty()) {
    throw ConfigError("config: missing or empty family");
  }
  std::vector<JointPmf> members;
  for (std::size_t i = 0; i < root["family"].size(); ++i) {
    const Matrix m =
        parse_matrix(root["family"][i], "family[" + std::to_string(i) + "]");
    if (m.rows() != config.x_size || m.cols() != config.y_size) {
      throw ConfigError("family[" + std::to_string(i) +
                        "]: dimensions do not match the alphabet");
    }
    try {
      members.push_back(JointPmf::from(m));
    } catch (const std::invalid_argument& e) {
      throw ConfigError("family[" + std::to_string(i) + "]: " + e.what());
    }
  }
  config.family = DistributionFamily::from(std::move(members));

  if (!root.contains("function_class")) {
    throw ConfigError("config: missing function_class");
  }
  config.f_class =
      parse_function_class(root["function_class"], config.x_size,
                           config.y_size);
  return config;
}

const nlohmann::json& require_section(const RunConfig& config,
                                      const std::string& name) {
  if (!config.raw.contains(name) || !config.raw[name].is_object()) {
    throw ConfigError("config: missing section '" + name + "'");
  }
  return config.raw[name];
}

double require_double(const nlohmann::json& section, const std::string& field,
                      const std::string& where) {
  if (!section.contains(field)) {
    throw ConfigError(where + ": missing required field '" + field + "'");
  }
  return parse_number(section[field], where + "." + field);
}

int require_int(const nlohmann::json& section, const std::string& field,
                const std::string& where) {
  if (!section.contains(field) || !section[field].is_number_integer()) {
    throw ConfigError(where + ": missing integer field '" + field + "'");
  }
  return section[field].get<int>();
}

std::vector<int> require_int_list(const nlohmann::json& section,
                                  const std::string& field,
                                  const std::string& where) {
  if (!section.contains(field) || !section[field].is_array() ||
      section[field].empty()) {
    throw ConfigError(where + ": missing nonempty list '" + field + "'");
  }
  return section[field].get<std::vector<int>>();
}

std::vector<double> require_double_list(const nlohmann::json& section,
                                        const std::string& field,
                                        const std::string& where) {
  if (!section.contains(field) || !section[field].is_array() ||
      section[field].empty()) {
    throw ConfigError(where + ": missing nonempty list '" + field + "'");
  }
  std::vector<double> out;
  for (const auto& v : section[field]) {
    out.push_back(parse_number(v, where + "." + field));
  }
  return out;
}

std::string optional_string(const nlohmann::json& section,
                            const std::string& field,
                            const std::string& fallback) {
  if (!section.contains(field)) {
    return fallback;
  }
  return section[field].get<std::string>();
}

double optional_double(const nlohmann::json& section, const std::string& field,
                       double fallback) {
  if (!section.contains(field)) {
    return fallback;
  }
  return parse_number(section[field], field);
}

int optional_int(const nlohmann::json& section, const std::string& field,
                 int fallback) {
  if (!section.contains(field)) {
    return fallback;
  }
  return section[field].get<int>();
}

}  // namespace rcl
