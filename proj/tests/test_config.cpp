#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <string>

#include "rcl/config.hpp"
#include "rcl/errors.hpp"

using namespace rcl;

namespace {

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& contents) {
    path = std::string(std::tmpnam(nullptr)) + ".json";
    std::ofstream out(path, std::ios::binary);
    out << contents;
  }
  ~TempFile() { std::remove(path.c_str()); }
};

constexpr const char* kBase = R"({
  "seed": 7,
  "alphabet": {"x_size": 2, "y_size": 2},
  "family": [[["2/5", "1/10"], [0.1, "0.4"]]],
  "function_class": {"type": "classification_all"}
})";

}  // namespace

TEST_CASE("fnv1a64 known vectors") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(to_hex16(fnv1a64("")) == "cbf29ce484222325");
}

TEST_CASE("g12 formatting") {
  CHECK(format_g12(0.0) == "0");
  CHECK(format_g12(0.5) == "0.5");
  CHECK(format_g12(1.0 / 3.0) == "0.333333333333");
  CHECK(format_g12(123456789012345.0) == "1.23456789012e+14");
}

TEST_CASE("config parsing with rational entries") {
  TempFile file(kBase);
  const RunConfig config = load_config(file.path);
  CHECK(config.seed == 7);
  CHECK(config.x_size == 2);
  CHECK(config.family.size() == 1);
  CHECK(config.family.members[0].probs(0, 0) == doctest::Approx(0.4));
  CHECK(config.family.members[0].probs(0, 1) == doctest::Approx(0.1));
  CHECK(config.f_class.size() == 4);  // all maps {0,1} -> {0,1}
  CHECK(config.digest.size() == 16);

  // digest depends only on the bytes
  TempFile same(kBase);
  CHECK(load_config(same.path).digest == config.digest);
}

TEST_CASE("function class variants parse") {
  TempFile explicit_class(R"({
    "seed": 1,
    "alphabet": {"x_size": 2, "y_size": 2},
    "family": [[[0.25, 0.25], [0.25, 0.25]]],
    "function_class": {
      "type": "explicit",
      "bound": 2.0,
      "values": [[[0.0, 1.0], [2.0, 0.5]]]
    }
  })");
  const RunConfig a = load_config(explicit_class.path);
  CHECK(a.f_class.size() == 1);
  CHECK(a.f_class.bound_b == 2.0);
  CHECK(a.f_class.values[0](1, 0) == 2.0);

  TempFile regression(R"({
    "seed": 1,
    "alphabet": {"x_size": 2, "y_size": 2},
    "family": [[[0.25, 0.25], [0.25, 0.25]]],
    "function_class": {
      "type": "regression",
      "estimators": [[0.0, 1.0], [0.5, 0.5]],
      "y_values": [0.0, 1.0]
    }
  })");
  const RunConfig b = load_config(regression.path);
  CHECK(b.f_class.size() == 2);
  CHECK(b.f_class.values[0](0, 1) == doctest::Approx(1.0));

  TempFile classifiers(R"({
    "seed": 1,
    "alphabet": {"x_size": 2, "y_size": 2},
    "family": [[[0.25, 0.25], [0.25, 0.25]]],
    "function_class": {"type": "classification", "classifiers": [[0, 1]]}
  })");
  CHECK(load_config(classifiers.path).f_class.size() == 1);

  TempFile binary(R"({
    "seed": 1,
    "alphabet": {"x_size": 2, "y_size": 2},
    "family": [[[0.25, 0.25], [0.25, 0.25]]],
    "function_class": {"type": "binary_losses_all"}
  })");
  CHECK(load_config(binary.path).f_class.size() == 16);
}

TEST_CASE("config error paths") {
  TempFile malformed("{ nope");
  CHECK_THROWS_AS(load_config(malformed.path), ConfigError);

  TempFile negative(R"({
    "seed": 1,
    "alphabet": {"x_size": 2, "y_size": 2},
    "family": [[[-0.1, 0.35], [0.35, 0.4]]],
    "function_class": {"type": "classification_all"}
  })");
  CHECK_THROWS_AS(load_config(negative.path), ConfigError);

  TempFile unnormalized(R"({
    "seed": 1,
    "alphabet": {"x_size": 2, "y_size": 2},
    "family": [[[0.5, 0.5], [0.5, 0.5]]],
    "function_class": {"type": "classification_all"}
  })");
  CHECK_THROWS_AS(load_config(unnormalized.path), ConfigError);

  TempFile no_seed(R"({
    "alphabet": {"x_size": 2, "y_size": 2},
    "family": [[[0.25, 0.25], [0.25, 0.25]]],
    "function_class": {"type": "classification_all"}
  })");
  CHECK_THROWS_AS(load_config(no_seed.path), ConfigError);

  TempFile bad_rational(R"({
    "seed": 1,
    "alphabet": {"x_size": 2, "y_size": 2},
    "family": [[["1/0", "0.25"], [0.25, 0.5]]],
    "function_class": {"type": "classification_all"}
  })");
  CHECK_THROWS_AS(load_config(bad_rational.path), ConfigError);

  CHECK_THROWS_AS(load_config("/nonexistent/path.json"), IoError);
}

TEST_CASE("section field accessors raise named errors") {
  TempFile file(kBase);
  const RunConfig config = load_config(file.path);
  CHECK_THROWS_WITH_AS(require_section(config, "type2"),
                       doctest::Contains("type2"), ConfigError);
  nlohmann::json section = {{"n", 3}};
  CHECK(require_int(section, "n", "dhat") == 3);
  CHECK_THROWS_AS(require_double(section, "rate", "dhat"), ConfigError);
  CHECK_THROWS_AS(require_int_list(section, "n_grid", "dhat"), ConfigError);
  CHECK(optional_int(section, "restarts", 16) == 16);
  CHECK(optional_double(section, "tol", 0.5) == 0.5);
  CHECK(optional_string(section, "mode", "exact") == "exact");
}
