#pragma once

// Run configuration: a JSON document, validated strictly (unknown keys are
// rejected). See README.md for the schema.

#include "hprox/problems.hpp"
#include "hprox/prox.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hprox {

struct ProblemSpec {
  /// Builtin name, or "inline" when `inline_spec` is set.
  std::string builtin = "paper_example";
  std::size_t n = 2;
  double epsilon = problems::kDefaultEpsilon;
  std::optional<problems::InlineSpec> inline_spec;
};

struct RunConfig {
  ProblemSpec problem;
  std::optional<std::vector<double>> start_point;
  /// nullopt means "auto": 1.5 * L̂ clipped to lambda_bar.
  std::optional<double> lambda;
  double lambda_bar = 1e6;
  double outer_tol = 1e-8;
  double inner_tol = 1e-10;
  int max_outer = 10000;
  int max_inner = 500;
  std::uint64_t seed = 42;
  std::optional<std::vector<double>> level_ref;
  LevelGuard level_guard = LevelGuard::Error;
  std::string output_dir;
};

/// Parses and validates; ConfigError messages name the offending field, or
/// carry line/column for syntax errors.
RunConfig parse_config(std::string_view text, const std::string& source = "<config>");
RunConfig load_config(const std::filesystem::path& path);

problems::Problem make_problem(const ProblemSpec& spec);

} // namespace hprox
