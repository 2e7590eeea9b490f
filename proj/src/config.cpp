#include "hprox/config.hpp"

#include "hprox/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace hprox {

using nlohmann::json;

namespace {

[[noreturn]] void schema_error(const std::string& source, const std::string& field,
                               const std::string& what) {
  throw ConfigError(source + ": field '" + field + "': " + what);
}

void reject_unknown(const json& obj, const std::set<std::string>& allowed,
                    const std::string& source, const std::string& prefix) {
  for (const auto& [key, _] : obj.items())
    if (!allowed.count(key)) schema_error(source, prefix + key, "unknown key");
}

double get_number(const json& j, const std::string& source, const std::string& field) {
  if (!j.is_number()) schema_error(source, field, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) schema_error(source, field, "must be finite");
  return v;
}

double get_positive(const json& j, const std::string& source, const std::string& field) {
  const double v = get_number(j, source, field);
  if (!(v > 0.0)) schema_error(source, field, "must be > 0");
  return v;
}

int get_count(const json& j, const std::string& source, const std::string& field) {
  if (!j.is_number_integer()) schema_error(source, field, "expected an integer");
  const auto v = j.get<long long>();
  if (v < 1 || v > 100000000) schema_error(source, field, "must be in [1, 1e8]");
  return static_cast<int>(v);
}

std::vector<double> get_array(const json& j, const std::string& source,
                              const std::string& field) {
  if (!j.is_array() || j.empty()) schema_error(source, field, "expected a non-empty array");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i)
    out.push_back(get_number(j[i], source, field + "[" + std::to_string(i) + "]"));
  return out;
}

problems::InlineSpec parse_inline(const json& j, const std::string& source) {
  const std::string pre = "problem.inline.";
  if (!j.is_object()) schema_error(source, "problem.inline", "expected an object");
  reject_unknown(j, {"manifold", "dim", "pieces", "domain_lower", "domain_upper", "region", "start"},
                 source, pre);
  problems::InlineSpec spec;
  if (!j.contains("manifold") || !j["manifold"].is_string())
    schema_error(source, pre + "manifold", "required: \"euclidean\" or \"log_positive\"");
  const std::string man = j["manifold"].get<std::string>();
  if (man == "euclidean") {
    spec.geometry = Geometry::Euclidean;
  } else if (man == "log_positive") {
    spec.geometry = Geometry::LogPositive;
  } else {
    schema_error(source, pre + "manifold", "must be \"euclidean\" or \"log_positive\"");
  }
  if (!j.contains("dim")) schema_error(source, pre + "dim", "required");
  spec.dim = static_cast<std::size_t>(get_count(j["dim"], source, pre + "dim"));

  if (!j.contains("pieces") || !j["pieces"].is_array() || j["pieces"].empty())
    schema_error(source, pre + "pieces", "required non-empty array");
  for (std::size_t i = 0; i < j["pieces"].size(); ++i) {
    const json& pj = j["pieces"][i];
    const std::string pp = pre + "pieces[" + std::to_string(i) + "].";
    if (!pj.is_object()) schema_error(source, pp, "expected an object");
    reject_unknown(pj, {"tau", "curvature", "linear", "offset"}, source, pp);
    problems::InlinePiece piece;
    piece.tau = pj.contains("tau") ? get_number(pj["tau"], source, pp + "tau")
                                   : static_cast<double>(i);
    if (pj.contains("curvature")) piece.curvature = get_number(pj["curvature"], source, pp + "curvature");
    if (pj.contains("linear")) piece.linear = get_array(pj["linear"], source, pp + "linear");
    if (pj.contains("offset")) piece.offset = get_number(pj["offset"], source, pp + "offset");
    spec.pieces.push_back(std::move(piece));
  }
  if (j.contains("domain_lower")) spec.domain_lower = get_array(j["domain_lower"], source, pre + "domain_lower");
  if (j.contains("domain_upper")) spec.domain_upper = get_array(j["domain_upper"], source, pre + "domain_upper");
  if (!j.contains("region") || !j["region"].is_object())
    schema_error(source, pre + "region", "required object {lower, upper}");
  reject_unknown(j["region"], {"lower", "upper"}, source, pre + "region.");
  if (!j["region"].contains("lower") || !j["region"].contains("upper"))
    schema_error(source, pre + "region", "needs both lower and upper");
  spec.region.lower = get_array(j["region"]["lower"], source, pre + "region.lower");
  spec.region.upper = get_array(j["region"]["upper"], source, pre + "region.upper");
  if (j.contains("start")) spec.start = get_array(j["start"], source, pre + "start");
  return spec;
}

ProblemSpec parse_problem(const json& j, const std::string& source) {
  ProblemSpec spec;
  const auto known = problems::builtin_names();
  auto check_name = [&](const std::string& name) {
    if (std::find(known.begin(), known.end(), name) == known.end())
      schema_error(source, "problem", "unknown builtin '" + name + "'");
  };
  if (j.is_string()) {
    spec.builtin = j.get<std::string>();
    check_name(spec.builtin);
    return spec;
  }
  if (!j.is_object()) schema_error(source, "problem", "expected a builtin name or an object");
  reject_unknown(j, {"builtin", "n", "epsilon", "inline"}, source, "problem.");
  if (j.contains("inline")) {
    if (j.contains("builtin") || j.contains("n") || j.contains("epsilon"))
      schema_error(source, "problem", "'inline' cannot be combined with builtin options");
    spec.builtin = "inline";
    spec.inline_spec = parse_inline(j["inline"], source);
    return spec;
  }
  if (!j.contains("builtin") || !j["builtin"].is_string())
    schema_error(source, "problem.builtin", "required string");
  spec.builtin = j["builtin"].get<std::string>();
  check_name(spec.builtin);
  if (j.contains("n")) spec.n = static_cast<std::size_t>(get_count(j["n"], source, "problem.n"));
  if (j.contains("epsilon")) spec.epsilon = get_positive(j["epsilon"], source, "problem.epsilon");
  return spec;
}

} // namespace

RunConfig parse_config(std::string_view text, const std::string& source) {
  json j;
  try {
    j = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ConfigError(source + ": parse error: " + e.what());
  }
  if (!j.is_object()) throw ConfigError(source + ": top level must be an object");
  reject_unknown(j,
                 {"problem", "start_point", "lambda", "lambda_bar", "outer_tol", "inner_tol",
                  "max_outer", "max_inner", "seed", "level_ref", "level_guard", "output_dir"},
                 source, "");

  RunConfig cfg;
  if (!j.contains("problem")) schema_error(source, "problem", "required");
  cfg.problem = parse_problem(j["problem"], source);
  if (j.contains("start_point")) cfg.start_point = get_array(j["start_point"], source, "start_point");
  if (j.contains("lambda")) {
    const json& l = j["lambda"];
    if (l.is_string()) {
      if (l.get<std::string>() != "auto") schema_error(source, "lambda", "must be a number or \"auto\"");
    } else {
      cfg.lambda = get_positive(l, source, "lambda");
    }
  }
  if (j.contains("lambda_bar")) cfg.lambda_bar = get_positive(j["lambda_bar"], source, "lambda_bar");
  if (j.contains("outer_tol")) cfg.outer_tol = get_positive(j["outer_tol"], source, "outer_tol");
  if (j.contains("inner_tol")) cfg.inner_tol = get_positive(j["inner_tol"], source, "inner_tol");
  if (j.contains("max_outer")) cfg.max_outer = get_count(j["max_outer"], source, "max_outer");
  if (j.contains("max_inner")) cfg.max_inner = get_count(j["max_inner"], source, "max_inner");
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) schema_error(source, "seed", "expected a non-negative integer");
    cfg.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("level_ref")) cfg.level_ref = get_array(j["level_ref"], source, "level_ref");
  if (j.contains("level_guard")) {
    const json& g = j["level_guard"];
    const std::string s = g.is_string() ? g.get<std::string>() : "";
    if (s == "error") {
      cfg.level_guard = LevelGuard::Error;
    } else if (s == "warn") {
      cfg.level_guard = LevelGuard::Warn;
    } else if (s == "off") {
      cfg.level_guard = LevelGuard::Off;
    } else {
      schema_error(source, "level_guard", "must be \"error\", \"warn\" or \"off\"");
    }
  }
  if (j.contains("output_dir")) {
    if (!j["output_dir"].is_string()) schema_error(source, "output_dir", "expected a string");
    cfg.output_dir = j["output_dir"].get<std::string>();
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.string());
}

problems::Problem make_problem(const ProblemSpec& spec) {
  if (spec.inline_spec) return problems::inline_problem(*spec.inline_spec);
  if (spec.builtin == "paper_example") return problems::paper_example(spec.epsilon);
  if (spec.builtin == "paper_example_product")
    return problems::paper_example_product(spec.n, spec.epsilon);
  if (spec.builtin == "abs") return problems::abs_problem();
  if (spec.builtin == "quadratic") return problems::quadratic_problem();
  throw ConfigError("unknown builtin problem '" + spec.builtin + "'");
}

} // namespace hprox
