#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hpafem/problems.hpp"
#include "hpafem/tree_approx.hpp"

namespace hpafem {

struct RootSpec {
  /// Uniform root count; ignored when `breaks` is non-empty.
  int uniform = 1;
  std::vector<double> breaks;
  bool auto_repair = true;
  int repair_levels = 10;

  bool operator==(const RootSpec&) const = default;
};

struct ParamSpec {
  double big_b = 2.0;
  double mu = 0.5;
  double theta = 0.5;
  double safety = 0.25;
  double c_hat = 1.0;
  std::optional<double> delta;
  int max_iters = 30;
  long max_n = 20000;
  int max_degree = 256;
  std::optional<double> target_eps;
  ModifiedErrorRule rule = ModifiedErrorRule::ParentModified;
  bool early_exit = true;

  bool operator==(const ParamSpec&) const = default;
};

struct OutputSpec {
  std::string dir = "hpafem_out";
  bool trace_nearbest = false;
  bool trace_reduce = false;
  bool dump_partitions = false;

  bool operator==(const OutputSpec&) const = default;
};

struct RunConfig {
  ProblemSpec problem;
  RootSpec roots;
  ParamSpec params;
  OutputSpec output;
  std::uint64_t seed = 0;

  bool operator==(const RunConfig&) const = default;
};

/// YAML text with sections problem, roots, params, output and a top-level
/// seed. Missing keys keep their defaults; unknown keys are a Config error.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
/// Emits every field; parse_config(emit_config(c)) == c.
std::string emit_config(const RunConfig& config);

std::string to_string(ModifiedErrorRule rule);
ModifiedErrorRule parse_rule(const std::string& name);

}  // namespace hpafem
