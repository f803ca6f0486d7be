#include "hpafem/config.hpp"

#include <fmt/format.h>
#include <fstream>
#include <set>
#include <sstream>
#include <yaml-cpp/yaml.h>

#include "hpafem/error.hpp"

namespace hpafem {

std::string to_string(ModifiedErrorRule rule) {
  return rule == ModifiedErrorRule::ParentModified ? "parent_modified" : "parent_error";
}

ModifiedErrorRule parse_rule(const std::string& name) {
  if (name == "parent_modified") return ModifiedErrorRule::ParentModified;
  if (name == "parent_error") return ModifiedErrorRule::ParentError;
  throw Error(ErrorKind::Config, fmt::format("unknown modified error rule '{}'", name));
}

namespace {

void check_keys(const YAML::Node& node, const std::string& section, std::initializer_list<const char*> allowed) {
  if (!node) return;
  if (!node.IsMap()) throw Error(ErrorKind::Config, fmt::format("section '{}' must be a map", section));
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!ok.count(key)) throw Error(ErrorKind::Config, fmt::format("unknown key '{}' in '{}'", key, section));
  }
}

template <class T>
void read(const YAML::Node& node, const char* key, T& out) {
  if (node && node[key]) out = node[key].as<T>();
}

template <class T>
void read(const YAML::Node& node, const char* key, std::optional<T>& out) {
  if (node && node[key] && !node[key].IsNull()) out = node[key].as<T>();
}

std::string num(double x) { return fmt::format("{:.17g}", x); }

YAML::Node num_node(double x) {
  YAML::Node n;
  n = num(x);
  return n;
}

YAML::Node list(const std::vector<double>& xs) {
  YAML::Node n(YAML::NodeType::Sequence);
  for (double x : xs) n.push_back(num_node(x));
  return n;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw Error(ErrorKind::Config, fmt::format("invalid YAML: {}", e.what()));
  }
  RunConfig c;
  if (!root || root.IsNull()) return c;
  try {
    check_keys(root, "top level", {"problem", "roots", "params", "output", "seed"});
    read(root, "seed", c.seed);

    const YAML::Node p = root["problem"];
    check_keys(p, "problem",
               {"name", "alpha", "levels", "f1", "f2", "nu", "sigma", "u_exact", "nu_star", "nu_sup", "sigma_sup",
                "kinks", "singular"});
    read(p, "name", c.problem.name);
    read(p, "alpha", c.problem.alpha);
    read(p, "levels", c.problem.levels);
    read(p, "f1", c.problem.f1);
    read(p, "f2", c.problem.f2);
    read(p, "nu", c.problem.nu);
    read(p, "sigma", c.problem.sigma);
    read(p, "u_exact", c.problem.u_exact);
    read(p, "nu_star", c.problem.nu_star);
    read(p, "nu_sup", c.problem.nu_sup);
    read(p, "sigma_sup", c.problem.sigma_sup);
    read(p, "kinks", c.problem.kinks);
    read(p, "singular", c.problem.singular);

    const YAML::Node r = root["roots"];
    check_keys(r, "roots", {"uniform", "breaks", "auto_repair", "repair_levels"});
    read(r, "uniform", c.roots.uniform);
    read(r, "breaks", c.roots.breaks);
    read(r, "auto_repair", c.roots.auto_repair);
    read(r, "repair_levels", c.roots.repair_levels);

    const YAML::Node q = root["params"];
    check_keys(q, "params",
               {"B", "mu", "theta", "safety", "c_hat", "delta", "max_iters", "max_n", "max_degree", "target_eps",
                "rule", "early_exit"});
    read(q, "B", c.params.big_b);
    read(q, "mu", c.params.mu);
    read(q, "theta", c.params.theta);
    read(q, "safety", c.params.safety);
    read(q, "c_hat", c.params.c_hat);
    read(q, "delta", c.params.delta);
    read(q, "max_iters", c.params.max_iters);
    read(q, "max_n", c.params.max_n);
    read(q, "max_degree", c.params.max_degree);
    read(q, "target_eps", c.params.target_eps);
    if (q && q["rule"]) c.params.rule = parse_rule(q["rule"].as<std::string>());
    read(q, "early_exit", c.params.early_exit);

    const YAML::Node o = root["output"];
    check_keys(o, "output", {"dir", "trace_nearbest", "trace_reduce", "dump_partitions"});
    read(o, "dir", c.output.dir);
    read(o, "trace_nearbest", c.output.trace_nearbest);
    read(o, "trace_reduce", c.output.trace_reduce);
    read(o, "dump_partitions", c.output.dump_partitions);
  } catch (const YAML::Exception& e) {
    throw Error(ErrorKind::Config, fmt::format("bad value: {}", e.what()));
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Config, fmt::format("cannot read config '{}'", path));
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string emit_config(const RunConfig& c) {
  YAML::Emitter out;
  out << YAML::BeginMap;
  out << YAML::Key << "seed" << YAML::Value << c.seed;

  out << YAML::Key << "problem" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "name" << YAML::Value << c.problem.name;
  out << YAML::Key << "alpha" << YAML::Value << num(c.problem.alpha);
  out << YAML::Key << "levels" << YAML::Value << c.problem.levels;
  out << YAML::Key << "f1" << YAML::Value << YAML::DoubleQuoted << c.problem.f1;
  out << YAML::Key << "f2" << YAML::Value << YAML::DoubleQuoted << c.problem.f2;
  out << YAML::Key << "nu" << YAML::Value << YAML::DoubleQuoted << c.problem.nu;
  out << YAML::Key << "sigma" << YAML::Value << YAML::DoubleQuoted << c.problem.sigma;
  out << YAML::Key << "u_exact" << YAML::Value << YAML::DoubleQuoted << c.problem.u_exact;
  const auto opt = [&](const char* key, const std::optional<double>& v) {
    out << YAML::Key << key << YAML::Value;
    if (v) {
      out << num(*v);
    } else {
      out << YAML::Null;
    }
  };
  opt("nu_star", c.problem.nu_star);
  opt("nu_sup", c.problem.nu_sup);
  opt("sigma_sup", c.problem.sigma_sup);
  out << YAML::Key << "kinks" << YAML::Value << YAML::Flow << list(c.problem.kinks);
  out << YAML::Key << "singular" << YAML::Value << YAML::Flow << list(c.problem.singular);
  out << YAML::EndMap;

  out << YAML::Key << "roots" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "uniform" << YAML::Value << c.roots.uniform;
  out << YAML::Key << "breaks" << YAML::Value << YAML::Flow << list(c.roots.breaks);
  out << YAML::Key << "auto_repair" << YAML::Value << c.roots.auto_repair;
  out << YAML::Key << "repair_levels" << YAML::Value << c.roots.repair_levels;
  out << YAML::EndMap;

  out << YAML::Key << "params" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "B" << YAML::Value << num(c.params.big_b);
  out << YAML::Key << "mu" << YAML::Value << num(c.params.mu);
  out << YAML::Key << "theta" << YAML::Value << num(c.params.theta);
  out << YAML::Key << "safety" << YAML::Value << num(c.params.safety);
  out << YAML::Key << "c_hat" << YAML::Value << num(c.params.c_hat);
  opt("delta", c.params.delta);
  out << YAML::Key << "max_iters" << YAML::Value << c.params.max_iters;
  out << YAML::Key << "max_n" << YAML::Value << c.params.max_n;
  out << YAML::Key << "max_degree" << YAML::Value << c.params.max_degree;
  opt("target_eps", c.params.target_eps);
  out << YAML::Key << "rule" << YAML::Value << to_string(c.params.rule);
  out << YAML::Key << "early_exit" << YAML::Value << c.params.early_exit;
  out << YAML::EndMap;

  out << YAML::Key << "output" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "dir" << YAML::Value << YAML::DoubleQuoted << c.output.dir;
  out << YAML::Key << "trace_nearbest" << YAML::Value << c.output.trace_nearbest;
  out << YAML::Key << "trace_reduce" << YAML::Value << c.output.trace_reduce;
  out << YAML::Key << "dump_partitions" << YAML::Value << c.output.dump_partitions;
  out << YAML::EndMap;

  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

}  // namespace hpafem
