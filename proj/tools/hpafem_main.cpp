#include <CLI11.hpp>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fmt/format.h>
#include <fstream>
#include <iostream>
#include <memory>
#include <nlohmann/json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "hpafem/config.hpp"
#include "hpafem/driver.hpp"
#include "hpafem/error.hpp"
#include "hpafem/problems.hpp"
#include "hpafem/verify.hpp"

namespace fs = std::filesystem;
using namespace hpafem;

namespace {

constexpr const char* kVersion = "hpafem 1.0.0";

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("hpafem");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);
  if (const char* env = std::getenv("HP_AFEM_LOG")) spdlog::set_level(spdlog::level::from_str(env));
}

std::string g17(double x) { return fmt::format("{:.17g}", x); }

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Config, fmt::format("cannot write '{}'", path.string()));
  out << text;
}

// Splits every root until the fineness check passes.
RootsPtr make_roots(const RootSpec& spec, const ProblemData& data, int& repairs) {
  std::vector<double> breaks = spec.breaks;
  if (breaks.empty()) {
    if (spec.uniform < 1) throw Error(ErrorKind::Config, "roots.uniform must be at least 1");
    const RootPartition u = RootPartition::uniform(static_cast<std::size_t>(spec.uniform));
    breaks.assign(u.breaks().begin(), u.breaks().end());
  }
  repairs = 0;
  for (;;) {
    auto roots = std::make_shared<const RootPartition>(breaks);
    if (validate_root_fineness(HPartition::from_roots(roots), data)) return roots;
    if (!spec.auto_repair || repairs >= spec.repair_levels) {
      throw Error(ErrorKind::InvalidPartition,
                  fmt::format("root partition is not fine enough for the coefficients after {} repairs", repairs));
    }
    std::vector<double> next;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
      next.push_back(breaks[i]);
      next.push_back(0.5 * (breaks[i] + breaks[i + 1]));
    }
    next.push_back(breaks.back());
    breaks = std::move(next);
    ++repairs;
  }
}

nlohmann::json params_json(const AfemParams& p) {
  return {{"delta", p.delta}, {"B", p.big_b},   {"b", p.b},         {"C1", p.c1},       {"C2", p.c2},
          {"C3", p.c3},       {"mu", p.mu},     {"omega", p.omega}, {"eps0", p.eps0},   {"C_f", p.c_f},
          {"C_bar", p.c_bar}, {"C_hat", p.c_hat}, {"safety", p.safety},
          {"eps_ratio", p.schedule_ratio()},    {"reduce_rho", p.reduce_rho()}};
}

int run_lacunary(const RunConfig& cfg, const Problem& prob, const RootsPtr& roots, const fs::path& out,
                 nlohmann::json header) {
  auto data = std::make_shared<const ProblemData>(prob.data);
  ErrorFunctional ef(data, roots, 1.0);
  ef.set_max_degree(cfg.params.max_degree);
  ef.set_v(*prob.target);
  NearBestParams np;
  np.max_n = cfg.params.max_n;
  np.rule = cfg.params.rule;
  double e_root = 0.0;
  for (const auto& r : roots->roots()) e_root += ef.e(r, 1);
  double eps = std::sqrt(e_root);
  header["mode"] = "approximation-only";
  write_text(out / "run_header.json", header.dump(2) + "\n");
  std::string csv = "step,eps,dofs,E_sqrt,elements,max_degree,greedy_steps\n";
  for (int step = 1; step <= cfg.params.max_iters && eps > 0.0; ++step) {
    const NearBestResult nb = hp_nearbest(eps, ef, np);
    csv += fmt::format("{},{},{},{},{},{},{}\n", step, g17(eps), total_dof(nb.partition),
                       g17(std::sqrt(nb.achieved_error)), nb.partition.size(), nb.partition.max_degree(), nb.steps);
    if (cfg.output.dump_partitions) {
      fs::create_directories(out / "partitions");
      write_text(out / "partitions" / fmt::format("nearbest_{:03d}.txt", step), serialize(nb.partition));
    }
    if (nb.achieved_error <= 0.0) break;
    eps *= 0.5;
  }
  write_text(out / "nearbest.csv", csv);
  return 0;
}

int run(const RunConfig& cfg) {
  const fs::path out = cfg.output.dir;
  fs::create_directories(out);
  try {
    const Problem prob = make_problem(cfg.problem);
    prob.data.validate();
    int repairs = 0;
    const RootsPtr roots = make_roots(cfg.roots, prob.data, repairs);
    nlohmann::json header;
    header["version"] = kVersion;
    header["problem"] = prob.name;
    header["config"] = emit_config(cfg);
    header["root_breaks"] = std::vector<double>(roots->breaks().begin(), roots->breaks().end());
    header["root_repairs"] = repairs;
    header["alpha_lower"] = prob.data.alpha_lower();
    header["alpha_upper"] = prob.data.alpha_upper();
    if (prob.target) return run_lacunary(cfg, prob, roots, out, header);

    DeriveOptions dopt;
    dopt.big_b = cfg.params.big_b;
    dopt.mu = cfg.params.mu;
    dopt.safety = cfg.params.safety;
    dopt.c_hat = cfg.params.c_hat;
    dopt.delta = cfg.params.delta;
    const AfemParams params = derive_params(prob.data, dopt);
    header["params"] = params_json(params);
    header["theta"] = cfg.params.theta;
    header["max_iters"] = cfg.params.max_iters;
    write_text(out / "run_header.json", header.dump(2) + "\n");
    spdlog::info("delta = {:.6e}, omega = {:.6e}, eps ratio = {:.6f}", params.delta, params.omega,
                 params.schedule_ratio());

    AfemOptions opts;
    opts.max_iters = cfg.params.max_iters;
    opts.theta = cfg.params.theta;
    opts.early_exit = cfg.params.early_exit;
    opts.max_n = cfg.params.max_n;
    opts.max_degree = cfg.params.max_degree;
    opts.target_eps = cfg.params.target_eps;
    opts.rule = cfg.params.rule;
    std::string nb_trace = "iteration,n,E,num_trimmed,max_d\n";
    std::string rd_trace = "iteration,step,est,dofs,num_marked\n";
    if (cfg.output.trace_nearbest || cfg.output.trace_reduce || cfg.output.dump_partitions) {
      opts.on_iteration = [&](const IterationRecord& rec, const NearBestResult& nb, const ReduceResult& rd) {
        for (const auto& t : nb.trace) {
          nb_trace += fmt::format("{},{},{},{},{}\n", rec.i, t.n, g17(t.e), t.num_trimmed, t.max_d);
        }
        for (const auto& t : rd.trace) {
          rd_trace += fmt::format("{},{},{},{},{}\n", rec.i, t.i, g17(t.est), t.dofs, t.num_marked);
        }
        if (cfg.output.dump_partitions) {
          fs::create_directories(out / "partitions");
          write_text(out / "partitions" / fmt::format("nearbest_{:03d}.txt", rec.i), serialize(nb.partition));
          write_text(out / "partitions" / fmt::format("reduce_{:03d}.txt", rec.i), serialize(rd.partition));
        }
      };
    }
    const Function* exact = prob.u_exact ? &*prob.u_exact : nullptr;
    const AfemResult res = hp_afem(prob.data, roots, params, exact, opts);

    std::string csv = "i,eps,dofs_nearbest,dofs_reduce,E_sqrt,osc,est,true_error,reduce_iters\n";
    for (const auto& r : res.records) {
      csv += fmt::format("{},{},{},{},{},{},{},{},{}\n", r.i, g17(r.eps), r.dofs_nearbest, r.dofs_reduce,
                         g17(r.e_sqrt), g17(r.osc), g17(r.est), r.true_error ? g17(*r.true_error) : std::string(),
                         r.reduce_iters);
    }
    write_text(out / "iterations.csv", csv);
    if (cfg.output.trace_nearbest) write_text(out / "nearbest_trace.csv", nb_trace);
    if (cfg.output.trace_reduce) write_text(out / "reduce_trace.csv", rd_trace);
    if (res.failure) {
      const nlohmann::json err = {{"error", to_string(*res.failure)},
                                  {"message", res.failure_message},
                                  {"completed_iterations", res.records.size()}};
      write_text(out / "error.json", err.dump(2) + "\n");
      std::cerr << err.dump() << "\n";
      return 2;
    }
    return 0;
  } catch (const Error& e) {
    const nlohmann::json err = {{"error", to_string(e.kind())}, {"message", e.what()}};
    write_text(out / "error.json", err.dump(2) + "\n");
    std::cerr << err.dump() << "\n";
    return 2;
  }
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"hp-adaptive finite elements with coarsening on (0,1)"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  auto* run_cmd = app.add_subcommand("run", "run hp-AFEM for a configuration");
  std::string config_path;
  std::string out_dir;
  bool trace_nb = false, trace_rd = false, dump = false;
  run_cmd->add_option("--config", config_path, "YAML run configuration")->required()->check(CLI::ExistingFile);
  run_cmd->add_option("--out", out_dir, "output directory (overrides the config)");
  run_cmd->add_flag("--trace-nearbest", trace_nb, "write the greedy history of every NEARBEST call");
  run_cmd->add_flag("--trace-reduce", trace_rd, "write the estimator history of every REDUCE call");
  run_cmd->add_flag("--dump-partitions", dump, "write every partition");

  auto* verify_cmd = app.add_subcommand("verify", "run acceptance suites");
  std::string suite = "all";
  std::uint64_t seed = VerifyOptions{}.seed;
  verify_cmd->add_option("--suite", suite, "trees, estimator, reduce, afem or all")
      ->check(CLI::IsMember({"trees", "estimator", "reduce", "afem", "all"}));
  verify_cmd->add_option("--seed", seed, "seed for the random corpora");

  auto* cfg_cmd = app.add_subcommand("print-config", "print the normalized configuration");
  cfg_cmd->add_option("--config", config_path, "YAML run configuration")->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) {
      RunConfig cfg = load_config(config_path);
      if (!out_dir.empty()) cfg.output.dir = out_dir;
      cfg.output.trace_nearbest = cfg.output.trace_nearbest || trace_nb;
      cfg.output.trace_reduce = cfg.output.trace_reduce || trace_rd;
      cfg.output.dump_partitions = cfg.output.dump_partitions || dump;
      return run(cfg);
    }
    if (*verify_cmd) {
      VerifyOptions opts;
      opts.seed = seed;
      bool ok = true;
      for (const auto& r : run_suite(suite, opts)) {
        std::cout << format_result(r) << std::endl;
        ok = ok && r.pass;
      }
      return ok ? 0 : 1;
    }
    if (*cfg_cmd) {
      const RunConfig cfg = config_path.empty() ? RunConfig{} : load_config(config_path);
      std::cout << emit_config(cfg);
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << nlohmann::json{{"error", to_string(e.kind())}, {"message", e.what()}}.dump() << "\n";
    return 2;
  }
  return 0;
}
