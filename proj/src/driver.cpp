#include "hpafem/driver.hpp"

#include <cmath>
#include <fmt/format.h>
#include <memory>
#include <spdlog/spdlog.h>

#include "hpafem/fem1d.hpp"

namespace hpafem {

void AfemParams::check() const {
  const auto fail = [&](const std::string& what) {
    throw Error(ErrorKind::Parameter,
                fmt::format("{} (b = {}, mu = {}, C1 = {}, C2 = {}, omega = {}, delta = {})", what, b, mu, c1, c2,
                            omega, delta));
  };
  if (!(mu > 0.0 && mu < 1.0)) fail("mu must lie in (0,1)");
  if (!(delta > 0.0)) fail("delta must be positive");
  if (!(c1 * c2 < b * (1.0 - mu))) fail("C1 C2 < b (1 - mu) is violated");
  if (!(omega > c2 / b && omega < (1.0 - mu) / c1)) fail("omega outside its admissible interval");
  if (!(mu + c1 * omega < 1.0)) fail("mu + C1 omega must be below 1");
  if (!(b * omega - c2 > 0.0)) fail("b omega - C2 must be positive");
}

double l2_norm(const Function& f) {
  if (auto c = f.constant_value()) return std::abs(*c);
  double s = 0.0;
  const int points = f.piece_degree() >= 0 ? f.piece_degree() + 2 : 64;
  visit_nodes({0.0, 1.0}, f.kinks(), f.singular(), points, [&](double x, double w) {
    const double y = checked(f(x), x);
    s += w * y * y;
  });
  return std::sqrt(s);
}

AfemParams derive_params(const ProblemData& data, const DeriveOptions& opts) {
  AfemParams p;
  p.big_b = opts.big_b;
  p.b = nearbest_b(opts.big_b);
  p.mu = opts.mu;
  p.safety = opts.safety;
  p.c_hat = opts.c_hat;
  if (!(opts.mu > 0.0 && opts.mu < 1.0)) throw Error(ErrorKind::Parameter, "mu must lie in (0,1)");
  if (!(opts.safety > 0.0 && opts.safety < 1.0)) throw Error(ErrorKind::Parameter, "safety must lie in (0,1)");
  const double alpha = data.alpha_lower();
  p.c_f = (std::sqrt(0.5) * l2_norm(data.f1) + l2_norm(data.f2)) / alpha;
  p.c_bar = (1.5 * p.c_f + p.c_hat + 1.0) / alpha;
  p.delta = opts.delta ? *opts.delta : opts.safety * std::pow(p.b * (1.0 - p.mu) / p.c_bar, 2);
  p.c1 = p.c_bar * std::sqrt(p.delta);
  const double lo = p.c2 / p.b;
  const double hi = (1.0 - p.mu) / p.c1;
  if (!(hi > lo)) {
    throw Error(ErrorKind::Parameter,
                fmt::format("empty admissible interval for omega: ({}, {}); decrease delta or mu", lo, hi));
  }
  p.omega = std::sqrt(lo * hi);
  p.eps0 = p.c_f > 0.0 ? p.c_f : 1.0;
  p.check();
  return p;
}

namespace {

double oscillation(ErrorFunctional& ef, const HpPartition& d) {
  double s = 0.0;
  for (const auto& el : d.elements()) s += ef.oscillation_sq(el.element, el.d);
  return std::sqrt(s);
}

}  // namespace

AfemResult hp_afem(const ProblemData& data, const RootsPtr& roots, const AfemParams& params, const Function* u_exact,
                   const AfemOptions& opts) {
  params.check();
  AfemResult out;
  auto shared = std::make_shared<const ProblemData>(data);
  ErrorFunctional ef(shared, roots, params.delta);
  ef.set_max_degree(opts.max_degree);
  ReduceParams rp;
  rp.theta = opts.theta;
  rp.alpha_lower = data.alpha_lower();
  rp.alpha_upper = data.alpha_upper();
  rp.early_exit = opts.early_exit;

  PiecewisePoly ubar = PiecewisePoly::zero(roots->breaks());
  double eps_prev = params.eps0;
  NearBestParams np;
  np.max_n = opts.max_n;
  np.rule = opts.rule;
  np.trace = static_cast<bool>(opts.on_iteration);

  for (int i = 1; i <= opts.max_iters; ++i) {
    IterationRecord rec;
    rec.i = i;
    try {
      ef.set_v(ubar.as_function());
      NearBestResult nb = hp_nearbest(params.omega * eps_prev, ef, np);
      ReduceResult rd = reduce(params.reduce_rho(), nb.partition, nb.data, rp);
      rec.eps = params.schedule_ratio() * eps_prev;
      rec.dofs_nearbest = total_dof(nb.partition);
      rec.dofs_reduce = total_dof(rd.partition);
      rec.e_sqrt = std::sqrt(nb.achieved_error);
      rec.osc = oscillation(ef, nb.partition);
      rec.est = rd.indicators.est;
      rec.reduce_iters = rd.iterations;
      ubar = rd.solution.piecewise;
      if (u_exact) rec.true_error = std::sqrt(h1_distance_sq(*u_exact, ubar.as_function()));
      spdlog::info("iteration {}: eps = {:.4e}, #D = {}, #Dbar = {}, E^(1/2) = {:.4e}, est = {:.4e}{}", i, rec.eps,
                   rec.dofs_nearbest, rec.dofs_reduce, rec.e_sqrt, rec.est,
                   rec.true_error ? fmt::format(", error = {:.4e}", *rec.true_error) : std::string());
      out.records.push_back(rec);
      out.final_partition = rd.partition;
      out.final_solution = ubar;
      if (opts.on_iteration) opts.on_iteration(rec, nb, rd);
      const double scale = l2_norm(data.f1) + l2_norm(data.f2);
      if (rec.est <= 1e-13 * std::max(scale, 1e-300) && rec.osc == 0.0) {
        out.exact = true;
        break;
      }
      if (opts.target_eps && rec.eps <= *opts.target_eps) break;
      eps_prev = rec.eps;
    } catch (const Error& e) {
      out.failure = e.kind();
      out.failure_message = e.what();
      spdlog::warn("iteration {} aborted: {}", i, e.what());
      break;
    }
  }
  return out;
}

DecayFit decay_fit(const std::vector<std::pair<double, double>>& pts) {
  DecayFit best;
  std::vector<std::pair<double, double>> use;
  for (const auto& [n, e] : pts) {
    if (e > 0.0 && std::isfinite(e) && n > 0.0) use.emplace_back(n, std::log(e));
  }
  if (use.size() < 4) return best;
  for (double tau : {1.0 / 3.0, 0.5, 1.0}) {
    double sx = 0, sy = 0;
    for (const auto& [n, y] : use) {
      sx += std::pow(n, tau);
      sy += y;
    }
    const double m = static_cast<double>(use.size());
    const double mx = sx / m, my = sy / m;
    double sxx = 0, sxy = 0, syy = 0;
    for (const auto& [n, y] : use) {
      const double x = std::pow(n, tau) - mx;
      sxx += x * x;
      sxy += x * (y - my);
      syy += (y - my) * (y - my);
    }
    if (sxx <= 0.0 || syy <= 1e-300) continue;
    const double slope = sxy / sxx;
    const double r2 = (sxy * sxy) / (sxx * syy);
    if (!best.ok || r2 > best.r2) {
      best.ok = true;
      best.tau = tau;
      best.eta = -slope;
      best.log_c = my - slope * mx;
      best.r2 = r2;
    }
  }
  return best;
}

}  // namespace hpafem
