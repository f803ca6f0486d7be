#include "hpafem/problems.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <fmt/format.h>
#include <numbers>

#include "hpafem/error.hpp"
#include "hpafem/expression.hpp"

namespace hpafem {

Problem xalpha_problem(double alpha) {
  if (!(alpha > 0.5 && alpha < 1.0)) {
    throw Error(ErrorKind::Parameter, fmt::format("xalpha needs 1/2 < alpha < 1, got {}", alpha));
  }
  Problem p;
  p.name = "xalpha";
  const std::vector<double> sing{0.0};
  p.u_exact = Function([alpha](double x) { return std::pow(x, alpha) - x; },
                       [alpha](double x) { return alpha * std::pow(x, alpha - 1.0) - 1.0; }, {}, sing);
  p.data.f1 = Function::zero();
  p.data.f2 = Function([alpha](double x) { return 1.0 - alpha * std::pow(x, alpha - 1.0); },
                       [alpha](double x) { return -alpha * (alpha - 1.0) * std::pow(x, alpha - 2.0); }, {}, sing);
  return p;
}

Problem poly_exact_problem() {
  Problem p;
  p.name = "poly-exact";
  p.u_exact = Function([](double x) { return x * (1.0 - x); }, [](double x) { return 1.0 - 2.0 * x; });
  p.u_exact->set_piece_degree(2);
  p.data.f1 = Function::constant(2.0);
  p.data.f2 = Function::zero();
  return p;
}

Problem sine_var_problem() {
  using std::numbers::pi;
  Problem p;
  p.name = "sine-var";
  p.u_exact = Function([](double x) { return std::sin(pi * x); }, [](double x) { return pi * std::cos(pi * x); });
  p.data.nu = Function([](double x) { return 1.0 + x; }, [](double) { return 1.0; });
  p.data.nu.set_piece_degree(1);
  p.data.sigma = Function::constant(1.0);
  p.data.nu_star = 1.0;
  p.data.nu_sup = 2.0;
  p.data.sigma_sup = 1.0;
  p.data.f1 = Function(
      [](double x) { return pi * pi * (1.0 + x) * std::sin(pi * x) - pi * std::cos(pi * x) + std::sin(pi * x); },
      [](double x) {
        return pi * pi * std::sin(pi * x) + pi * pi * pi * (1.0 + x) * std::cos(pi * x) +
               pi * pi * std::sin(pi * x) + pi * std::cos(pi * x);
      });
  p.data.f2 = Function::zero();
  return p;
}

LegendreCoeffs lacunary_polynomial(int levels) {
  if (levels < 1 || levels > 8) throw Error(ErrorKind::Parameter, "lacunary levels must lie in [1,8]");
  // Constants satisfy every orthogonality relation, so one degree more and a
  // zero mean are needed for a non-trivial solution.
  const int p = 1 << levels;
  const int unknowns = p + 1;
  const int rows = (1 << levels) - 1 + 1;
  const QuadratureRule& q = gauss_legendre(p / 2 + 2);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(rows, unknowns);
  std::vector<double> vals(unknowns);
  int row = 0;
  for (int l = 0; l < levels; ++l) {
    const double h = std::ldexp(1.0, -l);
    for (int k = 0; k < (1 << l); ++k, ++row) {
      const double mid = k * h + 0.5 * h;
      for (std::size_t g = 0; g < q.nodes.size(); ++g) {
        const double x = mid + 0.5 * h * q.nodes[g];
        legendre_values(p, 2.0 * x - 1.0, vals);
        for (int j = 0; j < unknowns; ++j) a(row, j) += 0.5 * h * q.weights[g] * vals[j] * (x - mid);
      }
    }
  }
  a(row, 0) = 1.0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
  Eigen::VectorXd c = svd.matrixV().col(unknowns - 1);
  std::vector<double> coeffs(c.data(), c.data() + c.size());
  LegendreCoeffs w({0.0, 1.0}, coeffs);
  const double norm = std::sqrt(l2_norm_sq(w));
  const double sign = coeffs.back() < 0.0 ? -1.0 : 1.0;
  for (double& x : w.c) x *= sign / norm;
  return w;
}

Problem lacunary_problem(int levels) {
  Problem p;
  p.name = "lacunary";
  const LegendreCoeffs v = antiderivative(lacunary_polynomial(levels), 0.0);
  const LegendreCoeffs dv = derivative(v);
  Function f([v](double x) { return v(x); }, [dv](double x) { return dv(x); });
  f.set_piece_degree(v.degree());
  p.target = f;
  p.data.f1 = Function::zero();
  p.data.f2 = Function::zero();
  return p;
}

namespace {

Function from_text(const std::string& text, const ProblemSpec& spec, double fallback) {
  if (text.empty()) return Function::constant(fallback);
  return Expression::parse(text).to_function(spec.kinks, spec.singular);
}

// Sampled bounds; configured values take precedence.
double sampled(const Function& f, bool want_min) {
  double r = want_min ? INFINITY : -INFINITY;
  for (int i = 0; i <= 2000; ++i) {
    const double y = f(i / 2000.0);
    if (std::isfinite(y)) r = want_min ? std::min(r, y) : std::max(r, y);
  }
  return r;
}

}  // namespace

Problem make_problem(const ProblemSpec& spec) {
  if (spec.name == "xalpha") return xalpha_problem(spec.alpha);
  if (spec.name == "poly-exact") return poly_exact_problem();
  if (spec.name == "sine-var") return sine_var_problem();
  if (spec.name == "lacunary") return lacunary_problem(spec.levels);
  if (spec.name != "inline") throw Error(ErrorKind::Config, fmt::format("unknown problem '{}'", spec.name));
  Problem p;
  p.name = "inline";
  p.data.f1 = from_text(spec.f1, spec, 0.0);
  p.data.f2 = from_text(spec.f2, spec, 0.0);
  p.data.nu = from_text(spec.nu, spec, 1.0);
  p.data.sigma = from_text(spec.sigma, spec, 0.0);
  p.data.nu_star = spec.nu_star.value_or(sampled(p.data.nu, true));
  p.data.nu_sup = spec.nu_sup.value_or(sampled(p.data.nu, false));
  p.data.sigma_sup = spec.sigma_sup.value_or(std::max(0.0, sampled(p.data.sigma, false)));
  if (!spec.u_exact.empty()) p.u_exact = Expression::parse(spec.u_exact).to_function(spec.kinks, spec.singular);
  return p;
}

}  // namespace hpafem
