#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hpafem/error_functional.hpp"
#include "hpafem/function.hpp"
#include "hpafem/polyspace.hpp"

namespace hpafem {

/// Problem selection. Built-in names: xalpha, poly-exact, sine-var,
/// lacunary, inline. Inline problems read the expression fields.
struct ProblemSpec {
  std::string name = "xalpha";
  double alpha = 0.7;
  int levels = 3;
  std::string f1;
  std::string f2;
  std::string nu;
  std::string sigma;
  std::string u_exact;
  std::optional<double> nu_star;
  std::optional<double> nu_sup;
  std::optional<double> sigma_sup;
  std::vector<double> kinks;
  std::vector<double> singular;

  bool operator==(const ProblemSpec&) const = default;
};

struct Problem {
  std::string name;
  ProblemData data;
  std::optional<Function> u_exact;
  /// Set for approximation-only benchmarks: the target of hp_nearbest.
  std::optional<Function> target;
};

Problem make_problem(const ProblemSpec& spec);

/// u = x^alpha - x with nu = 1, sigma = 0, f1 = 0, f2 = -u'. Requires alpha > 1/2.
Problem xalpha_problem(double alpha);
/// u = x(1-x), f1 = 2.
Problem poly_exact_problem();
/// u = sin(pi x), nu = 1 + x, sigma = 1.
Problem sine_var_problem();

/// Polynomial w of degree 2^L with zero mean that is L2-orthogonal to the
/// linear polynomials with vanishing mean on every dyadic interval of level
/// < L, normalized to ||w||_{L2(0,1)} = 1 with a positive leading coefficient.
LegendreCoeffs lacunary_polynomial(int levels);
/// v = int_0^x w, so v' carries the orthogonality seen by the H1 functional.
Problem lacunary_problem(int levels);

}  // namespace hpafem
