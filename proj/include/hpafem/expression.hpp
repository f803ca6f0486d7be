#pragma once

#include <memory>
#include <string>
#include <vector>

#include "hpafem/function.hpp"

namespace hpafem {

/// Arithmetic expression in x: numbers, x, pi, + - * / ^, unary minus and
/// the calls pow(a,b), sin, cos, exp, log, sqrt, abs. Derivatives are exact
/// (forward mode).
class Expression {
 public:
  struct Node;

  /// Throws Parse with the offending column.
  static Expression parse(const std::string& text);

  double value(double x) const;
  /// (value, derivative) at x.
  std::pair<double, double> value_and_derivative(double x) const;

  /// Polynomial degree in x, or -1 if not a polynomial.
  int polynomial_degree() const;

  const std::string& text() const { return text_; }

  /// Function with exact derivative and the given quadrature hints.
  Function to_function(std::vector<double> kinks = {}, std::vector<double> singular = {}) const;

 private:
  std::shared_ptr<const Node> root_;
  std::string text_;
};

}  // namespace hpafem
