#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "hpafem/mesh1d.hpp"

namespace hpafem {

/// Gauss-Legendre rule on [-1,1]; exact for polynomials of degree 2n-1.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  int order = 0;
};

/// Cached n-point rule, thread-safe.
const QuadratureRule& gauss_legendre(int n);

/// Scalar function on [0,1] with optional derivative and quadrature hints.
/// `kinks` are points where smoothness drops; `singular` are points where
/// the function or its derivative blows up and quadrature must be graded.
class Function {
 public:
  using Fn = std::function<double(double)>;

  Function();
  Function(Fn value, Fn derivative = {}, std::vector<double> kinks = {},
           std::vector<double> singular = {});

  static Function constant(double c);
  static Function zero() { return constant(0.0); }

  double operator()(double x) const { return value_(x); }
  double derivative(double x) const;
  bool has_derivative() const { return static_cast<bool>(derivative_); }

  /// Derivative as a Function; kinks and singular points carry over.
  Function derivative_function() const;

  std::span<const double> kinks() const { return kinks_; }
  std::span<const double> singular() const { return singular_; }
  std::optional<double> constant_value() const { return constant_; }

  /// Highest polynomial degree on any smooth piece, or -1 if not polynomial.
  int piece_degree() const { return piece_degree_; }
  Function& set_piece_degree(int deg) {
    piece_degree_ = deg;
    return *this;
  }

 private:
  Fn value_;
  Fn derivative_;
  std::vector<double> kinks_;
  std::vector<double> singular_;
  std::optional<double> constant_;
  int piece_degree_ = -1;
};

/// Visits quadrature nodes (x, w) for integrals over `iv`. The interval is
/// split at kinks and singular points; pieces ending at a singular point are
/// graded geometrically towards it. `points` is the per-piece rule size.
void visit_nodes(const Interval& iv, std::span<const double> kinks,
                 std::span<const double> singular, int points,
                 const std::function<void(double x, double w)>& fn);

/// Node list for `visit_nodes`, materialized.
struct NodeSet {
  std::vector<double> x;
  std::vector<double> w;
};
NodeSet collect_nodes(const Interval& iv, std::span<const double> kinks,
                      std::span<const double> singular, int points);

/// Merged hints of several functions.
std::vector<double> merge_points(std::initializer_list<std::span<const double>> lists);

/// Rule size for resolving degree-`p` moments of a general function.
int default_points(int p, int piece_degree = -1);

/// Throws InputFunction if `y` is not finite.
double checked(double y, double x);

}  // namespace hpafem
