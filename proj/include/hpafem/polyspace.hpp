#pragma once

#include <span>
#include <string>
#include <vector>

#include "hpafem/function.hpp"
#include "hpafem/mesh1d.hpp"

namespace hpafem {

/// Legendre values P_0(t)..P_n(t).
void legendre_values(int n, double t, std::span<double> out);

/// Polynomial on an interval in the affinely mapped Legendre basis:
/// q(x) = sum_j c_j P_j(t), t = (2x - a - b) / (b - a).
struct LegendreCoeffs {
  Interval iv;
  std::vector<double> c;

  LegendreCoeffs() = default;
  LegendreCoeffs(Interval interval, std::vector<double> coeffs);
  static LegendreCoeffs zero(Interval interval, int degree = 0);

  int degree() const { return static_cast<int>(c.size()) - 1; }
  double operator()(double x) const;
  double derivative_at(double x) const;
  /// Value at the reference point t in [-1,1].
  double at_reference(double t) const;
};

/// Exact x-derivative, degree one lower (degree 0 stays 0).
LegendreCoeffs derivative(const LegendreCoeffs& q);
/// Exact antiderivative in x with value `value_at_left` at iv.a.
LegendreCoeffs antiderivative(const LegendreCoeffs& q, double value_at_left);
/// Exact product, degree m + n.
LegendreCoeffs multiply(const LegendreCoeffs& x, const LegendreCoeffs& y);
LegendreCoeffs add(const LegendreCoeffs& x, const LegendreCoeffs& y, double scale_y = 1.0);
/// Coefficients of degree > p dropped.
LegendreCoeffs truncate(const LegendreCoeffs& q, int p);

double integral(const LegendreCoeffs& q);
double mean(const LegendreCoeffs& q);
double l2_norm_sq(const LegendreCoeffs& q);
double h1_seminorm_sq(const LegendreCoeffs& q);
double h1_seminorm(const LegendreCoeffs& q);

/// L2(K)-orthogonal projection onto P_p(K).
LegendreCoeffs project_l2(const Function& f, const Interval& k, int p);
LegendreCoeffs project_l2(const Function& f, const RootPartition& roots, const ElementId& k, int p);

/// H1-type projection: q' = Pi0_{p-1} v' and the means of q and v agree.
/// Throws UnsupportedDegree for p = 0 and InputFunction without a derivative.
LegendreCoeffs project_h1(const Function& v, const Interval& k, int p);
LegendreCoeffs project_h1(const Function& v, const RootPartition& roots, const ElementId& k, int p);

/// Legendre moments of g on K for degrees 0..p, with ||g||^2.
struct Moments {
  std::vector<double> coeffs;
  double norm_sq = 0.0;
};
Moments compute_moments(const Function& g, const Interval& k, int p);

/// ||g - Pi0_p g||^2_{L2(K)} from moments; falls back to direct quadrature
/// of the difference once the error drops below 1e-3 of the norm.
double projection_error_sq(const Function& g, const Interval& k, int p, const Moments& m);
double projection_error_sq(const Function& g, const Interval& k, int p);

/// Piecewise polynomial over sorted breakpoints 0 = x_0 < ... < x_n = 1.
class PiecewisePoly {
 public:
  PiecewisePoly() = default;
  explicit PiecewisePoly(std::vector<LegendreCoeffs> pieces);

  static PiecewisePoly zero(std::span<const double> breakpoints);

  std::span<const LegendreCoeffs> pieces() const { return pieces_; }
  const LegendreCoeffs& piece(std::size_t i) const { return pieces_[i]; }
  std::size_t size() const { return pieces_.size(); }
  std::vector<double> breakpoints() const;
  int max_degree() const;

  /// Piece containing x; at a breakpoint the right piece wins except at 1.
  std::size_t locate(double x) const;
  double operator()(double x) const;
  double derivative_at(double x) const;

  /// Function view with breakpoints as kinks.
  Function as_function() const;

  std::string to_json() const;

 private:
  std::vector<LegendreCoeffs> pieces_;
};

PiecewisePoly derivative(const PiecewisePoly& q);
/// r' = q on every piece, r(0) = value_at_zero, continuous across breakpoints.
PiecewisePoly antiderivative(const PiecewisePoly& q, double value_at_zero);
double h1_seminorm_sq(const PiecewisePoly& q);
double h1_seminorm(const PiecewisePoly& q);
double l2_norm_sq(const PiecewisePoly& q);

}  // namespace hpafem
