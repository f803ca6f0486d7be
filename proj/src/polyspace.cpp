#include "hpafem/polyspace.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <memory>
#include <nlohmann/json.hpp>

#include "hpafem/error.hpp"

namespace hpafem {

namespace {

double to_reference(const Interval& iv, double x) { return (2.0 * x - iv.a - iv.b) / iv.length(); }

// d/dt of sum c_j P_j(t), in the Legendre basis.
std::vector<double> reference_derivative(std::span<const double> c) {
  const int n = static_cast<int>(c.size()) - 1;
  if (n <= 0) return {0.0};
  std::vector<double> d(n, 0.0);
  d[n - 1] = (2.0 * n - 1.0) * c[n];
  for (int k = n - 1; k >= 1; --k) {
    const double next = (k + 1 <= n - 1) ? d[k + 1] : 0.0;
    d[k - 1] = (2.0 * k - 1.0) * (c[k] + next / (2.0 * k + 3.0));
  }
  return d;
}

// Antiderivative in t, constant coefficient left at zero.
std::vector<double> reference_antiderivative(std::span<const double> c) {
  const int n = static_cast<int>(c.size()) - 1;
  std::vector<double> a(n + 2, 0.0);
  for (int j = 1; j <= n + 1; ++j) {
    const double lower = c[j - 1] / (2.0 * j - 1.0);
    const double upper = (j + 1 <= n) ? c[j + 1] / (2.0 * j + 3.0) : 0.0;
    a[j] = lower - upper;
  }
  return a;
}

double value_at_minus_one(std::span<const double> c) {
  double s = 0.0;
  for (std::size_t j = 0; j < c.size(); ++j) s += (j % 2 == 0) ? c[j] : -c[j];
  return s;
}

bool interior_kink(const Function& g, const Interval& k) {
  for (double x : g.kinks()) {
    if (x > k.a && x < k.b) return true;
  }
  for (double x : g.singular()) {
    if (x >= k.a && x <= k.b) return true;
  }
  return false;
}

}  // namespace

void legendre_values(int n, double t, std::span<double> out) {
  out[0] = 1.0;
  if (n >= 1) out[1] = t;
  for (int k = 2; k <= n; ++k) out[k] = ((2.0 * k - 1.0) * t * out[k - 1] - (k - 1.0) * out[k - 2]) / k;
}

LegendreCoeffs::LegendreCoeffs(Interval interval, std::vector<double> coeffs)
    : iv(interval), c(std::move(coeffs)) {
  if (c.empty()) c.push_back(0.0);
}

LegendreCoeffs LegendreCoeffs::zero(Interval interval, int degree) {
  return LegendreCoeffs(interval, std::vector<double>(std::max(degree, 0) + 1, 0.0));
}

double LegendreCoeffs::at_reference(double t) const {
  // Clenshaw recurrence for the Legendre three-term relation.
  const int n = degree();
  double b1 = 0.0, b2 = 0.0;
  for (int k = n; k >= 1; --k) {
    const double alpha = (2.0 * k + 1.0) / (k + 1.0) * t;
    const double beta = -(k + 1.0) / (k + 2.0);
    const double b0 = c[k] + alpha * b1 + beta * b2;
    b2 = b1;
    b1 = b0;
  }
  return c[0] + t * b1 - 0.5 * b2;
}

double LegendreCoeffs::operator()(double x) const { return at_reference(to_reference(iv, x)); }

double LegendreCoeffs::derivative_at(double x) const { return derivative(*this)(x); }

LegendreCoeffs derivative(const LegendreCoeffs& q) {
  auto d = reference_derivative(q.c);
  const double s = 2.0 / q.iv.length();
  for (double& v : d) v *= s;
  return LegendreCoeffs(q.iv, std::move(d));
}

LegendreCoeffs antiderivative(const LegendreCoeffs& q, double value_at_left) {
  auto a = reference_antiderivative(q.c);
  const double s = 0.5 * q.iv.length();
  for (double& v : a) v *= s;
  a[0] = value_at_left - value_at_minus_one(a);
  return LegendreCoeffs(q.iv, std::move(a));
}

LegendreCoeffs multiply(const LegendreCoeffs& x, const LegendreCoeffs& y) {
  const int m = x.degree() + y.degree();
  const QuadratureRule& rule = gauss_legendre(m + 1);
  std::vector<double> out(m + 1, 0.0);
  std::vector<double> p(m + 1);
  for (int i = 0; i < rule.order; ++i) {
    const double t = rule.nodes[i];
    const double v = x.at_reference(t) * y.at_reference(t) * rule.weights[i];
    legendre_values(m, t, p);
    for (int j = 0; j <= m; ++j) out[j] += v * p[j];
  }
  for (int j = 0; j <= m; ++j) out[j] *= (2.0 * j + 1.0) / 2.0;
  return LegendreCoeffs(x.iv, std::move(out));
}

LegendreCoeffs add(const LegendreCoeffs& x, const LegendreCoeffs& y, double scale_y) {
  std::vector<double> out(std::max(x.c.size(), y.c.size()), 0.0);
  for (std::size_t j = 0; j < x.c.size(); ++j) out[j] += x.c[j];
  for (std::size_t j = 0; j < y.c.size(); ++j) out[j] += scale_y * y.c[j];
  return LegendreCoeffs(x.iv, std::move(out));
}

LegendreCoeffs truncate(const LegendreCoeffs& q, int p) {
  std::vector<double> c(q.c.begin(), q.c.begin() + std::min<std::size_t>(q.c.size(), p + 1));
  return LegendreCoeffs(q.iv, std::move(c));
}

double integral(const LegendreCoeffs& q) { return q.c[0] * q.iv.length(); }

double mean(const LegendreCoeffs& q) { return q.c[0]; }

double l2_norm_sq(const LegendreCoeffs& q) {
  double s = 0.0;
  for (std::size_t j = 0; j < q.c.size(); ++j) s += q.c[j] * q.c[j] / (2.0 * j + 1.0);
  return s * q.iv.length();
}

double h1_seminorm_sq(const LegendreCoeffs& q) { return l2_norm_sq(derivative(q)); }

double h1_seminorm(const LegendreCoeffs& q) { return std::sqrt(h1_seminorm_sq(q)); }

Moments compute_moments(const Function& g, const Interval& k, int p) {
  Moments m;
  m.coeffs.assign(p + 1, 0.0);
  std::vector<double> pv(p + 1);
  const int points = default_points(p, interior_kink(g, k) ? -1 : g.piece_degree());
  visit_nodes(k, g.kinks(), g.singular(), points, [&](double x, double w) {
    const double y = checked(g(x), x);
    legendre_values(p, to_reference(k, x), pv);
    for (int j = 0; j <= p; ++j) m.coeffs[j] += w * y * pv[j];
    m.norm_sq += w * y * y;
  });
  const double h = k.length();
  for (int j = 0; j <= p; ++j) m.coeffs[j] *= (2.0 * j + 1.0) / h;
  return m;
}

double projection_error_sq(const Function& g, const Interval& k, int p, const Moments& m) {
  if (g.constant_value()) return 0.0;
  if (g.piece_degree() >= 0 && g.piece_degree() <= p && !interior_kink(g, k)) return 0.0;
  const int top = std::min<int>(p, static_cast<int>(m.coeffs.size()) - 1);
  const double h = k.length();
  double captured = 0.0;
  for (int j = 0; j <= top; ++j) captured += h * m.coeffs[j] * m.coeffs[j] / (2.0 * j + 1.0);
  const double err = m.norm_sq - captured;
  if (err > 1e-3 * m.norm_sq) return err;
  // Parseval cancels badly here; integrate the difference directly.
  LegendreCoeffs q(k, std::vector<double>(m.coeffs.begin(), m.coeffs.begin() + top + 1));
  const int points = default_points(static_cast<int>(m.coeffs.size()) - 1,
                                    interior_kink(g, k) ? -1 : g.piece_degree());
  double direct = 0.0;
  visit_nodes(k, g.kinks(), g.singular(), points, [&](double x, double w) {
    const double r = checked(g(x), x) - q(x);
    direct += w * r * r;
  });
  return direct;
}

double projection_error_sq(const Function& g, const Interval& k, int p) {
  return projection_error_sq(g, k, p, compute_moments(g, k, p));
}

LegendreCoeffs project_l2(const Function& f, const Interval& k, int p) {
  if (p < 0) throw Error(ErrorKind::UnsupportedDegree, "negative projection degree");
  if (auto c = f.constant_value()) {
    auto q = LegendreCoeffs::zero(k, p);
    q.c[0] = *c;
    return q;
  }
  return LegendreCoeffs(k, compute_moments(f, k, p).coeffs);
}

LegendreCoeffs project_l2(const Function& f, const RootPartition& roots, const ElementId& k, int p) {
  return project_l2(f, roots.interval(k), p);
}

LegendreCoeffs project_h1(const Function& v, const Interval& k, int p) {
  if (p < 1) throw Error(ErrorKind::UnsupportedDegree, "the H1 projection needs degree at least 1");
  if (!v.has_derivative()) throw Error(ErrorKind::InputFunction, "the H1 projection needs a derivative");
  if (auto c = v.constant_value()) {
    auto q = LegendreCoeffs::zero(k, p);
    q.c[0] = *c;
    return q;
  }
  const Function dv = v.derivative_function();
  const auto d = project_l2(dv, k, p - 1);
  std::vector<double> scaled(d.c);
  for (double& x : scaled) x *= 0.5 * k.length();
  auto a = reference_antiderivative(scaled);
  a.resize(p + 1);
  a[0] = compute_moments(v, k, 0).coeffs[0];
  return LegendreCoeffs(k, std::move(a));
}

LegendreCoeffs project_h1(const Function& v, const RootPartition& roots, const ElementId& k, int p) {
  return project_h1(v, roots.interval(k), p);
}

PiecewisePoly::PiecewisePoly(std::vector<LegendreCoeffs> pieces) : pieces_(std::move(pieces)) {
  if (pieces_.empty()) throw Error(ErrorKind::InvalidPartition, "piecewise polynomial needs a piece");
  if (pieces_.front().iv.a != 0.0 || pieces_.back().iv.b != 1.0) {
    throw Error(ErrorKind::InvalidPartition, "piecewise polynomial must cover [0,1]");
  }
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    if (!(pieces_[i].iv.b > pieces_[i].iv.a)) {
      throw Error(ErrorKind::InvalidPartition, "breakpoints must be strictly increasing");
    }
    if (i > 0 && pieces_[i].iv.a != pieces_[i - 1].iv.b) {
      throw Error(ErrorKind::InvalidPartition, "pieces must share breakpoints");
    }
  }
}

PiecewisePoly PiecewisePoly::zero(std::span<const double> breakpoints) {
  std::vector<LegendreCoeffs> pieces;
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    pieces.push_back(LegendreCoeffs::zero({breakpoints[i], breakpoints[i + 1]}));
  }
  return PiecewisePoly(std::move(pieces));
}

std::vector<double> PiecewisePoly::breakpoints() const {
  std::vector<double> x{0.0};
  for (const auto& p : pieces_) x.push_back(p.iv.b);
  return x;
}

int PiecewisePoly::max_degree() const {
  int m = 0;
  for (const auto& p : pieces_) m = std::max(m, p.degree());
  return m;
}

std::size_t PiecewisePoly::locate(double x) const {
  auto it = std::upper_bound(pieces_.begin(), pieces_.end(), x,
                             [](double v, const LegendreCoeffs& p) { return v < p.iv.b; });
  if (it == pieces_.end()) return pieces_.size() - 1;
  return static_cast<std::size_t>(it - pieces_.begin());
}

double PiecewisePoly::operator()(double x) const { return pieces_[locate(x)](x); }

double PiecewisePoly::derivative_at(double x) const { return pieces_[locate(x)].derivative_at(x); }

Function PiecewisePoly::as_function() const {
  auto self = std::make_shared<const PiecewisePoly>(*this);
  auto deriv = std::make_shared<const PiecewisePoly>(hpafem::derivative(*this));
  auto bp = breakpoints();
  std::vector<double> kinks(bp.begin() + 1, bp.end() - 1);
  Function f([self](double x) { return (*self)(x); }, [deriv](double x) { return (*deriv)(x); },
             std::move(kinks));
  f.set_piece_degree(max_degree());
  return f;
}

std::string PiecewisePoly::to_json() const {
  nlohmann::json j;
  j["breakpoints"] = breakpoints();
  auto arr = nlohmann::json::array();
  for (const auto& p : pieces_) arr.push_back(p.c);
  j["coefficients"] = arr;
  return j.dump();
}

PiecewisePoly derivative(const PiecewisePoly& q) {
  std::vector<LegendreCoeffs> out;
  out.reserve(q.size());
  for (const auto& p : q.pieces()) out.push_back(derivative(p));
  return PiecewisePoly(std::move(out));
}

PiecewisePoly antiderivative(const PiecewisePoly& q, double value_at_zero) {
  std::vector<LegendreCoeffs> out;
  out.reserve(q.size());
  double left = value_at_zero;
  for (const auto& p : q.pieces()) {
    out.push_back(antiderivative(p, left));
    left += integral(p);
  }
  return PiecewisePoly(std::move(out));
}

double h1_seminorm_sq(const PiecewisePoly& q) {
  double s = 0.0;
  for (const auto& p : q.pieces()) s += h1_seminorm_sq(p);
  return s;
}

double h1_seminorm(const PiecewisePoly& q) { return std::sqrt(h1_seminorm_sq(q)); }

double l2_norm_sq(const PiecewisePoly& q) {
  double s = 0.0;
  for (const auto& p : q.pieces()) s += l2_norm_sq(p);
  return s;
}

}  // namespace hpafem
