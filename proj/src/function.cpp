#include "hpafem/function.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <map>
#include <mutex>
#include <numbers>

#include "hpafem/error.hpp"

namespace hpafem {

namespace {

constexpr double kGradingRatio = 0.15;
constexpr double kGradingDepth = 1e-50;

QuadratureRule build_rule(int n) {
  QuadratureRule rule;
  rule.order = n;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double t = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = t;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (t * p1 - p0) / (t * t - 1.0);
      const double dt = p1 / dp;
      t -= dt;
      if (std::abs(dt) < 1e-16) {
        // One more evaluation so dp matches the converged node.
        p0 = 1.0;
        p1 = t;
        for (int k = 2; k <= n; ++k) {
          const double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        if (n == 1) p0 = 1.0;
        dp = n * (t * p1 - p0) / (t * t - 1.0);
        break;
      }
    }
    const double w = 2.0 / ((1.0 - t * t) * dp * dp);
    rule.nodes[i] = -t;
    rule.nodes[n - 1 - i] = t;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

void visit_smooth(double a, double b, const QuadratureRule& rule,
                  const std::function<void(double, double)>& fn) {
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  for (int i = 0; i < rule.order; ++i) fn(mid + half * rule.nodes[i], half * rule.weights[i]);
}

// Geometric pieces of [a,b] accumulating at `a` (toward_left) or `b`.
void visit_graded(double a, double b, bool toward_left, const QuadratureRule& rule,
                  const std::function<void(double, double)>& fn) {
  const double len = b - a;
  double outer = 1.0;
  while (outer > kGradingDepth) {
    const double inner = outer * kGradingRatio;
    if (toward_left) {
      visit_smooth(a + len * inner, a + len * outer, rule, fn);
    } else {
      visit_smooth(b - len * outer, b - len * inner, rule, fn);
    }
    outer = inner;
  }
  if (toward_left) {
    visit_smooth(a, a + len * outer, rule, fn);
  } else {
    visit_smooth(b - len * outer, b, rule, fn);
  }
}

}  // namespace

const QuadratureRule& gauss_legendre(int n) {
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<QuadratureRule>> cache;
  if (n < 1) throw Error(ErrorKind::Parameter, "quadrature rule needs at least one point");
  std::lock_guard lock(mutex);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<QuadratureRule>(build_rule(n));
  return *slot;
}

Function::Function() : Function(constant(0.0)) {}

Function::Function(Fn value, Fn derivative, std::vector<double> kinks, std::vector<double> singular)
    : value_(std::move(value)),
      derivative_(std::move(derivative)),
      kinks_(std::move(kinks)),
      singular_(std::move(singular)) {
  std::sort(kinks_.begin(), kinks_.end());
  std::sort(singular_.begin(), singular_.end());
}

Function Function::constant(double c) {
  Function f([c](double) { return c; }, [](double) { return 0.0; });
  f.constant_ = c;
  f.piece_degree_ = 0;
  return f;
}

double Function::derivative(double x) const {
  if (!derivative_) throw Error(ErrorKind::InputFunction, "function has no derivative");
  return derivative_(x);
}

Function Function::derivative_function() const {
  if (!derivative_) throw Error(ErrorKind::InputFunction, "function has no derivative");
  Function d(derivative_, {}, kinks_, singular_);
  if (piece_degree_ >= 0) d.piece_degree_ = std::max(0, piece_degree_ - 1);
  if (constant_) d = constant(0.0);
  return d;
}

std::vector<double> merge_points(std::initializer_list<std::span<const double>> lists) {
  std::vector<double> out;
  for (auto l : lists) out.insert(out.end(), l.begin(), l.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

void visit_nodes(const Interval& iv, std::span<const double> kinks, std::span<const double> singular,
                 int points, const std::function<void(double, double)>& fn) {
  const QuadratureRule& rule = gauss_legendre(points);
  std::vector<double> cuts{iv.a};
  for (auto list : {kinks, singular}) {
    for (double x : list) {
      if (x > iv.a && x < iv.b) cuts.push_back(x);
    }
  }
  cuts.push_back(iv.b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  auto is_singular = [&](double x) {
    return std::binary_search(singular.begin(), singular.end(), x);
  };
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = cuts[i];
    const double b = cuts[i + 1];
    const bool sa = is_singular(a);
    const bool sb = is_singular(b);
    if (sa && sb) {
      const double m = 0.5 * (a + b);
      visit_graded(a, m, true, rule, fn);
      visit_graded(m, b, false, rule, fn);
    } else if (sa) {
      visit_graded(a, b, true, rule, fn);
    } else if (sb) {
      visit_graded(a, b, false, rule, fn);
    } else {
      visit_smooth(a, b, rule, fn);
    }
  }
}

NodeSet collect_nodes(const Interval& iv, std::span<const double> kinks, std::span<const double> singular,
                      int points) {
  NodeSet s;
  visit_nodes(iv, kinks, singular, points, [&](double x, double w) {
    s.x.push_back(x);
    s.w.push_back(w);
  });
  return s;
}

int default_points(int p, int piece_degree) {
  if (piece_degree >= 0) return std::max(1, (piece_degree + p) / 2 + 2);
  return std::max(2 * p + 8, 32);
}

double checked(double y, double x) {
  if (!std::isfinite(y)) {
    throw Error(ErrorKind::InputFunction, fmt::format("non-finite function value {} at x = {}", y, x));
  }
  return y;
}

}  // namespace hpafem
