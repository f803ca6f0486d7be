#include "hpafem/fem1d.hpp"

#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <cstring>
#include <fmt/format.h>

#include "hpafem/error.hpp"

namespace hpafem {

namespace {

double bubble_scale(int k) { return std::sqrt(2.0 * (2.0 * k - 1.0)); }

// Values and t-derivatives of all p+1 shapes at t, from P_0..P_p.
void shapes_at(int p, double t, std::vector<double>& leg, std::vector<double>& val, std::vector<double>& der) {
  leg.resize(p + 1);
  val.resize(p + 1);
  der.resize(p + 1);
  legendre_values(p, t, leg);
  val[0] = 0.5 * (1.0 - t);
  val[1] = 0.5 * (1.0 + t);
  der[0] = -0.5;
  der[1] = 0.5;
  for (int k = 2; k <= p; ++k) {
    val[k] = (leg[k] - leg[k - 2]) / bubble_scale(k);
    der[k] = std::sqrt((2.0 * k - 1.0) / 2.0) * leg[k - 1];
  }
}

int integrand_points(int p, std::initializer_list<std::pair<const Function*, int>> terms) {
  int deg = 0;
  for (const auto& [f, extra] : terms) {
    if (f->piece_degree() < 0) return default_points(2 * p);
    deg = std::max(deg, f->piece_degree() + extra);
  }
  return deg / 2 + 2;
}

std::uint64_t fnv1a(std::uint64_t h, const void* data, std::size_t n) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= bytes[i];
    h *= 0x100000001B3ULL;
  }
  return h;
}

struct LocalSystem {
  Eigen::MatrixXd a;
  Eigen::VectorXd b;
};

LocalSystem local_system(const Interval& k, int p, const Coefficients& lam, const Load& f) {
  const int n = p + 1;
  LocalSystem out{Eigen::MatrixXd::Zero(n, n), Eigen::VectorXd::Zero(n)};
  const double h = k.length();
  const int points = integrand_points(p, {{&lam.nu, 2 * p - 2}, {&lam.sigma, 2 * p}, {&f.f1, p}, {&f.f2, p - 1}});
  const auto kinks = merge_points({lam.nu.kinks(), lam.sigma.kinks(), f.f1.kinks(), f.f2.kinks()});
  const auto singular = merge_points({lam.nu.singular(), lam.sigma.singular(), f.f1.singular(), f.f2.singular()});
  std::vector<double> leg, val, der;
  const bool zero_sigma = lam.sigma.constant_value() && *lam.sigma.constant_value() == 0.0;
  visit_nodes(k, kinks, singular, points, [&](double x, double w) {
    const double t = (2.0 * x - k.a - k.b) / h;
    shapes_at(p, t, leg, val, der);
    const double nu = checked(lam.nu(x), x) * (2.0 / h) * (2.0 / h);
    const double sigma = zero_sigma ? 0.0 : checked(lam.sigma(x), x);
    const double f1 = checked(f.f1(x), x);
    const double f2 = checked(f.f2(x), x) * (2.0 / h);
    for (int i = 0; i < n; ++i) {
      out.b(i) += w * (f1 * val[i] - f2 * der[i]);
      for (int j = i; j < n; ++j) out.a(i, j) += w * (nu * der[i] * der[j] + sigma * val[i] * val[j]);
    }
  });
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < i; ++j) out.a(i, j) = out.a(j, i);
  }
  return out;
}

}  // namespace

double shape_value(int k, double t) {
  std::vector<double> leg, val, der;
  shapes_at(std::max(k, 1), t, leg, val, der);
  return val[k];
}

double shape_derivative(int k, double t) {
  std::vector<double> leg, val, der;
  shapes_at(std::max(k, 1), t, leg, val, der);
  return der[k];
}

ConformingSpace::ConformingSpace(HpPartition partition) : partition_(std::move(partition)) {
  const std::size_t n = partition_.size();
  std::size_t next = n - 1;
  bubble_offset_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    bubble_offset_[i] = next;
    next += static_cast<std::size_t>(partition_[i].degree() - 1);
  }
  dim_ = next;
}

long ConformingSpace::global_dof(std::size_t i, int k) const {
  const std::size_t n = partition_.size();
  if (k == 0) return i == 0 ? -1 : static_cast<long>(i - 1);
  if (k == 1) return i + 1 == n ? -1 : static_cast<long>(i);
  return static_cast<long>(bubble_offset_[i] + static_cast<std::size_t>(k - 2));
}

LinearSystem assemble(const ConformingSpace& space, const Coefficients& lam, const Load& f, Exec exec) {
  const std::size_t ne = space.element_count();
  std::vector<LocalSystem> locals(ne);
  for_each_index(exec, ne, [&](std::size_t i) {
    locals[i] = local_system(space.partition().interval(i), space.partition()[i].degree(), lam, f);
  });
  std::vector<Eigen::Triplet<double>> trips;
  LinearSystem sys;
  sys.rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(space.dim()));
  for (std::size_t e = 0; e < ne; ++e) {
    const int n = space.local_count(e);
    for (int i = 0; i < n; ++i) {
      const long gi = space.global_dof(e, i);
      if (gi < 0) continue;
      sys.rhs(gi) += locals[e].b(i);
      for (int j = 0; j < n; ++j) {
        const long gj = space.global_dof(e, j);
        if (gj < 0) continue;
        trips.emplace_back(gi, gj, locals[e].a(i, j));
      }
    }
  }
  sys.matrix.resize(static_cast<Eigen::Index>(space.dim()), static_cast<Eigen::Index>(space.dim()));
  sys.matrix.setFromTriplets(trips.begin(), trips.end());
  return sys;
}

PiecewisePoly to_piecewise(const ConformingSpace& space, const Eigen::VectorXd& coefficients) {
  std::vector<LegendreCoeffs> pieces;
  pieces.reserve(space.element_count());
  for (std::size_t e = 0; e < space.element_count(); ++e) {
    const int p = space.partition()[e].degree();
    std::vector<double> c(p + 1, 0.0);
    auto coef = [&](int k) {
      const long g = space.global_dof(e, k);
      return g < 0 ? 0.0 : coefficients(g);
    };
    const double ul = coef(0), ur = coef(1);
    c[0] += 0.5 * (ul + ur);
    c[1] += 0.5 * (ur - ul);
    for (int k = 2; k <= p; ++k) {
      const double b = coef(k) / bubble_scale(k);
      c[k] += b;
      c[k - 2] -= b;
    }
    pieces.emplace_back(space.partition().interval(e), std::move(c));
  }
  return PiecewisePoly(std::move(pieces));
}

GalerkinSolution solve(const ConformingSpace& space, const Load& f, const Coefficients& lam, Exec exec) {
  const LinearSystem sys = assemble(space, lam, f, exec);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(space.dim()));
  if (space.dim() > 0) {
    Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt(sys.matrix);
    if (llt.info() != Eigen::Success) {
      throw Error(ErrorKind::CoercivityViolation,
                  "stiffness matrix is not positive definite; check the root partition against the coefficient data");
    }
    x = llt.solve(sys.rhs);
    if (llt.info() != Eigen::Success || !x.allFinite()) {
      throw Error(ErrorKind::CoercivityViolation, "Galerkin solve failed");
    }
  }
  std::uint64_t h = 0xCBF29CE484222325ULL;
  const std::string part = serialize(space.partition());
  h = fnv1a(h, part.data(), part.size());
  h = fnv1a(h, sys.rhs.data(), sizeof(double) * static_cast<std::size_t>(sys.rhs.size()));
  for (int k = 0; k < sys.matrix.outerSize(); ++k) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(sys.matrix, k); it; ++it) {
      const double v = it.value();
      h = fnv1a(h, &v, sizeof v);
    }
  }
  GalerkinSolution sol{space, x, to_piecewise(space, x), h};
  return sol;
}

namespace {

// Integral over (0,1) of g, split at the merged hints.
double integrate(const std::function<double(double)>& g, std::span<const double> kinks,
                 std::span<const double> singular, int points) {
  double s = 0.0;
  visit_nodes({0.0, 1.0}, kinks, singular, points, [&](double x, double w) { s += w * g(x); });
  return s;
}

int combined_points(std::initializer_list<const Function*> fs, int extra) {
  int deg = 0;
  for (const Function* f : fs) {
    if (f->piece_degree() < 0) return 64;
    deg = std::max(deg, f->piece_degree());
  }
  return (2 * deg + extra) / 2 + 2;
}

}  // namespace

double energy_norm_sq(const Function& v, const Coefficients& lam) {
  const auto kinks = merge_points({v.kinks(), lam.nu.kinks(), lam.sigma.kinks()});
  const auto singular = merge_points({v.singular(), lam.nu.singular(), lam.sigma.singular()});
  const int points = combined_points({&v, &lam.nu, &lam.sigma}, std::max(lam.nu.piece_degree(), lam.sigma.piece_degree()));
  return integrate(
      [&](double x) {
        const double dv = checked(v.derivative(x), x);
        const double vv = checked(v(x), x);
        return lam.nu(x) * dv * dv + lam.sigma(x) * vv * vv;
      },
      kinks, singular, points);
}

double energy_norm(const Function& v, const Coefficients& lam) { return std::sqrt(energy_norm_sq(v, lam)); }

double energy_norm(const PiecewisePoly& v, const Coefficients& lam) { return energy_norm(v.as_function(), lam); }

Function difference(const Function& v, const Function& w) {
  Function d([v, w](double x) { return v(x) - w(x); },
             (v.has_derivative() && w.has_derivative())
                 ? Function::Fn([v, w](double x) { return v.derivative(x) - w.derivative(x); })
                 : Function::Fn{},
             merge_points({v.kinks(), w.kinks()}), merge_points({v.singular(), w.singular()}));
  if (v.piece_degree() >= 0 && w.piece_degree() >= 0) d.set_piece_degree(std::max(v.piece_degree(), w.piece_degree()));
  return d;
}

double h1_distance_sq(const Function& v, const Function& w) {
  const Function d = difference(v, w);
  const int points = combined_points({&v, &w}, 0);
  return integrate(
      [&](double x) {
        const double g = checked(d.derivative(x), x);
        return g * g;
      },
      d.kinks(), d.singular(), points);
}

std::pair<PiecewisePoly, double> best_conforming_approx(const Function& v, const HpPartition& d) {
  std::vector<LegendreCoeffs> slopes(d.size());
  for_each_index(default_exec(), d.size(), [&](std::size_t i) {
    slopes[i] = derivative(project_h1(v, d.interval(i), d[i].degree()));
  });
  PiecewisePoly w = antiderivative(PiecewisePoly(std::move(slopes)), 0.0);
  const double err = h1_distance_sq(v, w.as_function());
  return {std::move(w), err};
}

}  // namespace hpafem
