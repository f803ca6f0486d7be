#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <cstdint>
#include <utility>
#include <vector>

#include "hpafem/execution.hpp"
#include "hpafem/function.hpp"
#include "hpafem/mesh1d.hpp"
#include "hpafem/polyspace.hpp"

namespace hpafem {

/// Shape functions on [-1,1]: hats (1-t)/2, (1+t)/2 and bubbles
/// (P_k - P_{k-2}) / sqrt(2(2k-1)), k = 2..p.
double shape_value(int k, double t);
double shape_derivative(int k, double t);

/// H1_0-conforming hp space: interior vertices first, then the bubbles of
/// each element in order.
class ConformingSpace {
 public:
  explicit ConformingSpace(HpPartition partition);

  const HpPartition& partition() const { return partition_; }
  std::size_t dim() const { return dim_; }
  std::size_t element_count() const { return partition_.size(); }

  /// Global dof of local shape k on element i, or -1 for boundary hats.
  long global_dof(std::size_t i, int k) const;
  int local_count(std::size_t i) const { return partition_[i].degree() + 1; }

 private:
  HpPartition partition_;
  std::vector<std::size_t> bubble_offset_;
  std::size_t dim_ = 0;
};

/// Coefficients lambda = (nu, sigma) and load f = (f1, f2); any Function
/// works, piecewise polynomials are integrated exactly.
struct Coefficients {
  Function nu = Function::constant(1.0);
  Function sigma = Function::constant(0.0);
};
struct Load {
  Function f1 = Function::zero();
  Function f2 = Function::zero();
};

struct LinearSystem {
  Eigen::SparseMatrix<double> matrix;
  Eigen::VectorXd rhs;
};

/// a(u,v) = int nu u'v' + sigma u v and <f,v> = int f1 v - f2 v'.
LinearSystem assemble(const ConformingSpace& space, const Coefficients& lam, const Load& f,
                      Exec exec = default_exec());

struct GalerkinSolution {
  ConformingSpace space;
  Eigen::VectorXd coefficients;
  PiecewisePoly piecewise;
  std::uint64_t fingerprint = 0;

  const PiecewisePoly& as_piecewise() const { return piecewise; }
};

/// Galerkin solution. Throws CoercivityViolation if the factorization fails.
GalerkinSolution solve(const ConformingSpace& space, const Load& f, const Coefficients& lam,
                       Exec exec = default_exec());

/// Legendre form of a coefficient vector.
PiecewisePoly to_piecewise(const ConformingSpace& space, const Eigen::VectorXd& coefficients);

/// |||v|||^2 = int nu v'^2 + sigma v^2 over (0,1).
double energy_norm_sq(const Function& v, const Coefficients& lam);
double energy_norm(const Function& v, const Coefficients& lam);
double energy_norm(const PiecewisePoly& v, const Coefficients& lam);

/// |v - w|^2_{H1(0,1)} by quadrature on the merged breakpoints.
double h1_distance_sq(const Function& v, const Function& w);

/// v - w with merged hints.
Function difference(const Function& v, const Function& w);

/// Conforming approximation in V^c_D glued from the elementwise H1
/// projections, and |v - w|^2_{H1}. Requires v in H1_0.
std::pair<PiecewisePoly, double> best_conforming_approx(const Function& v, const HpPartition& d);

}  // namespace hpafem
