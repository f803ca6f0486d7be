#include "hpafem/error_functional.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <mutex>

#include "hpafem/error.hpp"

namespace hpafem {

namespace {

int bucket_for(int p) {
  int b = 7;
  while (b < p) b = 2 * b + 1;
  return b;
}

bool smooth_on(const Function& g, const Interval& k) {
  for (double x : g.kinks()) {
    if (x > k.a && x < k.b) return false;
  }
  for (double x : g.singular()) {
    if (x >= k.a && x <= k.b) return false;
  }
  return true;
}

bool trivially_exact(const Function& g, const Interval& k, int p) {
  if (g.constant_value() && *g.constant_value() == 0.0) return true;
  if (p < 0) return false;
  if (g.constant_value()) return true;
  return g.piece_degree() >= 0 && g.piece_degree() <= p && smooth_on(g, k);
}

void check_range(const Function& f, double lo, double hi, const char* name, int samples) {
  for (int i = 0; i < samples; ++i) {
    const double x = static_cast<double>(i) / (samples - 1);
    const double y = checked(f(x), x);
    if (y < lo - 1e-9 || y > hi + 1e-9) {
      throw Error(ErrorKind::Parameter,
                  fmt::format("{}({}) = {} outside the declared range [{}, {}]", name, x, y, lo, hi));
    }
  }
}

}  // namespace

void ProblemData::validate(int samples) const {
  if (!(nu_star > 0.0) || nu_sup < nu_star || sigma_sup < 0.0) {
    throw Error(ErrorKind::Parameter, "need 0 < nu_star <= nu_sup and sigma_sup >= 0");
  }
  check_range(nu, nu_star, nu_sup, "nu", samples);
  check_range(sigma, 0.0, sigma_sup, "sigma", samples);
}

DataProjection project_data(const HpPartition& d, const ProblemData& data, Exec exec) {
  const std::size_t n = d.size();
  std::vector<LegendreCoeffs> f1(n), f2(n), nu(n), sigma(n);
  DataProjection out;
  out.data_degree.resize(n);
  for_each_index(exec, n, [&](std::size_t i) {
    const Interval k = d.interval(i);
    const int p = d[i].degree();
    out.data_degree[i] = p;
    f1[i] = project_l2(data.f1, k, p - 1);
    f2[i] = project_l2(data.f2, k, p);
    nu[i] = project_h1(data.nu, k, p + 1);
    sigma[i] = project_h1(data.sigma, k, p + 1);
  });
  out.f1 = PiecewisePoly(std::move(f1));
  out.f2 = PiecewisePoly(std::move(f2));
  out.nu = PiecewisePoly(std::move(nu));
  out.sigma = PiecewisePoly(std::move(sigma));
  return out;
}

ProblemData as_problem(const DataProjection& proj, const ProblemData& data) {
  ProblemData out = data;
  out.f1 = proj.f1.as_function();
  out.f2 = proj.f2.as_function();
  out.nu = proj.nu.as_function();
  out.sigma = proj.sigma.as_function();
  return out;
}

bool validate_root_fineness(const HPartition& roots, const ProblemData& data) {
  const double limit_sq = 0.25 * data.nu_star * data.nu_star;
  for (std::size_t i = 0; i < roots.size(); ++i) {
    const Interval k = roots.interval(i);
    for (const Function* g : {&data.nu, &data.sigma}) {
      if (trivially_exact(*g, k, 2)) continue;
      const Function dg = g->derivative_function();
      if (trivially_exact(dg, k, 0)) continue;
      if (projection_error_sq(dg, k, 0) > limit_sq * (1.0 + 1e-12)) return false;
    }
  }
  return true;
}

std::size_t ErrorFunctional::MomentKeyHash::operator()(const MomentKey& k) const noexcept {
  return ElementIdHash{}(k.id) ^ (static_cast<std::size_t>(k.component) * 0x9E3779B1U) ^
         (static_cast<std::size_t>(k.bucket) << 20);
}

std::size_t ErrorFunctional::TotalKeyHash::operator()(const TotalKey& k) const noexcept {
  return ElementIdHash{}(k.id) ^ (static_cast<std::size_t>(k.degree) * 0x85EBCA77U);
}

ErrorFunctional::ErrorFunctional(std::shared_ptr<const ProblemData> data, RootsPtr roots, double delta)
    : data_(std::move(data)), roots_(std::move(roots)), delta_(delta) {
  if (!(delta_ > 0.0)) throw Error(ErrorKind::Parameter, "penalty delta must be positive");
  funcs_[kVPrime] = Function::zero();
  funcs_[kF1] = data_->f1;
  funcs_[kF2] = data_->f2;
  funcs_[kNuPrime] = data_->nu.derivative_function();
  funcs_[kSigmaPrime] = data_->sigma.derivative_function();
}

void ErrorFunctional::set_v(Function v) {
  Function dv = v.derivative_function();
  std::unique_lock lock(mutex_);
  funcs_[kVPrime] = std::move(dv);
  ++generation_;
  std::erase_if(moments_, [](const auto& kv) { return kv.first.component == kVPrime; });
  totals_.clear();
}

const Function& ErrorFunctional::component(int c) const { return funcs_[c]; }

Moments ErrorFunctional::moments(int c, const ElementId& k, int bucket) {
  const MomentKey key{k, c, bucket};
  {
    std::shared_lock lock(mutex_);
    auto it = moments_.find(key);
    if (it != moments_.end()) return it->second;
  }
  Moments m = compute_moments(component(c), roots_->interval(k), bucket);
  std::unique_lock lock(mutex_);
  return moments_.emplace(key, std::move(m)).first->second;
}

double ErrorFunctional::error_sq(int c, const ElementId& k, int p) {
  const Function& g = component(c);
  const Interval iv = roots_->interval(k);
  if (trivially_exact(g, iv, p)) return 0.0;
  if (p < 0) return norm_sq(c, k);
  const Moments m = moments(c, k, bucket_for(p));
  return std::max(0.0, projection_error_sq(g, iv, p, m));
}

double ErrorFunctional::norm_sq(int c, const ElementId& k) {
  const Function& g = component(c);
  if (auto v = g.constant_value()) return (*v) * (*v) * roots_->interval(k).length();
  return moments(c, k, bucket_for(0)).norm_sq;
}

double ErrorFunctional::v_error(const ElementId& k, int p) {
  if (p < 1) throw Error(ErrorKind::UnsupportedDegree, "local error needs degree at least 1");
  return error_sq(kVPrime, k, std::min(p, max_degree_) - 1);
}

double ErrorFunctional::oscillation_sq(const ElementId& k, int p) {
  if (p < 1) throw Error(ErrorKind::UnsupportedDegree, "oscillation needs degree at least 1");
  p = std::min(p, max_degree_);
  const double h = roots_->interval(k).length();
  const double w = h / p;
  return w * w * error_sq(kF1, k, p - 1) + error_sq(kF2, k, p) + error_sq(kNuPrime, k, p) +
         error_sq(kSigmaPrime, k, p);
}

LocalErrorBreakdown ErrorFunctional::local(const ElementId& k, int p) {
  LocalErrorBreakdown out;
  out.e_v = v_error(k, p);
  out.osc2 = oscillation_sq(k, p);
  out.delta = delta_;
  out.total = out.e_v + out.osc2 / delta_;
  return out;
}

double ErrorFunctional::e(const ElementId& k, int d) {
  if (d < 0) throw Error(ErrorKind::UnsupportedDegree, "negative degree");
  d = std::min(d, max_degree_);
  const TotalKey key{k, d};
  {
    std::shared_lock lock(mutex_);
    auto it = totals_.find(key);
    if (it != totals_.end()) return it->second;
  }
  double value = 0.0;
  if (d == 0) {
    const double h = roots_->interval(k).length();
    const double osc0 = h * h * norm_sq(kF1, k) + norm_sq(kF2, k) + norm_sq(kNuPrime, k) +
                        norm_sq(kSigmaPrime, k);
    value = norm_sq(kVPrime, k) + osc0 / delta_;
  } else {
    value = local(k, d).total;
  }
  std::unique_lock lock(mutex_);
  totals_.emplace(key, value);
  return value;
}

double ErrorFunctional::global_error(const HpPartition& d, Exec exec) {
  std::vector<double> parts(d.size());
  for_each_index(exec, d.size(), [&](std::size_t i) { parts[i] = e(d[i].element, d[i].d); });
  double sum = 0.0;
  for (double v : parts) sum += v;
  return sum;
}

std::size_t ErrorFunctional::evaluations() const {
  std::shared_lock lock(mutex_);
  return totals_.size();
}

}  // namespace hpafem
