#include "minkval/harmonics.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <string>
#include <utility>

#include "minkval/constants.hpp"
#include "minkval/error.hpp"

namespace minkval {

AmbientDim::AmbientDim(int n) : n_(n) {
  if (n < 3) throw InputError("ambient dimension must be >= 3, got " + std::to_string(n));
}

// ---------------------------------------------------------------------------
// Legendre polynomials

LegendreTable::LegendreTable(int dim, int kmax) : dim_(dim), kmax_(kmax) {
  if (dim < 2) throw InputError("LegendreTable: dimension must be >= 2");
  if (kmax < 0) throw InputError("LegendreTable: kmax must be >= 0");
  a_.assign(kmax + 1, 0.0);
  b_.assign(kmax + 1, 0.0);
  for (int k = 2; k <= kmax; ++k) {
    const double den = dim + k - 3.0;
    a_[k] = (dim + 2.0 * k - 4.0) / den;
    b_[k] = (k - 1.0) / den;
  }
}

void LegendreTable::check(int k, double t) const {
  if (k < 0 || k > kmax_) {
    throw DomainError("Legendre degree " + std::to_string(k) + " outside table (kmax=" +
                      std::to_string(kmax_) + ")");
  }
  if (!(std::abs(t) <= 1.0 + 1e-12)) throw DomainError("Legendre argument outside [-1,1]");
}

double LegendreTable::value(int k, double t) const {
  check(k, t);
  if (k == 0) return 1.0;
  double p0 = 1.0, p1 = t;
  for (int j = 2; j <= k; ++j) {
    const double p2 = a_[j] * t * p1 - b_[j] * p0;
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

double LegendreTable::derivative(int k, double t, int order) const {
  check(k, t);
  if (order < 0 || order > 2) throw InputError("LegendreTable: derivative order must be 0, 1 or 2");
  std::vector<double> p(k + 1), dp(k + 1), d2p(k + 1);
  evaluate(t, p, dp, d2p);
  return order == 0 ? p[k] : order == 1 ? dp[k] : d2p[k];
}

void LegendreTable::evaluate(double t, std::span<double> p, std::span<double> dp,
                             std::span<double> d2p) const {
  const int m = static_cast<int>(p.size());
  if (m == 0) return;
  check(m - 1, t);
  const bool want1 = !dp.empty(), want2 = !d2p.empty();
  if ((want1 && static_cast<int>(dp.size()) < m) || (want2 && static_cast<int>(d2p.size()) < m)) {
    throw InputError("LegendreTable::evaluate: derivative buffers too small");
  }
  if (want2 && !want1) throw InputError("LegendreTable::evaluate: second derivatives need first");
  p[0] = 1.0;
  if (want1) dp[0] = 0.0;
  if (want2) d2p[0] = 0.0;
  if (m == 1) return;
  p[1] = t;
  if (want1) dp[1] = 1.0;
  if (want2) d2p[1] = 0.0;
  for (int k = 2; k < m; ++k) {
    p[k] = a_[k] * t * p[k - 1] - b_[k] * p[k - 2];
    if (want1) {
      dp[k] = a_[k] * (p[k - 1] + t * dp[k - 1]) - b_[k] * dp[k - 2];
      if (want2) d2p[k] = a_[k] * (2.0 * dp[k - 1] + t * d2p[k - 1]) - b_[k] * d2p[k - 2];
    }
  }
}

// ---------------------------------------------------------------------------
// Quadrature

Quadrature gauss_jacobi(int dim, int order) {
  if (dim < 2) throw InputError("gauss_jacobi: dimension must be >= 2");
  if (order < 1) throw InputError("gauss_jacobi: order must be >= 1");
  const double lambda = (dim - 2) / 2.0;
  const double alpha = (dim - 3) / 2.0;

  Eigen::VectorXd diag = Eigen::VectorXd::Zero(order);
  Eigen::VectorXd sub(std::max(order - 1, 0));
  for (int k = 1; k < order; ++k) {
    double beta;
    if (lambda == 0.0) {
      beta = k == 1 ? 0.5 : 0.25;
    } else {
      beta = k * (k + 2.0 * lambda - 1.0) / (4.0 * (k + lambda) * (k + lambda - 1.0));
    }
    sub(k - 1) = std::sqrt(beta);
  }
  std::vector<double> x(order);
  if (order == 1) {
    x[0] = 0.0;
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
    for (int i = 0; i < order; ++i) x[i] = es.eigenvalues()(i);
  }

  LegendreTable table(dim, order);
  std::vector<double> p(order + 1), dp(order + 1);
  Quadrature q;
  q.nodes.resize(order);
  q.weights.resize(order);
  double total = 0.0;
  for (int i = 0; i < order; ++i) {
    double xi = x[i];
    for (int it = 0; it < 3; ++it) {
      table.evaluate(xi, p, dp);
      const double step = p[order] / dp[order];
      xi = std::clamp(xi - step, -1.0, 1.0);
    }
    table.evaluate(xi, p, dp);
    q.nodes[i] = xi;
    q.weights[i] = 1.0 / ((1.0 - xi * xi) * dp[order] * dp[order]);
    total += q.weights[i];
  }
  const double mass = std::sqrt(std::numbers::pi) * std::tgamma(alpha + 1.0) / std::tgamma(alpha + 1.5);
  for (double& w : q.weights) w *= mass / total;
  return q;
}

namespace {

std::mutex& cache_mutex() {
  static std::mutex m;
  return m;
}

const Quadrature& cached_rule(int dim, int order) {
  static std::map<std::pair<int, int>, std::unique_ptr<Quadrature>> cache;
  std::lock_guard lock(cache_mutex());
  auto& slot = cache[{dim, order}];
  if (!slot) slot = std::make_unique<Quadrature>(gauss_jacobi(dim, order));
  return *slot;
}

}  // namespace

double legendre_series(int dim, std::span<const double> c, double t, int order) {
  // running recurrence for P, P', P'' without storing the table
  const int m = static_cast<int>(c.size());
  if (m == 0) return 0.0;
  double p0 = 1.0, p1 = t, d0 = 0.0, d1 = 1.0, e0 = 0.0, e1 = 0.0;
  auto pick = [&](double p, double d, double e) { return order == 0 ? p : order == 1 ? d : e; };
  double s = c[0] * pick(p0, d0, e0);
  if (m > 1) s += c[1] * pick(p1, d1, e1);
  for (int k = 2; k < m; ++k) {
    const double den = dim + k - 3.0;
    const double a = (dim + 2.0 * k - 4.0) / den, b = (k - 1.0) / den;
    const double p2 = a * t * p1 - b * p0;
    const double d2 = a * (p1 + t * d1) - b * d0;
    const double e2 = a * (2.0 * d1 + t * e1) - b * e0;
    s += c[k] * pick(p2, d2, e2);
    p0 = p1;
    p1 = p2;
    d0 = d1;
    d1 = d2;
    e0 = e1;
    e1 = e2;
  }
  return s;
}

const Quadrature& gauss_legendre(int order) { return cached_rule(3, order); }

Estimate integrate_weighted(const std::function<double(double)>& g, int dim,
                            std::span<const double> kinks, double tol) {
  if (dim < 2) throw InputError("integrate_weighted: dimension must be >= 2");
  std::vector<double> cuts{0.0, std::numbers::pi};
  for (double k : kinks) {
    if (k > -1.0 && k < 1.0) cuts.push_back(std::acos(k));
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  const int power = dim - 2;
  auto segment = [&](double a, double b, int m) {
    const Quadrature& rule = gauss_legendre(m);
    const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
    double s = 0.0;
    for (int i = 0; i < m; ++i) {
      const double th = mid + half * rule.nodes[i];
      s += rule.weights[i] * g(std::cos(th)) * std::pow(std::sin(th), power);
    }
    return s * half;
  };

  Estimate out;
  for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
    const double a = cuts[s], b = cuts[s + 1];
    if (b - a <= 0.0) continue;
    int m = 32;
    double coarse = segment(a, b, m);
    for (;;) {
      const double fine = segment(a, b, 2 * m);
      const double err = std::abs(fine - coarse);
      if (err <= tol * std::max(1.0, std::abs(fine))) {
        out.value += fine;
        out.error += err;
        break;
      }
      m *= 2;
      if (m > 4096) {
        throw ToleranceError("integrate_weighted: quadrature did not converge (error " +
                             std::to_string(err) + ")");
      }
      coarse = fine;
    }
  }
  return out;
}

ZonalProfile ZonalProfile::legendre(int dim, std::vector<double> coeffs) {
  if (dim < 2) throw InputError("ZonalProfile::legendre: dimension must be >= 2");
  auto c = std::make_shared<const std::vector<double>>(std::move(coeffs));
  ZonalProfile p;
  p.dim = dim;
  p.f = [dim, c](double t) { return legendre_series(dim, *c, t, 0); };
  p.df = [dim, c](double t) { return legendre_series(dim, *c, t, 1); };
  p.d2f = [dim, c](double t) { return legendre_series(dim, *c, t, 2); };
  p.polynomial_degree = std::max<int>(0, c->size() - 1);
  return p;
}

Estimate zonal_coefficient(const ZonalProfile& f, int k, double tol) {
  if (k < 0) throw DomainError("zonal_coefficient: negative degree");
  if (!f.f) throw InputError("zonal_coefficient: profile has no function");
  const int n = f.dim;
  const double scale = omega(n - 1);
  if (f.polynomial_degree >= 0) {
    const Quadrature& rule = cached_rule(n, (f.polynomial_degree + k) / 2 + 1);
    LegendreTable table(n, k);
    double s = 0.0, mag = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const double v = rule.weights[i] * f(rule.nodes[i]) * table.value(k, rule.nodes[i]);
      s += v;
      mag += std::abs(v);
    }
    return {scale * s, scale * mag * 4e-16 * (rule.nodes.size() + 1)};
  }
  LegendreTable table(n, k);
  auto integrand = [&](double t) { return f(t) * table.value(k, t); };
  Estimate e = integrate_weighted(integrand, n, f.kinks, tol);
  return {scale * e.value, scale * e.error};
}

double zonal_coefficient(std::span<const PointMass> atoms, int dim, int k) {
  LegendreTable table(dim, std::max(k, 0));
  double s = 0.0;
  for (const PointMass& a : atoms) s += a.mass * table.value(k, std::clamp(a.t, -1.0, 1.0));
  return s;
}

double zonal_laplacian(const ZonalProfile& f, double t) {
  if (!f.df || !f.d2f) throw InputError("zonal_laplacian: profile lacks derivatives");
  return (1.0 - t * t) * f.d2f(t) - (f.dim - 1.0) * t * f.df(t);
}

namespace {

// sup over theta in [0, pi] of |g(cos theta)|, grid plus golden-section polish.
double sup_on_sphere(const std::function<double(double)>& g, int resolution) {
  if (resolution < 16) throw InputError("zonal_ck_norm: resolution must be >= 16");
  const double h = std::numbers::pi / (resolution - 1);
  auto val = [&](double th) { return std::abs(g(std::cos(std::clamp(th, 0.0, std::numbers::pi)))); };
  int best = 0;
  double bestv = -1.0;
  for (int i = 0; i < resolution; ++i) {
    const double v = val(i * h);
    if (v > bestv) {
      bestv = v;
      best = i;
    }
  }
  double lo = std::max(0.0, (best - 1) * h), hi = std::min(std::numbers::pi, (best + 1) * h);
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - r * (hi - lo), x2 = lo + r * (hi - lo);
  double f1 = val(x1), f2 = val(x2);
  for (int it = 0; it < 80; ++it) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + r * (hi - lo);
      f2 = val(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - r * (hi - lo);
      f1 = val(x1);
    }
  }
  return std::max({bestv, f1, f2});
}

}  // namespace

double zonal_ck_norm(const ZonalProfile& f, int k, int resolution) {
  if (k < 0 || k > 2) throw InputError("zonal_ck_norm: k must be 0, 1 or 2");
  if (!f.f) throw InputError("zonal_ck_norm: profile has no function");
  double total = sup_on_sphere(f.f, resolution);
  if (k >= 1) {
    if (!f.df) throw InputError("zonal_ck_norm: profile lacks first derivative");
    total += sup_on_sphere([&](double t) { return std::sqrt(std::max(0.0, 1.0 - t * t)) * f.df(t); },
                           resolution);
  }
  if (k >= 2) {
    if (!f.d2f) throw InputError("zonal_ck_norm: profile lacks second derivative");
    const double m = f.dim - 2.0;
    total += sup_on_sphere(
        [&](double t) {
          const double d1 = f.df(t);
          const double radial = (1.0 - t * t) * f.d2f(t) - t * d1;
          return std::sqrt(m * t * t * d1 * d1 + radial * radial);
        },
        resolution);
  }
  return total;
}

ProbeReport regularity_probe(std::span<const ZonalProfile> family, double q, AmbientDim nd) {
  const int n = nd.value();
  ProbeReport rep;
  rep.n = n;
  rep.q = q;
  const bool box_case = std::abs(q - (n - 1.0)) < 1e-12;
  for (std::size_t idx = 0; idx < family.size(); ++idx) {
    const ZonalProfile& f = family[idx];
    if (f.dim != n) throw InputError("regularity_probe: profile dimension mismatch");
    if (box_case) {
      const double a1 = zonal_coefficient(f, 1).value;
      const double scale = std::max(1.0, zonal_ck_norm(f, 0) * omega(n));
      if (std::abs(a1) > 1e-9 * scale) {
        throw DomainError("regularity_probe: sample " + std::to_string(idx) +
                          " has a nonzero degree-1 component");
      }
    }
    ProbeSample s;
    s.c2_norm = zonal_ck_norm(f, 2);
    s.dq_norm = sup_on_sphere([&](double t) { return zonal_laplacian(f, t) + q * f(t); }, 4096);
    s.ratio = s.dq_norm > 0.0 ? s.c2_norm / s.dq_norm : std::numeric_limits<double>::infinity();

    ZonalProfile lap;
    lap.dim = n;
    lap.f = [&](double t) { return zonal_laplacian(f, t); };
    lap.kinks = f.kinks;
    lap.polynomial_degree = f.polynomial_degree;
    s.flux = zonal_coefficient(lap, 0).value / omega(n - 1);

    if (box_case) {
      s.box_norm = s.dq_norm / (n - 1.0);
      s.ratio_box = *s.box_norm > 0.0 ? s.c2_norm / *s.box_norm
                                      : std::numeric_limits<double>::infinity();
      rep.sup_ratio_box = std::max(rep.sup_ratio_box.value_or(0.0), *s.ratio_box);
    }
    rep.sup_ratio = std::max(rep.sup_ratio, s.ratio);
    rep.max_abs_flux = std::max(rep.max_abs_flux, std::abs(s.flux));
    rep.samples.push_back(s);
  }
  return rep;
}

}  // namespace minkval
