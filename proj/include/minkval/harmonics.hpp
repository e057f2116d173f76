#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace minkval {

/// Dimension n >= 3 of the ambient space R^n.
class AmbientDim {
 public:
  explicit AmbientDim(int n);
  int value() const { return n_; }

 private:
  int n_;
};

/// Point mass of a zonal measure at height t = u.e.
struct PointMass {
  double t = 1.0;
  double mass = 0.0;
};

/// Legendre polynomials P_k^d of dimension d >= 2 normalized by P_k^d(1) = 1.
/// For d = 2 these are the Chebyshev polynomials T_k.
class LegendreTable {
 public:
  LegendreTable(int dim, int kmax);

  int dimension() const { return dim_; }
  int kmax() const { return kmax_; }

  double value(int k, double t) const;
  /// order is 0, 1 or 2.
  double derivative(int k, double t, int order) const;

  /// Writes P_0..P_{m-1} (and derivatives if the spans are non-empty) where m is
  /// the size of p. Requires m <= kmax + 1.
  void evaluate(double t, std::span<double> p, std::span<double> dp = {},
                std::span<double> d2p = {}) const;

 private:
  void check(int k, double t) const;

  int dim_;
  int kmax_;
  std::vector<double> a_;  // P_k = a_k t P_{k-1} - b_k P_{k-2}
  std::vector<double> b_;
};

/// sum_k c[k] (d/dt)^order P_k^dim(t), order in {0,1,2}.
double legendre_series(int dim, std::span<const double> c, double t, int order = 0);

struct Quadrature {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss rule with `order` nodes for the weight (1-t^2)^{(dim-3)/2} on [-1,1].
/// Exact for polynomials of degree <= 2*order-1.
Quadrature gauss_jacobi(int dim, int order);

/// Gauss-Legendre rule on [-1,1]. Cached; safe to call from several threads.
const Quadrature& gauss_legendre(int order);

struct Estimate {
  double value = 0.0;
  double error = 0.0;
};

/// int_{-1}^{1} g(t) (1-t^2)^{(dim-3)/2} dt for g smooth between the given kinks.
/// Throws ToleranceError if the relative tolerance cannot be met.
Estimate integrate_weighted(const std::function<double(double)>& g, int dim,
                            std::span<const double> kinks = {}, double tol = 1e-12);

/// Profile f on [-1,1] of a zonal function on S^{dim-1}, with derivatives.
struct ZonalProfile {
  int dim = 3;
  std::function<double(double)> f;
  std::function<double(double)> df;
  std::function<double(double)> d2f;
  std::vector<double> kinks;
  /// Degree when f is a polynomial, -1 otherwise.
  int polynomial_degree = -1;

  double operator()(double t) const { return f(t); }

  /// f = sum_k coeffs[k] P_k^dim.
  static ZonalProfile legendre(int dim, std::vector<double> coeffs);
};

/// a_k^n[f] = omega_{n-1} int f(t) P_k^n(t) (1-t^2)^{(n-3)/2} dt.
Estimate zonal_coefficient(const ZonalProfile& f, int k, double tol = 1e-11);

/// Pushforward convention: an atom of mass m at t0 contributes m P_k(t0).
double zonal_coefficient(std::span<const PointMass> atoms, int dim, int k);

/// Spherical Laplacian of u -> f(u.e), as a function of t.
double zonal_laplacian(const ZonalProfile& f, double t);

/// sum_{j<=k} sup |nabla^j f| on S^{dim-1}, k in {0,1,2}, from a cosine-spaced
/// grid with local refinement of each maximum.
double zonal_ck_norm(const ZonalProfile& f, int k, int resolution = 4096);

struct ProbeSample {
  double c2_norm = 0.0;
  double dq_norm = 0.0;     // sup |Delta f + q f|
  double ratio = 0.0;       // c2_norm / dq_norm
  double flux = 0.0;        // int Delta f (1-t^2)^{(n-3)/2} dt
  std::optional<double> box_norm;   // sup |box_n f| when q = n-1
  std::optional<double> ratio_box;  // c2_norm / box_norm
};

struct ProbeReport {
  int n = 3;
  double q = 2.0;
  std::vector<ProbeSample> samples;
  double sup_ratio = 0.0;
  double max_abs_flux = 0.0;
  std::optional<double> sup_ratio_box;
};

/// Empirical check of ||f||_{C^2} <= c ||Delta f + q f||_{C^0}. For q = n-1 every
/// member must have vanishing first-degree coefficient.
ProbeReport regularity_probe(std::span<const ZonalProfile> family, double q, AmbientDim n);

}  // namespace minkval
