#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "minkval/constants.hpp"
#include "minkval/error.hpp"
#include "minkval/harmonics.hpp"

using namespace minkval;
using std::numbers::pi;

namespace {

// Gegenbauer-based oracles on closed forms in the angle.
double chebyshev_t(int k, double t) { return std::cos(k * std::acos(t)); }
double dim4_legendre(int k, double t) {
  const double th = std::acos(t);
  if (std::abs(std::sin(th)) < 1e-12) return t > 0 ? 1.0 : (k % 2 ? -1.0 : 1.0);
  return std::sin((k + 1) * th) / ((k + 1) * std::sin(th));
}

double beta_moment(int m, double alpha) {
  // int_{-1}^1 t^{2m} (1-t^2)^alpha dt
  return std::tgamma(m + 0.5) * std::tgamma(alpha + 1.0) / std::tgamma(m + alpha + 1.5);
}

}  // namespace

TEST_CASE("legendre matches closed forms in dimensions 2, 3, 4") {
  LegendreTable t2(2, 40), t3(3, 40), t4(4, 40);
  for (int k = 0; k <= 40; ++k) {
    for (double t : {-1.0, -0.73, -0.2, 0.0, 0.31, 0.9, 1.0}) {
      CHECK(t2.value(k, t) == doctest::Approx(chebyshev_t(k, t)).epsilon(1e-12));
      CHECK(t3.value(k, t) == doctest::Approx(std::legendre(k, t)).epsilon(1e-12));
      CHECK(t4.value(k, t) == doctest::Approx(dim4_legendre(k, t)).epsilon(1e-11));
    }
  }
}

TEST_CASE("legendre normalization and recurrence residual") {
  for (int n = 2; n <= 8; ++n) {
    LegendreTable tab(n, 200);
    for (int k = 0; k <= 200; ++k) CHECK(tab.value(k, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
    for (double t : {-0.99, -0.5, 0.1, 0.77}) {
      for (int k = 2; k <= 200; ++k) {
        const double res = (n + k - 3.0) * tab.value(k, t) -
                           (n + 2.0 * k - 4.0) * t * tab.value(k - 1, t) +
                           (k - 1.0) * tab.value(k - 2, t);
        CHECK(std::abs(res) <= 1e-12 * (n + 2.0 * k));
      }
    }
  }
}

TEST_CASE("legendre derivatives agree with finite differences") {
  LegendreTable tab(5, 12);
  const double h = 1e-5;
  for (int k = 0; k <= 12; ++k) {
    for (double t : {-0.6, 0.05, 0.8}) {
      const double fd1 = (tab.value(k, t + h) - tab.value(k, t - h)) / (2 * h);
      const double fd2 = (tab.value(k, t + h) - 2 * tab.value(k, t) + tab.value(k, t - h)) / (h * h);
      CHECK(tab.derivative(k, t, 1) == doctest::Approx(fd1).epsilon(1e-7));
      CHECK(tab.derivative(k, t, 2) == doctest::Approx(fd2).epsilon(1e-4).scale(10));
    }
  }
}

TEST_CASE("legendre rejects bad arguments") {
  LegendreTable tab(3, 5);
  CHECK_THROWS_AS(tab.value(6, 0.0), DomainError);
  CHECK_THROWS_AS(tab.value(-1, 0.0), DomainError);
  CHECK_THROWS_AS(tab.value(2, 1.5), DomainError);
  CHECK_THROWS_AS(LegendreTable(1, 3), InputError);
  CHECK_THROWS_AS(AmbientDim(2), InputError);
}

TEST_CASE("gauss-jacobi is exact to degree 2Q-1") {
  for (int n = 2; n <= 7; ++n) {
    const double alpha = (n - 3) / 2.0;
    for (int Q : {1, 2, 5, 17, 40}) {
      Quadrature q = gauss_jacobi(n, Q);
      for (int d = 0; d <= 2 * Q - 1; ++d) {
        double s = 0.0;
        for (int i = 0; i < Q; ++i) s += q.weights[i] * std::pow(q.nodes[i], d);
        const double exact = d % 2 ? 0.0 : beta_moment(d / 2, alpha);
        CHECK(s == doctest::Approx(exact).epsilon(1e-12).scale(1.0));
      }
    }
  }
}

TEST_CASE("orthogonality of legendre polynomials") {
  for (int n = 3; n <= 6; ++n) {
    LegendreTable tab(n, 20);
    Quadrature q = gauss_jacobi(n, 30);
    for (int j = 0; j <= 20; ++j) {
      for (int k = 0; k <= 20; ++k) {
        double s = 0.0;
        for (int i = 0; i < 30; ++i) s += q.weights[i] * tab.value(j, q.nodes[i]) * tab.value(k, q.nodes[i]);
        const double expect = j == k ? omega(n) / (omega(n - 1) * harmonic_dimension(n, k)) : 0.0;
        CHECK(s == doctest::Approx(expect).epsilon(1e-12).scale(1.0));
      }
    }
  }
}

TEST_CASE("zonal coefficients of legendre densities and atoms") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g;
  for (int n = 3; n <= 5; ++n) {
    std::vector<double> c(9);
    for (double& x : c) x = g(rng);
    ZonalProfile f = ZonalProfile::legendre(n, c);
    for (int k = 0; k <= 12; ++k) {
      const double expect = k < 9 ? c[k] * omega(n) / harmonic_dimension(n, k) : 0.0;
      CHECK(zonal_coefficient(f, k).value == doctest::Approx(expect).epsilon(1e-12).scale(1.0));
    }
  }
  std::vector<PointMass> atoms{{0.3, 2.0}, {-1.0, 0.5}};
  CHECK(zonal_coefficient(atoms, 3, 2) ==
        doctest::Approx(2.0 * std::legendre(2, 0.3) + 0.5 * std::legendre(2, -1.0)));
}

TEST_CASE("zonal coefficient of a kinked profile") {
  ZonalProfile f;
  f.dim = 3;
  f.f = [](double t) { return std::abs(t) / 2; };
  f.kinks = {0.0};
  CHECK(zonal_coefficient(f, 0).value == doctest::Approx(pi).epsilon(1e-12));
  CHECK(zonal_coefficient(f, 1).value == doctest::Approx(0.0).scale(1.0));
  CHECK(zonal_coefficient(f, 2).value == doctest::Approx(pi / 4).epsilon(1e-12));
}

TEST_CASE("integrate_weighted handles the half-sphere weight") {
  // int (1-t^2)^{1/2} dt over [-1,1] is pi/2 (dim 4)
  Estimate e = integrate_weighted([](double) { return 1.0; }, 4);
  CHECK(e.value == doctest::Approx(pi / 2).epsilon(1e-13));
}

TEST_CASE("laplacian eigenvalues") {
  for (int n = 3; n <= 6; ++n) {
    for (int k = 0; k <= 6; ++k) {
      std::vector<double> c(k + 1, 0.0);
      c[k] = 1.0;
      ZonalProfile f = ZonalProfile::legendre(n, c);
      for (double t : {-0.4, 0.0, 0.7}) {
        CHECK(zonal_laplacian(f, t) == doctest::Approx(-k * (k + n - 2.0) * f(t)).epsilon(1e-12).scale(1.0));
      }
    }
  }
}

TEST_CASE("ck norms of P_2 in dimension 3") {
  ZonalProfile p2 = ZonalProfile::legendre(3, {0, 0, 1});
  CHECK(zonal_ck_norm(p2, 0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(zonal_ck_norm(p2, 1) == doctest::Approx(2.5).epsilon(1e-10));
  CHECK(zonal_ck_norm(p2, 2) == doctest::Approx(2.5 + std::sqrt(18.0)).epsilon(1e-10));
  CHECK_THROWS_AS(zonal_ck_norm(p2, 3), InputError);
}

TEST_CASE("regularity probe on P_2 and rejection of degree one") {
  std::vector<ZonalProfile> fam{ZonalProfile::legendre(3, {0, 0, 1})};
  ProbeReport r = regularity_probe(fam, 2.0, AmbientDim(3));
  REQUIRE(r.samples.size() == 1);
  CHECK(r.samples[0].ratio_box.value() == doctest::Approx((2.5 + std::sqrt(18.0)) / 2.0).epsilon(1e-9));
  CHECK(*r.sup_ratio_box == doctest::Approx(3.3713).epsilon(1e-4));
  CHECK(r.samples[0].ratio == doctest::Approx((2.5 + std::sqrt(18.0)) / 4.0).epsilon(1e-9));
  CHECK(std::abs(r.samples[0].flux) < 1e-13);
  std::vector<ZonalProfile> bad{ZonalProfile::legendre(3, {0, 1})};
  CHECK_THROWS_AS(regularity_probe(bad, 2.0, AmbientDim(3)), DomainError);
  CHECK_NOTHROW(regularity_probe(bad, 1.0, AmbientDim(3)));
}

TEST_CASE("property: flux identity for random smooth profiles") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 3 + trial % 4;
    std::vector<double> c(2 + trial % 10);
    for (double& x : c) x = g(rng);
    ZonalProfile f = ZonalProfile::legendre(n, c);
    ProbeReport r = regularity_probe(std::span(&f, 1), 0.5, AmbientDim(n));
    CHECK(std::abs(r.samples[0].flux) < 1e-10);
  }
}

TEST_CASE("constants") {
  CHECK(kappa(-1) == doctest::Approx(1 / pi).epsilon(1e-15));
  CHECK(kappa(2) == doctest::Approx(pi));
  CHECK(omega(3) == doctest::Approx(4 * pi));
  CHECK(harmonic_dimension(3, 5) == 11);
  CHECK(harmonic_dimension(4, 2) == 9);
  CHECK(harmonic_dimension(2, 7) == 2);
  CHECK(flag_coefficient(2, 1) == doctest::Approx(pi / 2));
  CHECK(flag_coefficient(3, 1) == doctest::Approx(2.0));
  CHECK(flag_coefficient(3, 2) == doctest::Approx(2.0));
  CHECK(mean_section_constant(3, 2) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(crofton_factor(3, 1) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(crofton_minkowski_constant(3, 1, 1) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK_THROWS_AS(crofton_minkowski_constant(3, 2, 1), DomainError);
  CHECK_THROWS_AS(mean_section_constant(3, 1), DomainError);
}
