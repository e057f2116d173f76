#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "minkval/constants.hpp"
#include "minkval/error.hpp"
#include "minkval/zonal.hpp"

using namespace minkval;
using std::numbers::pi;

namespace {

// Closed form of the circle Berg function, g_2(cos theta).
double g2_closed(double t) {
  const double th = std::acos(std::clamp(t, -1.0, 1.0));
  return ((pi - th) * std::sin(th) - std::cos(th) / 2) / (2 * pi);
}

// a_m^3 of a function of t by brute-force Gauss-Legendre on theta.
double a3_by_theta(const std::function<double(double)>& f, int m) {
  const int M = 4000;
  double s = 0;
  for (int i = 0; i < M; ++i) {
    const double th = (i + 0.5) * pi / M;
    s += f(std::cos(th)) * std::legendre(m, std::cos(th)) * std::sin(th);
  }
  return 2 * pi * s * pi / M;
}

ZonalObject random_centered(std::mt19937_64& rng, int n, int degree, int kmax = 16) {
  std::normal_distribution<double> g;
  std::vector<double> c(degree + 1);
  for (double& x : c) x = g(rng);
  c[1] = 0.0;
  return ZonalObject::legendre_density(n, c, kmax);
}

}  // namespace

TEST_CASE("berg and box multipliers are exact rationals") {
  auto b = ZonalObject::berg(3, 3, 8);
  const Rational expect[] = {Rational(1), Rational(0), Rational(-1, 2), Rational(-1, 5), Rational(-1, 9)};
  for (int k = 0; k < 5; ++k) {
    REQUIRE(b.multipliers().exact_value(k).has_value());
    CHECK(*b.multipliers().exact_value(k) == expect[k]);
  }
  MultiplierSequence box = box_multipliers(3, 8);
  const Rational bexp[] = {Rational(1), Rational(0), Rational(-2), Rational(-5), Rational(-9)};
  for (int k = 0; k < 5; ++k) CHECK(*box.exact_value(k) == bexp[k]);
  MultiplierSequence prod = b.multipliers() * box;
  for (int k = 0; k <= 8; ++k) CHECK(*prod.exact_value(k) == (k == 1 ? Rational(0) : Rational(1)));
}

TEST_CASE("circle berg function against its closed form") {
  auto b = berg_function(2, 16, 3);
  for (double t : {-1.0, -0.5, 0.0, 0.3, 0.99, 1.0}) {
    CHECK(std::abs(b->value(t) - g2_closed(t)) <= b->pointwise_error_bound());
  }
  for (int m = 0; m <= 8; ++m) {
    const double oracle = a3_by_theta(g2_closed, m);
    CHECK(std::abs(b->ambient_raw[m] - oracle) <= b->ambient_raw.error(m) + 1e-6);
  }
  CHECK(b->ambient_raw[0] == doctest::Approx(pi * pi / 4).epsilon(1e-8));
  CHECK(b->ambient[1] == 0.0);
}

TEST_CASE("berg extension is centered and its density matches multipliers") {
  ZonalObject g = ZonalObject::berg(3, 2, 12);
  CHECK(g.centered());
  CHECK(g.pointwise());
  ZonalProfile f = g.as_profile();
  for (int k = 0; k <= 6; ++k) {
    CHECK(zonal_coefficient(f, k, 1e-9).value == doctest::Approx(g.multipliers()[k]).epsilon(1e-8).scale(1.0));
  }
  CHECK_THROWS_AS(ZonalObject::berg(3, 3).density(0.2), DomainError);
  CHECK_THROWS_AS(ZonalObject::berg(3, 4), DomainError);
}

TEST_CASE("property: box_n inverts convolution with g_n exactly") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 25; ++trial) {
    const int n = 3 + trial % 3;
    ZonalObject f = random_centered(rng, n, 2 + trial % 9);
    ZonalObject h = convolve(box_n(f), ZonalObject::berg(n, n, f.kmax()));
    for (int k = 0; k <= f.kmax(); ++k) CHECK(h.multipliers()[k] == f.multipliers()[k]);
    REQUIRE(h.pure_legendre());
    for (double t : {-0.9, 0.1, 0.8}) CHECK(h.density(t) == doctest::Approx(f.density(t)).epsilon(1e-10));
  }
}

TEST_CASE("property: box_2 inverts convolution with the circle Berg extension") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 10; ++trial) {
    ZonalObject f = random_centered(rng, 3, 6, 12);
    ZonalObject h = box_j(convolve(f, ZonalObject::berg(3, 2, 12)), 2);
    for (int k = 0; k <= 12; ++k) {
      CHECK(h.multipliers()[k] == doctest::Approx(f.multipliers()[k]).epsilon(1e-12).scale(1.0));
    }
  }
}

TEST_CASE("convolution algebra") {
  std::mt19937_64 rng(8);
  ZonalObject x = random_centered(rng, 3, 5), y = random_centered(rng, 3, 7);
  ZonalObject z = ZonalObject::abs_half(3, 16);
  ZonalObject id = ZonalObject::dirac_pole(3, 16);
  CHECK(convolve(x, id).to_json() == x.to_json());
  for (int k = 0; k <= 16; ++k) {
    CHECK(convolve(x, y).multipliers()[k] == doctest::Approx(convolve(y, x).multipliers()[k]));
    CHECK(convolve(convolve(x, y), z).multipliers()[k] ==
          doctest::Approx(convolve(x, convolve(y, z)).multipliers()[k]).scale(1.0));
  }
  ZonalObject e = ZonalObject::equator(3, 16);
  CHECK_FALSE(convolve(e, e).structural());
  CHECK_THROWS_AS(convolve(x, ZonalObject::dirac_pole(4)), InputError);
}

TEST_CASE("reflection") {
  ZonalObject a = ZonalObject::from_atoms(3, {{0.4, 2.0}, {-0.1, 1.0}}, 10);
  ZonalObject r = a.reflected();
  for (int k = 0; k <= 10; ++k) CHECK(r.multipliers()[k] == doctest::Approx((k % 2 ? -1 : 1) * a.multipliers()[k]));
  CHECK(r.reflected().to_json() == a.to_json());
  ZonalObject c = ZonalObject::approx_identity(3, 4, 6).reflected();
  CHECK(c.density(-0.99) > 0.0);
  CHECK(c.density(0.99) == 0.0);
}

TEST_CASE("approximate identity converges to the pole") {
  double prev = 1e9;
  for (int j : {2, 4, 8, 16}) {
    ZonalObject c = ZonalObject::approx_identity(3, j, 6);
    CHECK(c.multipliers()[0] == doctest::Approx(1.0).epsilon(1e-12));
    const double dist = std::abs(c.multipliers()[6] - 1.0);
    CHECK(dist < prev);
    prev = dist;
  }
  CHECK(prev < 0.05);
}

TEST_CASE("equator multipliers decay like k^{1-n/2}") {
  for (int n : {3, 4, 5}) {
    ZonalObject e = ZonalObject::equator(n, 64);
    for (int k = 2; k <= 64; k += 2) {
      CHECK(std::abs(e.multipliers()[k]) <= 2.0 * omega(n - 1) * std::pow(k, 1.0 - n / 2.0));
    }
  }
}

TEST_CASE("centered part removes degree one only") {
  ZonalObject a = ZonalObject::legendre_density(3, {1.0, 2.0, 3.0}, 8);
  ZonalObject c = a.centered_part();
  CHECK_FALSE(a.centered());
  CHECK(c.centered());
  CHECK(c.legendre_coeffs()[1] == doctest::Approx(0.0).scale(1.0));
  CHECK(c.multipliers()[2] == a.multipliers()[2]);
}

TEST_CASE("json round trip") {
  std::vector<ZonalObject> objs{ZonalObject::legendre_density(3, {1, 0, 0.5}, 6),
                                ZonalObject::from_atoms(3, {{0.2, 1.5}}, 6),
                                ZonalObject::abs_half(3, 6),
                                ZonalObject::approx_identity(3, 3, 6).reflected(),
                                ZonalObject::berg(3, 2, 6).scaled(0.5),
                                ZonalObject::berg(4, 4, 6),
                                convolve(ZonalObject::equator(3, 6), ZonalObject::equator(3, 6))};
  for (const ZonalObject& z : objs) {
    const auto j = z.to_json();
    const ZonalObject back = ZonalObject::from_json(nlohmann::json::parse(j.dump()));
    CHECK(back.to_json() == j);
  }
  CHECK_THROWS_AS(ZonalObject::from_json(nlohmann::json{{"n", 2}}), InputError);
  CHECK_THROWS_AS(ZonalObject::from_json(nlohmann::json{{"n", 3}, {"atoms", {{{"t", 2.0}, {"mass", 1}}}}}),
                  InputError);
  CHECK_THROWS_AS(zonal_builtin("nope", 3), InputError);
}

TEST_CASE("multiplier-only objects refuse pointwise access") {
  ZonalObject e = convolve(ZonalObject::equator(3, 6), ZonalObject::abs_half(3, 6));
  CHECK_FALSE(e.pointwise());
  CHECK_THROWS_AS(e.density(0.1), DomainError);
  CHECK_THROWS_AS(ZonalObject::dirac_pole(3).density(0.1), DomainError);
}

TEST_CASE("funk-hecke: direct spherical quadrature matches multiplier products") {
  std::mt19937_64 rng(21);
  const int kmax = 8;
  ZonalObject f = random_centered(rng, 3, 6, kmax), g = random_centered(rng, 3, 5, kmax);
  // (f*g)(t) = int_{S^2} f(u.w) g(e.w) dw with u.e = t
  auto conv = [&](double t) {
    const double sa = std::sqrt(1 - t * t);
    const Quadrature& gl = gauss_legendre(24);
    const int P = 48;
    double s = 0;
    for (int i = 0; i < 24; ++i) {
      const double c = gl.nodes[i], sc = std::sqrt(1 - c * c);
      for (int p = 0; p < P; ++p) {
        const double ph = 2 * pi * p / P;
        s += gl.weights[i] * (2 * pi / P) * f.density(sa * sc * std::cos(ph) + t * c) * g.density(c);
      }
    }
    return s;
  };
  ZonalProfile h;
  h.dim = 3;
  h.f = conv;
  h.polynomial_degree = 12;
  MultiplierSequence prod = f.multipliers() * g.multipliers();
  for (int k = 0; k <= kmax; ++k) {
    CHECK(zonal_coefficient(h, k).value == doctest::Approx(prod[k]).epsilon(1e-10).scale(1.0));
  }
}
