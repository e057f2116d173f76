#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "minkval/constants.hpp"
#include "minkval/error.hpp"
#include "minkval/integral_geom.hpp"

using namespace minkval;
using std::numbers::pi;

namespace {

McConfig config(long N, std::uint64_t seed) {
  McConfig c;
  c.samples = N;
  c.seed = seed;
  return c;
}

// Kinematic constant in the factorial form k! kappa_k (n-k+j)! kappa_{n-k+j} / (j! kappa_j n! kappa_n).
double kinematic_oracle(const std::array<double, 4>& VK, const std::array<double, 4>& VL, int j) {
  auto kap = [](int p) { return std::pow(pi, p / 2.0) / std::tgamma(1 + p / 2.0); };
  auto fac = [](int m) { return std::tgamma(m + 1.0); };
  double s = 0;
  for (int k = j; k <= 3; ++k) {
    s += fac(k) * kap(k) * fac(3 - k + j) * kap(3 - k + j) / (fac(j) * kap(j) * fac(3) * kap(3)) * VK[k] * VL[3 - k + j];
  }
  return s;
}

Polytope ball_proxy(int count) {
  const auto d = fibonacci_directions(count);
  return Polytope::from_points(d);
}

}  // namespace

TEST_CASE("geometric constants") {
  CHECK(crofton_factor(3, 1) == 1.0);
  CHECK(crofton_minkowski_constant(3, 1, 1) == 1.0);
  CHECK(flag_coefficient(2, 1) == doctest::Approx(pi / 2));
  const auto g = geometric_constants(3, 1, 1, 1);
  REQUIRE(g.kappa.size() == 4);
  CHECK(g.kappa[0] == 1.0);
  CHECK(g.kappa[1] == doctest::Approx(2.0));
  CHECK(g.kappa[2] == doctest::Approx(pi));
  CHECK(g.kappa[3] == doctest::Approx(4 * pi / 3));
  CHECK(*g.q_crofton == 1.0);
  CHECK_FALSE(g.q_section.has_value());
  CHECK(*geometric_constants(3, 0, 2, 0).q_section == doctest::Approx(0.5));
  CHECK_THROWS_AS(geometric_constants(3, 5, 5, 5), DomainError);
  // normalization identity [n;i] kappa_{n-i} = C(n,i) kappa_n / kappa_i
  for (int i = 0; i <= 3; ++i) {
    CHECK(flag_coefficient(3, i) * kappa(3 - i) == doctest::Approx(binomial(3, i) * kappa(3) / kappa(i)));
  }
}

TEST_CASE("plane measure of the unit ball equals its intrinsic volumes") {
  // V_i(B^3) = C(3,i) kappa_3 / kappa_{3-i}: 1, 4, 2 pi, 4 pi / 3
  const double expect[] = {1.0, 4.0, 2 * pi, 4 * pi / 3};
  for (int i = 0; i <= 3; ++i) CHECK(PlaneSampler(i, Vec3::Zero(), 1.0).total_measure() == doctest::Approx(expect[i]));
  CHECK(PlaneSampler(2, Vec3::Zero(), 2.0).total_measure() == doctest::Approx(8 * pi));
  CHECK_THROWS_AS(PlaneSampler(4, Vec3::Zero(), 1.0), InputError);
}

TEST_CASE("sampler calibration on a ball proxy") {
  const Polytope B = ball_proxy(300);
  for (int i : {1, 2}) {
    const auto r = crofton_intrinsic(B, i, 0, config(20000, 5 + i));
    CHECK(r.target == doctest::Approx(intrinsic_volumes(B)[i]));
    CHECK(std::abs(r.z) < 3.0);
  }
}

TEST_CASE("crofton formula on the unit cube") {
  const Polytope C = Polytope::cube();
  const auto a = crofton_intrinsic(C, 1, 1, config(20000, 7));
  CHECK(a.target == doctest::Approx(pi / 2 * 3));
  CHECK(std::abs(a.z) < 3.0);
  const auto b = crofton_intrinsic(C, 2, 0, config(20000, 8));
  CHECK(b.target == doctest::Approx(3.0));
  CHECK(std::abs(b.z) < 3.0);
  // volume by points and the trivial codimension-zero-like top case
  const auto c = crofton_intrinsic(C, 3, 0, config(20000, 9));
  CHECK(c.target == doctest::Approx(1.0));
  CHECK(std::abs(c.z) < 3.0);
  CHECK_THROWS_AS(crofton_intrinsic(C, 2, 2, config(100, 1)), DomainError);
}

TEST_CASE("property: standard error scales like N^{-1/2}") {
  const Polytope C = Polytope::cube();
  double prev = 0;
  for (long N : {1000L, 10000L, 100000L}) {
    const double se = crofton_intrinsic(C, 1, 0, config(N, 3)).std_error;
    if (prev > 0) {
      const double ratio = prev / se / std::sqrt(10.0);
      CHECK(ratio > 0.8);
      CHECK(ratio < 1.2);
    }
    prev = se;
  }
}

TEST_CASE("determinism across runs and thread counts") {
  const Polytope P = Polytope::random_hull(12, 77);
  McConfig c = config(4000, 99);
  c.threads = 1;
  const auto a = crofton_intrinsic(P, 1, 1, c);
  c.threads = 3;
  const auto b = crofton_intrinsic(P, 1, 1, c);
  CHECK(a.estimate == b.estimate);
  CHECK(a.std_error == b.std_error);
  c.seed = 100;
  CHECK(crofton_intrinsic(P, 1, 1, c).estimate != a.estimate);
}

TEST_CASE("kinematic formula against the factorial form") {
  const Polytope K = Polytope::cube(), L = Polytope::cube(0.5);
  const auto VK = intrinsic_volumes(K), VL = intrinsic_volumes(L);
  for (int j = 0; j <= 3; ++j) CHECK(kinematic_target(K, L, j) == doctest::Approx(kinematic_oracle(VK, VL, j)));
  CHECK(kinematic_target(K, K, 0) == doctest::Approx(11.0));
  CHECK(kinematic_target(K, L, 3) == doctest::Approx(VK[3] * VL[3]));
  const auto r = kinematic_check(K, L, 0, config(20000, 12));
  CHECK(std::abs(r.direct.z) < 3.0);
  CHECK(std::abs(r.z_consistency) < 3.0);
  CHECK(std::abs(r.hadwiger.estimate - r.direct.target) < 3.0 * r.hadwiger.std_error);
}

TEST_CASE("kinematic window detection") {
  const Polytope K = Polytope::cube(), L = Polytope::cube();
  auto phi = [](const Polytope& X) { return intrinsic_volumes(X)[0]; };
  CHECK_THROWS_AS(kinematic_integral(K, L, phi, config(2000, 1), 1.0), DomainError);
  CHECK_NOTHROW(kinematic_integral(K, L, phi, config(2000, 1)));
}

TEST_CASE("kinematic formula for the projection body") {
  const auto spec = builtin_spec("projection_body", 3);
  const auto r = kinematic_valuation_check(Polytope::cube(), Polytope::cube(0.7), spec, Vec3(0.3, 0.4, 0.87),
                                           config(10000, 21));
  CHECK(std::abs(r.z_consistency) < 3.0);
  CHECK(r.hadwiger.terms.size() == 4);
  // projection bodies of segments and points vanish
  CHECK(r.hadwiger.terms[2].estimate == 0.0);
  CHECK(r.hadwiger.terms[3].estimate == 0.0);
}

TEST_CASE("crofton formula for degree-one Minkowski valuations") {
  const auto pole = ZonalObject::dirac_pole(3, 8);
  // formal i = 0 case returns the centered datum
  const auto id = crofton_minkowski_multipliers(3, 0, 1, ZonalObject::legendre_density(3, {1, 0, 2}, 8));
  CHECK(id[0] == doctest::Approx(4 * pi));
  CHECK(id[2] == doctest::Approx(2 * 4 * pi / 5));
  CHECK(id[1] == 0.0);
  // k = 0: q a_0[box_3 g_2] |S_2| = (pi^2/4) 6 = 3/2 pi^2 = pi [2;1] V_2
  const auto m = crofton_minkowski_multipliers(3, 1, 1, pole);
  CHECK(m[0] * 6.0 == doctest::Approx(1.5 * pi * pi).epsilon(1e-9));
  const auto rep = crofton_minkowski(Polytope::cube(), pole, 4, Vec3(1, 2, 3), config(5000, 31));
  REQUIRE(rep.rows.size() == 5);
  for (const auto& row : rep.rows) {
    if (row.k == 1) continue;
    CHECK(row.pass);
  }
  CHECK(rep.to_csv().starts_with("k,lhs,rhs,stderr\n"));
  CHECK_THROWS_AS(crofton_minkowski_multipliers(3, 2, 1, pole), DomainError);
}

TEST_CASE("insufficient samples are reported") {
  McConfig c = config(100, 1);
  c.max_stderr = 1e-6;
  CHECK_THROWS_AS(crofton_intrinsic(Polytope::cube(), 1, 0, c), ToleranceError);
  CHECK_THROWS_AS(crofton_intrinsic(Polytope::cube(), 1, 0, config(1, 1)), InputError);
}
