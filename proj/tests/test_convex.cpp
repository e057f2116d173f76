#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Geometry>
#include <cmath>
#include <numbers>
#include <random>

#include "minkval/constants.hpp"
#include "minkval/convex.hpp"
#include "minkval/error.hpp"

using namespace minkval;
using std::numbers::pi;

namespace {

// (1/pi) int_{S^2} h_P(u) du by brute force on a latitude-longitude grid;
// uses only the vertex list, not the face lattice.
double mean_width_oracle(const Polytope& P) {
  const Quadrature& gl = gauss_legendre(200);
  const int M = 400;
  double s = 0;
  for (int i = 0; i < 200; ++i) {
    const double z = gl.nodes[i], r = std::sqrt(1 - z * z);
    for (int k = 0; k < M; ++k) {
      const double ph = 2 * pi * (k + 0.5) / M;
      s += gl.weights[i] * (2 * pi / M) * P.support(Vec3(r * std::cos(ph), r * std::sin(ph), z));
    }
  }
  return s / pi;
}

std::vector<Polytope> corpus() {
  std::vector<Polytope> c{Polytope::cube(), Polytope::simplex(), Polytope::octahedron()};
  for (int s = 0; s < 5; ++s) c.push_back(Polytope::random_hull(12 + 4 * s, 100 + s));
  return c;
}

}  // namespace

TEST_CASE("cube lattice and intrinsic volumes") {
  Polytope C = Polytope::cube();
  CHECK(C.dimension() == 3);
  CHECK(C.vertices().size() == 8);
  CHECK(C.edges().size() == 12);
  CHECK(C.facets().size() == 6);
  auto V = intrinsic_volumes(C);
  CHECK(V[0] == 1.0);
  CHECK(V[1] == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(V[2] == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(V[3] == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("simplex and octahedron closed forms") {
  auto S = intrinsic_volumes(Polytope::simplex());
  CHECK(S[3] == doctest::Approx(1.0 / 6));
  CHECK(S[2] == doctest::Approx((1.5 + std::sqrt(3.0) / 2) / 2));
  auto O = intrinsic_volumes(Polytope::octahedron());
  CHECK(O[3] == doctest::Approx(4.0 / 3));
  CHECK(O[2] == doctest::Approx(4 * std::sqrt(3.0) / 2));
}

TEST_CASE("mean width against brute-force support integral") {
  for (const Polytope& P : corpus()) {
    CHECK(intrinsic_volumes(P)[1] == doctest::Approx(mean_width_oracle(P)).epsilon(2e-5));
  }
}

TEST_CASE("property: random hulls contain their points and satisfy Euler") {
  for (int s = 0; s < 30; ++s) {
    std::mt19937_64 rng(900 + s);
    std::uniform_real_distribution<double> U(-1, 1);
    std::vector<Vec3> pts(6 + s);
    for (Vec3& p : pts) p = Vec3(U(rng), U(rng), U(rng));
    Polytope P = Polytope::from_points(pts);
    REQUIRE(P.dimension() == 3);
    const long V = P.vertices().size(), E = P.edges().size(), F = P.facets().size();
    CHECK(V - E + F == 2);
    for (const Vec3& p : pts) {
      for (const Facet& f : P.facets()) CHECK(f.normal.dot(p) - f.offset <= 1e-12);
    }
  }
}

TEST_CASE("lower-dimensional hulls") {
  std::vector<Vec3> seg{Vec3(0, 0, 0), Vec3(0.5, 0.5, 0.5), Vec3(1, 1, 1)};
  Polytope S = Polytope::from_points(seg);
  CHECK(S.dimension() == 1);
  CHECK(intrinsic_volumes(S)[1] == doctest::Approx(std::sqrt(3.0)));
  std::vector<Vec3> sq{Vec3(0, 0, 1), Vec3(2, 0, 1), Vec3(2, 2, 1), Vec3(0, 2, 1), Vec3(1, 0, 1), Vec3(1, 1, 1)};
  Polytope Q = Polytope::from_points(sq);
  CHECK(Q.dimension() == 2);
  CHECK(Q.vertices().size() == 4);
  auto V = intrinsic_volumes(Q);
  CHECK(V[2] == doctest::Approx(4.0));
  CHECK(V[1] == doctest::Approx(4.0));
  std::vector<Vec3> pt{Vec3(1, 2, 3), Vec3(1, 2, 3)};
  CHECK(Polytope::from_points(pt).dimension() == 0);
  CHECK(Polytope().dimension() == -1);
}

TEST_CASE("area measure totals follow the Steiner polynomial") {
  std::vector<Polytope> bodies = corpus();
  std::vector<Vec3> tri{Vec3(0, 0, 0), Vec3(1, 0, 0.2), Vec3(0, 1, 0.5)};
  std::vector<Vec3> seg{Vec3(0, 0, 0), Vec3(1, 2, 2)};
  std::vector<Vec3> pt{Vec3(1, 1, 1)};
  bodies.push_back(Polytope::from_points(tri));
  bodies.push_back(Polytope::from_points(seg));
  bodies.push_back(Polytope::from_points(pt));
  for (const Polytope& P : bodies) {
    auto V = intrinsic_volumes(P);
    CHECK(area_measure(P, 2).total_mass() == doctest::Approx(2 * V[2]).epsilon(1e-12).scale(1.0));
    CHECK(area_measure(P, 1).total_mass() == doctest::Approx(pi * V[1]).epsilon(1e-12).scale(1.0));
    CHECK(area_measure(P, 0).total_mass() == doctest::Approx(4 * pi).epsilon(1e-12));
  }
}

TEST_CASE("area measures are centered and reproduce mixed volumes") {
  std::vector<Polytope> bodies = corpus();
  std::vector<Vec3> tri{Vec3(0, 0, 0), Vec3(1, 0, 0.2), Vec3(0, 1, 0.5)};
  bodies.push_back(Polytope::from_points(tri));
  for (const Polytope& P : bodies) {
    auto V = intrinsic_volumes(P);
    for (int i = 0; i < 3; ++i) {
      AreaMeasure S = area_measure(P, i);
      for (int c = 0; c < 3; ++c) {
        CHECK(std::abs(integrate(S, [c](const Vec3& u) { return u[c]; }).value) < 1e-10);
      }
    }
    auto h = [&](const Vec3& u) { return P.support(u); };
    CHECK(integrate(area_measure(P, 2), h).value / 3 == doctest::Approx(V[3]).epsilon(1e-12).scale(1.0));
    CHECK(integrate(area_measure(P, 1), h).value == doctest::Approx(2 * V[2]).epsilon(1e-10).scale(1.0));
    CHECK(integrate(area_measure(P, 0), h).value == doctest::Approx(pi * V[1]).epsilon(1e-10).scale(1.0));
  }
}

TEST_CASE("steiner area measures") {
  Polytope C = Polytope::cube();
  for (double t : {0.0, 0.3, 1.7}) {
    CHECK(steiner_area_measure(C, 2, t).total_mass() == doctest::Approx(6 + 6 * pi * t + 4 * pi * t * t));
    CHECK(steiner_area_measure(C, 1, t).total_mass() == doctest::Approx(3 * pi + 4 * pi * t));
  }
  CHECK_THROWS_AS(steiner_area_measure(C, 1, -0.1), InputError);
  CHECK_THROWS_AS(area_measure(C, 3), DomainError);
  CHECK(parallel_body_measures(C, 0.5).volume == doctest::Approx(1 + 3 + 0.75 * pi + pi / 6));
}

TEST_CASE("slices and clips of the cube") {
  Polytope C = Polytope::cube();
  Polytope sq = intersect(C, Hyperplane{Vec3(0, 0, 1), 0.5});
  CHECK(sq.dimension() == 2);
  CHECK(intrinsic_volumes(sq)[2] == doctest::Approx(1.0));
  Polytope hex = intersect(C, Hyperplane{Vec3(1, 1, 1), 1.5});
  CHECK(hex.vertices().size() == 6);
  CHECK(intrinsic_volumes(hex)[2] == doctest::Approx(3 * std::sqrt(3.0) / 4));
  CHECK(intersect(C, Hyperplane{Vec3(0, 0, 1), 1.0}).dimension() == 2);
  CHECK(intersect(C, Hyperplane{Vec3(0, 0, 1), 1.5}).empty());
  CHECK(intrinsic_volumes(intersect(C, Line{Vec3(0.5, 0.5, 0), Vec3(0, 0, 1)}))[1] == doctest::Approx(1.0));
  CHECK(intrinsic_volumes(intersect(C, Line{Vec3(0, 0, 0), Vec3(1, 1, 1)}))[1] == doctest::Approx(std::sqrt(3.0)));
  CHECK(intrinsic_volumes(intersect(C, Halfspace{Vec3(0, 0, 1), 0.3}))[3] == doctest::Approx(0.3));
  Polytope D = C.transformed(Mat3::Identity(), Vec3(0.5, 0.5, 0.5));
  CHECK(intrinsic_volumes(intersect(C, D))[3] == doctest::Approx(0.125));
  Polytope far = C.transformed(Mat3::Identity(), Vec3(3, 0, 0));
  CHECK(intersect(C, far).empty());
}

TEST_CASE("rigid motions preserve intrinsic volumes") {
  Polytope P = Polytope::random_hull(15, 3);
  Mat3 R = Eigen::AngleAxisd(0.7, Vec3(1, 2, 3).normalized()).toRotationMatrix();
  Polytope Q = P.transformed(R, Vec3(0.3, -2, 1));
  auto a = intrinsic_volumes(P), b = intrinsic_volumes(Q);
  for (int i = 0; i < 4; ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-12));
  CHECK_THROWS_AS(P.transformed(2 * Mat3::Identity(), Vec3::Zero()), InputError);
}

TEST_CASE("json round trip and validation") {
  Polytope P = Polytope::random_hull(10, 7);
  Polytope Q = Polytope::from_json(nlohmann::json::parse(P.to_json().dump()));
  CHECK(Q.to_json() == P.to_json());
  CHECK_THROWS_AS(Polytope::from_json(nlohmann::json{{"dimension", 4}, {"vertices", {{0, 0, 0, 0}}}}), InputError);
  CHECK_THROWS_AS(Polytope::from_json(nlohmann::json{{"dimension", 3}}), InputError);
}

TEST_CASE("spherical quadrature") {
  CHECK(spherical_triangle_area(Vec3::UnitX(), Vec3::UnitY(), Vec3::UnitZ()) == doctest::Approx(pi / 2));
  AreaMeasure S = area_measure(Polytope::cube(), 0);
  // int z^2 over the sphere
  CHECK(integrate(S, [](const Vec3& u) { return u.z() * u.z(); }).value == doctest::Approx(4 * pi / 3).epsilon(1e-12));
  CHECK_THROWS_AS(integrate(S, [](const Vec3& u) { return std::abs(u.x() - 0.3); }, 1e-14, 1000), ToleranceError);
}
