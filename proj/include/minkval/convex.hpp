#pragma once

#include <Eigen/Core>
#include <array>
#include <cstdint>
#include <functional>
#include <nlohmann/json.hpp>
#include <span>
#include <vector>

#include "minkval/harmonics.hpp"

namespace minkval {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// 2-face of a 3-polytope. Vertices are ordered counterclockwise seen from
/// the tip of the outer normal. For a planar polygon the single facet holds
/// the polygon with an arbitrary choice of normal.
struct Facet {
  Vec3 normal = Vec3::Zero();
  double offset = 0.0;
  std::vector<int> vertices;
  double area = 0.0;
};

/// 1-face. For 3-polytopes `left`/`right` index the two adjacent facets; for a
/// polygon `outer` is the in-plane outer normal.
struct Edge {
  int a = 0;
  int b = 0;
  int left = -1;
  int right = -1;
  Vec3 outer = Vec3::Zero();
  double length = 0.0;
};

/// {x : normal.x <= offset}
struct Halfspace {
  Vec3 normal;
  double offset;
};

/// {x : normal.x == offset}, normal a unit vector.
struct Hyperplane {
  Vec3 normal;
  double offset;
};

struct Line {
  Vec3 point;
  Vec3 direction;
};

/// Convex polytope in R^3 of any affine dimension (empty, point, segment,
/// polygon, solid), stored through its face lattice.
class Polytope {
 public:
  Polytope() = default;  // empty

  /// Convex hull; points closer than rel_tol times the diameter are merged.
  static Polytope from_points(std::span<const Vec3> points, double rel_tol = 1e-10);

  static Polytope cube(double side = 1.0);
  static Polytope simplex();
  static Polytope octahedron();
  /// Hull of `count` uniform points in [-1,1]^3.
  static Polytope random_hull(int count, std::uint64_t seed);

  bool empty() const { return dim_ < 0; }
  /// Affine dimension, -1 for the empty set.
  int dimension() const { return dim_; }
  const std::vector<Vec3>& vertices() const { return vertices_; }
  const std::vector<Facet>& facets() const { return facets_; }
  const std::vector<Edge>& edges() const { return edges_; }
  /// Unit normal of the affine hull of a polygon, unit direction of a segment.
  const Vec3& axis() const { return axis_; }
  double tolerance() const { return eps_; }

  /// R x + t applied to every point.
  Polytope transformed(const Mat3& R, const Vec3& t) const;
  Vec3 vertex_centroid() const;
  double circumradius(const Vec3& center) const;
  double support(const Vec3& u) const;

  nlohmann::json to_json() const;
  /// Accepts {"dimension": 3, "vertices": [[x,y,z], ...]}.
  static Polytope from_json(const nlohmann::json& j);

 private:
  void build_solid(const std::vector<Vec3>& pts);
  void build_polygon(const std::vector<Vec3>& pts, const Vec3& normal);

  int dim_ = -1;
  double eps_ = 0.0;
  Vec3 axis_ = Vec3::Zero();
  std::vector<Vec3> vertices_;
  std::vector<Facet> facets_;
  std::vector<Edge> edges_;
};

Polytope intersect(const Polytope& P, const Halfspace& h);
Polytope intersect(const Polytope& P, const Hyperplane& h);
Polytope intersect(const Polytope& P, const Line& l);
/// K intersected with a full-dimensional L.
Polytope intersect(const Polytope& K, const Polytope& L);

/// V_0..V_3.
std::array<double, 4> intrinsic_volumes(const Polytope& P);

struct AtomPiece {
  Vec3 u;
  double mass;
};

/// Arc u(phi) = cos(phi) start + sin(phi) tangent, 0 <= phi <= angle, with
/// constant density against arc length.
struct ArcPiece {
  Vec3 start;
  Vec3 tangent;
  double angle;
  double density;
};

/// Spherical triangle (geodesic edges) with constant density.
struct TrianglePiece {
  std::array<Vec3, 3> corners;
  double weight;
};

/// Area measure S_i of a polytope: atoms, arcs and spherical triangles.
struct AreaMeasure {
  int degree = 0;
  std::vector<AtomPiece> atoms;
  std::vector<ArcPiece> arcs;
  std::vector<TrianglePiece> triangles;

  double total_mass() const;
  AreaMeasure scaled(double c) const;
  AreaMeasure& operator+=(const AreaMeasure& o);
};

/// Area of a spherical triangle.
double spherical_triangle_area(const Vec3& a, const Vec3& b, const Vec3& c);

/// S_i(P, .), 0 <= i <= 2.
AreaMeasure area_measure(const Polytope& P, int i);

/// S_i(P + tB, .) = sum_j C(i,j) t^{i-j} S_j(P, .), t >= 0.
AreaMeasure steiner_area_measure(const Polytope& P, int i, double t);

/// int f dS with adaptive quadrature on arcs and triangles. Throws
/// ToleranceError when the evaluation budget runs out.
Estimate integrate(const AreaMeasure& S, const std::function<double(const Vec3&)>& f, double tol = 1e-12,
                   long budget = 50'000'000);

/// All area measures S_0..S_2 and V_3 of a body, possibly a parallel body.
struct BodyMeasures {
  std::array<AreaMeasure, 3> S;
  double volume = 0.0;
  bool empty = false;
};

BodyMeasures body_measures(const Polytope& P);
BodyMeasures parallel_body_measures(const Polytope& P, double t);

}  // namespace minkval
