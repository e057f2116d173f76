#include "minkval/convex.hpp"

#include <Eigen/Geometry>
#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>
#include <random>
#include <string>

#include "minkval/constants.hpp"
#include "minkval/error.hpp"

namespace minkval {

namespace {

struct Frame {
  Vec3 e1, e2;
};

Frame frame_around(const Vec3& n) {
  const Vec3 a = std::abs(n.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
  Vec3 e1 = (a - a.dot(n) * n).normalized();
  return {e1, n.cross(e1)};
}

double clamp_unit(double x) { return std::clamp(x, -1.0, 1.0); }

struct UnionFind {
  std::vector<int> p;
  explicit UnionFind(int n) : p(n) { std::iota(p.begin(), p.end(), 0); }
  int find(int x) { return p[x] == x ? x : p[x] = find(p[x]); }
  void unite(int a, int b) { p[find(a)] = find(b); }
};

}  // namespace

// ---------------------------------------------------------------------------
// Construction

Polytope Polytope::from_points(std::span<const Vec3> points, double rel_tol) {
  Polytope P;
  if (points.empty()) return P;
  for (const Vec3& p : points) {
    if (!p.allFinite()) throw InputError("polytope vertices must be finite");
  }
  Vec3 lo = points[0], hi = points[0];
  for (const Vec3& p : points) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const double diam = (hi - lo).norm();
  const double eps = rel_tol * diam;
  P.eps_ = eps;

  std::vector<Vec3> u;
  for (const Vec3& p : points) {
    bool dup = false;
    for (const Vec3& q : u) {
      if ((p - q).norm() <= eps) {
        dup = true;
        break;
      }
    }
    if (!dup) u.push_back(p);
  }
  if (u.size() == 1 || diam == 0.0) {
    P.dim_ = 0;
    P.vertices_ = {u[0]};
    return P;
  }

  const Vec3 p0 = u[0];
  auto argmax = [&](auto&& dist) {
    std::size_t best = 0;
    double bv = -1.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      const double d = dist(u[i]);
      if (d > bv) {
        bv = d;
        best = i;
      }
    }
    return std::pair{best, bv};
  };
  auto [i1, d1] = argmax([&](const Vec3& x) { return (x - p0).norm(); });
  const Vec3 dir = (u[i1] - p0) / d1;
  auto [i2, d2] = argmax([&](const Vec3& x) {
    const Vec3 r = x - p0;
    return (r - r.dot(dir) * dir).norm();
  });
  if (d2 <= eps) {
    double tmin = 0.0, tmax = 0.0;
    Vec3 a = p0, b = p0;
    for (const Vec3& x : u) {
      const double t = (x - p0).dot(dir);
      if (t < tmin) {
        tmin = t;
        a = x;
      }
      if (t > tmax) {
        tmax = t;
        b = x;
      }
    }
    P.dim_ = 1;
    P.vertices_ = {a, b};
    P.axis_ = (b - a).normalized();
    P.edges_.push_back(Edge{0, 1, -1, -1, Vec3::Zero(), (b - a).norm()});
    return P;
  }
  const Vec3 nrm = (u[i1] - p0).cross(u[i2] - p0).normalized();
  auto [i3, d3] = argmax([&](const Vec3& x) { return std::abs((x - p0).dot(nrm)); });
  if (d3 <= eps) {
    P.build_polygon(u, nrm);
    return P;
  }
  // move the initial tetrahedron to the front
  std::vector<Vec3> ordered{u[0], u[i1], u[i2], u[i3]};
  for (std::size_t i = 1; i < u.size(); ++i) {
    if (i != i1 && i != i2 && i != i3) ordered.push_back(u[i]);
  }
  P.build_solid(ordered);
  return P;
}

void Polytope::build_polygon(const std::vector<Vec3>& pts, const Vec3& normal) {
  const Frame f = frame_around(normal);
  std::vector<std::size_t> idx(pts.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::vector<Eigen::Vector2d> q(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) q[i] = {pts[i].dot(f.e1), pts[i].dot(f.e2)};
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return q[a].x() < q[b].x() || (q[a].x() == q[b].x() && q[a].y() < q[b].y());
  });
  auto cross = [&](std::size_t o, std::size_t a, std::size_t b) {
    const Eigen::Vector2d u = q[a] - q[o], v = q[b] - q[o];
    return u.x() * v.y() - u.y() * v.x();
  };
  auto keep_turn = [&](std::size_t o, std::size_t a, std::size_t b) {
    return cross(o, a, b) > eps_ * (q[b] - q[o]).norm();
  };
  std::vector<std::size_t> hull;
  for (std::size_t i : idx) {
    while (hull.size() >= 2 && !keep_turn(hull[hull.size() - 2], hull.back(), i)) hull.pop_back();
    hull.push_back(i);
  }
  const std::size_t lower = hull.size() + 1;
  for (auto it = idx.rbegin() + 1; it != idx.rend(); ++it) {
    while (hull.size() >= lower && !keep_turn(hull[hull.size() - 2], hull.back(), *it)) hull.pop_back();
    hull.push_back(*it);
  }
  hull.pop_back();

  dim_ = 2;
  axis_ = normal;
  vertices_.clear();
  for (std::size_t i : hull) vertices_.push_back(pts[i]);
  const int m = static_cast<int>(vertices_.size());
  Facet F;
  F.normal = normal;
  double area = 0.0, off = 0.0;
  for (int i = 0; i < m; ++i) {
    F.vertices.push_back(i);
    area += vertices_[i].cross(vertices_[(i + 1) % m]).dot(normal);
    off += normal.dot(vertices_[i]);
  }
  F.area = area / 2.0;
  F.offset = off / m;
  facets_ = {F};
  edges_.clear();
  for (int i = 0; i < m; ++i) {
    const int j = (i + 1) % m;
    const Vec3 e = vertices_[j] - vertices_[i];
    edges_.push_back(Edge{i, j, -1, -1, e.cross(normal).normalized(), e.norm()});
  }
}

void Polytope::build_solid(const std::vector<Vec3>& pts) {
  struct Tri {
    std::array<int, 3> v;
    Vec3 n;
    double off;
    bool alive;
  };
  std::vector<Tri> tris;
  auto make = [&](int a, int b, int c) {
    Vec3 n = (pts[b] - pts[a]).cross(pts[c] - pts[a]);
    n.normalize();
    tris.push_back(Tri{{a, b, c}, n, n.dot(pts[a]), true});
  };
  auto oriented = [&](int a, int b, int c, int opp) {
    const Vec3 n = (pts[b] - pts[a]).cross(pts[c] - pts[a]);
    if (n.dot(pts[opp] - pts[a]) > 0) {
      make(a, c, b);
    } else {
      make(a, b, c);
    }
  };
  oriented(0, 1, 2, 3);
  oriented(0, 1, 3, 2);
  oriented(0, 2, 3, 1);
  oriented(1, 2, 3, 0);

  for (int p = 4; p < static_cast<int>(pts.size()); ++p) {
    std::map<std::pair<int, int>, int> directed;
    std::vector<int> visible;
    for (int t = 0; t < static_cast<int>(tris.size()); ++t) {
      if (tris[t].alive && tris[t].n.dot(pts[p]) - tris[t].off > eps_) visible.push_back(t);
    }
    if (visible.empty()) continue;
    for (int t : visible) {
      for (int e = 0; e < 3; ++e) directed[{tris[t].v[e], tris[t].v[(e + 1) % 3]}] = t;
    }
    std::vector<std::pair<int, int>> horizon;
    for (const auto& [edge, t] : directed) {
      if (!directed.count({edge.second, edge.first})) horizon.push_back(edge);
    }
    for (int t : visible) tris[t].alive = false;
    for (const auto& [a, b] : horizon) make(a, b, p);
    if (tris.size() > 4 * pts.size() + 64) {
      std::erase_if(tris, [](const Tri& t) { return !t.alive; });
    }
  }
  std::erase_if(tris, [](const Tri& t) { return !t.alive; });

  // merge coplanar neighbours into facets
  const int T = static_cast<int>(tris.size());
  std::map<std::pair<int, int>, int> owner;
  for (int t = 0; t < T; ++t) {
    for (int e = 0; e < 3; ++e) owner[{tris[t].v[e], tris[t].v[(e + 1) % 3]}] = t;
  }
  UnionFind uf(T);
  for (int t = 0; t < T; ++t) {
    for (int e = 0; e < 3; ++e) {
      auto it = owner.find({tris[t].v[(e + 1) % 3], tris[t].v[e]});
      if (it == owner.end()) throw ToleranceError("convex hull: open surface");
      const Tri& u = tris[it->second];
      bool coplanar = tris[t].n.dot(u.n) > 0;
      for (int w : u.v) coplanar = coplanar && std::abs(tris[t].n.dot(pts[w]) - tris[t].off) <= eps_;
      if (coplanar) uf.unite(t, it->second);
    }
  }
  std::map<int, std::vector<int>> groups;
  for (int t = 0; t < T; ++t) groups[uf.find(t)].push_back(t);

  struct Loop {
    Vec3 normal;
    std::vector<int> verts;
    std::vector<bool> corner;
  };
  std::vector<Loop> loops;
  for (const auto& [root, members] : groups) {
    Vec3 n = Vec3::Zero();
    std::vector<int> vs;
    for (int t : members) {
      const auto& v = tris[t].v;
      n += (pts[v[1]] - pts[v[0]]).cross(pts[v[2]] - pts[v[0]]);
      vs.insert(vs.end(), v.begin(), v.end());
    }
    n.normalize();
    std::sort(vs.begin(), vs.end());
    vs.erase(std::unique(vs.begin(), vs.end()), vs.end());
    Vec3 c = Vec3::Zero();
    for (int v : vs) c += pts[v];
    c /= static_cast<double>(vs.size());
    const Frame f = frame_around(n);
    std::sort(vs.begin(), vs.end(), [&](int a, int b) {
      const Vec3 ra = pts[a] - c, rb = pts[b] - c;
      return std::atan2(ra.dot(f.e2), ra.dot(f.e1)) < std::atan2(rb.dot(f.e2), rb.dot(f.e1));
    });
    const int m = static_cast<int>(vs.size());
    Loop L{n, vs, std::vector<bool>(m, true)};
    for (int i = 0; i < m; ++i) {
      const Vec3& a = pts[vs[(i + m - 1) % m]];
      const Vec3& b = pts[vs[i]];
      const Vec3& d = pts[vs[(i + 1) % m]];
      const Vec3 ad = d - a;
      const double dist = (b - a).cross(ad).norm() / ad.norm();
      if (dist <= eps_) L.corner[i] = false;
    }
    loops.push_back(std::move(L));
  }
  std::vector<int> remap(pts.size(), -1);
  for (const Loop& L : loops) {
    for (std::size_t i = 0; i < L.verts.size(); ++i) {
      if (L.corner[i]) remap[L.verts[i]] = 0;
    }
  }
  vertices_.clear();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (remap[i] == 0) {
      remap[i] = static_cast<int>(vertices_.size());
      vertices_.push_back(pts[i]);
    }
  }
  facets_.clear();
  for (const Loop& L : loops) {
    Facet F;
    F.normal = L.normal;
    for (int v : L.verts) {
      if (remap[v] >= 0) F.vertices.push_back(remap[v]);
    }
    const int m = static_cast<int>(F.vertices.size());
    if (m < 3) throw ToleranceError("convex hull: degenerate facet");
    double area = 0.0, off = 0.0;
    for (int i = 0; i < m; ++i) {
      area += vertices_[F.vertices[i]].cross(vertices_[F.vertices[(i + 1) % m]]).dot(F.normal);
      off += F.normal.dot(vertices_[F.vertices[i]]);
    }
    F.area = area / 2.0;
    F.offset = off / m;
    facets_.push_back(std::move(F));
  }
  std::map<std::pair<int, int>, Edge> edges;
  for (int fi = 0; fi < static_cast<int>(facets_.size()); ++fi) {
    const auto& vs = facets_[fi].vertices;
    for (std::size_t i = 0; i < vs.size(); ++i) {
      const int a = vs[i], b = vs[(i + 1) % vs.size()];
      Edge& e = edges[{std::min(a, b), std::max(a, b)}];
      e.a = std::min(a, b);
      e.b = std::max(a, b);
      e.length = (vertices_[a] - vertices_[b]).norm();
      if (a < b) {
        if (e.left >= 0) throw ToleranceError("convex hull: non-manifold edge");
        e.left = fi;
      } else {
        if (e.right >= 0) throw ToleranceError("convex hull: non-manifold edge");
        e.right = fi;
      }
    }
  }
  edges_.clear();
  for (auto& [key, e] : edges) {
    if (e.left < 0 || e.right < 0) throw ToleranceError("convex hull: unmatched edge");
    edges_.push_back(e);
  }
  dim_ = 3;
}

Polytope Polytope::cube(double side) {
  std::vector<Vec3> v;
  for (int i = 0; i < 8; ++i) v.emplace_back(side * (i & 1), side * ((i >> 1) & 1), side * ((i >> 2) & 1));
  return from_points(v);
}

Polytope Polytope::simplex() {
  std::vector<Vec3> v{Vec3::Zero(), Vec3::UnitX(), Vec3::UnitY(), Vec3::UnitZ()};
  return from_points(v);
}

Polytope Polytope::octahedron() {
  std::vector<Vec3> v{Vec3::UnitX(), -Vec3::UnitX(), Vec3::UnitY(), -Vec3::UnitY(), Vec3::UnitZ(), -Vec3::UnitZ()};
  return from_points(v);
}

Polytope Polytope::random_hull(int count, std::uint64_t seed) {
  if (count < 4) throw InputError("random_hull: need at least 4 points");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  std::vector<Vec3> v(count);
  for (Vec3& p : v) p = Vec3(U(rng), U(rng), U(rng));
  return from_points(v);
}

Polytope Polytope::transformed(const Mat3& R, const Vec3& t) const {
  if ((R.transpose() * R - Mat3::Identity()).norm() > 1e-9 || R.determinant() < 0) {
    throw InputError("transformed: matrix is not a rotation");
  }
  Polytope Q = *this;
  for (Vec3& v : Q.vertices_) v = R * v + t;
  for (Facet& f : Q.facets_) {
    f.normal = R * f.normal;
    f.offset += f.normal.dot(t);
  }
  for (Edge& e : Q.edges_) e.outer = R * e.outer;
  Q.axis_ = R * axis_;
  return Q;
}

Vec3 Polytope::vertex_centroid() const {
  if (empty()) throw DomainError("centroid of the empty set");
  Vec3 c = Vec3::Zero();
  for (const Vec3& v : vertices_) c += v;
  return c / static_cast<double>(vertices_.size());
}

double Polytope::circumradius(const Vec3& center) const {
  double r = 0.0;
  for (const Vec3& v : vertices_) r = std::max(r, (v - center).norm());
  return r;
}

double Polytope::support(const Vec3& u) const {
  if (empty()) throw DomainError("support function of the empty set");
  double h = -std::numeric_limits<double>::infinity();
  for (const Vec3& v : vertices_) h = std::max(h, u.dot(v));
  return h;
}

nlohmann::json Polytope::to_json() const {
  nlohmann::json j;
  j["dimension"] = 3;
  j["affine_dimension"] = dim_;
  j["vertices"] = nlohmann::json::array();
  for (const Vec3& v : vertices_) j["vertices"].push_back({v.x(), v.y(), v.z()});
  return j;
}

Polytope Polytope::from_json(const nlohmann::json& j) {
  try {
    const int d = j.at("dimension").get<int>();
    if (d != 3) {
      throw InputError("polytope geometry is implemented for dimension 3 only, got " + std::to_string(d));
    }
    std::vector<Vec3> pts;
    for (const auto& v : j.at("vertices")) {
      auto c = v.get<std::vector<double>>();
      if (c.size() != 3) throw InputError("polytope vertex must have 3 coordinates");
      pts.emplace_back(c[0], c[1], c[2]);
    }
    if (pts.empty()) throw InputError("polytope has no vertices");
    return from_points(pts);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("polytope JSON: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Intersections

namespace {

template <class Keep>
Polytope cut(const Polytope& P, const Vec3& n, double s, Keep keep) {
  if (P.empty()) return P;
  const double eps = std::max(P.tolerance(), 1e-14 * std::max(1.0, std::abs(s)));
  std::vector<double> d;
  for (const Vec3& v : P.vertices()) d.push_back(n.dot(v) - s);
  std::vector<Vec3> pts;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (keep(d[i], eps)) pts.push_back(P.vertices()[i]);
  }
  for (const Edge& e : P.edges()) {
    const double da = d[e.a], db = d[e.b];
    if ((da > eps && db < -eps) || (da < -eps && db > eps)) {
      const double t = da / (da - db);
      pts.push_back(P.vertices()[e.a] + t * (P.vertices()[e.b] - P.vertices()[e.a]));
    }
  }
  return Polytope::from_points(pts);
}

}  // namespace

Polytope intersect(const Polytope& P, const Halfspace& h) {
  if (P.empty()) return P;
  const double len = h.normal.norm();
  if (!(len > 0)) throw InputError("halfspace normal must be nonzero");
  const Vec3 n = h.normal / len;
  const double s = h.offset / len;
  bool all_in = true, all_out = true;
  for (const Vec3& v : P.vertices()) {
    const double d = n.dot(v) - s;
    all_in = all_in && d <= P.tolerance();
    all_out = all_out && d > P.tolerance();
  }
  if (all_in) return P;
  if (all_out) return Polytope();
  return cut(P, n, s, [](double d, double eps) { return d <= eps; });
}

Polytope intersect(const Polytope& P, const Hyperplane& h) {
  const double len = h.normal.norm();
  if (!(len > 0)) throw InputError("hyperplane normal must be nonzero");
  return cut(P, h.normal / len, h.offset / len, [](double d, double eps) { return std::abs(d) <= eps; });
}

Polytope intersect(const Polytope& P, const Line& l) {
  const double len = l.direction.norm();
  if (!(len > 0)) throw InputError("line direction must be nonzero");
  const Frame f = frame_around(l.direction / len);
  Polytope Q = intersect(P, Hyperplane{f.e1, f.e1.dot(l.point)});
  return intersect(Q, Hyperplane{f.e2, f.e2.dot(l.point)});
}

Polytope intersect(const Polytope& K, const Polytope& L) {
  if (L.dimension() != 3) throw InputError("intersect: second body must be full-dimensional");
  Polytope Q = K;
  for (const Facet& f : L.facets()) {
    Q = intersect(Q, Halfspace{f.normal, f.offset});
    if (Q.empty()) break;
  }
  return Q;
}

// ---------------------------------------------------------------------------
// Intrinsic volumes

std::array<double, 4> intrinsic_volumes(const Polytope& P) {
  std::array<double, 4> V{0, 0, 0, 0};
  if (P.empty()) return V;
  V[0] = 1.0;
  switch (P.dimension()) {
    case 0:
      break;
    case 1:
      V[1] = P.edges()[0].length;
      break;
    case 2: {
      V[2] = P.facets()[0].area;
      double per = 0.0;
      for (const Edge& e : P.edges()) per += e.length;
      V[1] = per / 2.0;
      break;
    }
    case 3: {
      double vol = 0.0, area = 0.0, mean = 0.0;
      for (const Facet& f : P.facets()) {
        vol += f.offset * f.area / 3.0;
        area += f.area;
      }
      for (const Edge& e : P.edges()) {
        const double th = std::acos(clamp_unit(P.facets()[e.left].normal.dot(P.facets()[e.right].normal)));
        mean += e.length * th;
      }
      V[3] = vol;
      V[2] = area / 2.0;
      V[1] = mean / (2.0 * std::numbers::pi);
      break;
    }
  }
  return V;
}

// ---------------------------------------------------------------------------
// Area measures

double spherical_triangle_area(const Vec3& a, const Vec3& b, const Vec3& c) {
  const double num = std::abs(a.dot(b.cross(c)));
  const double den = 1.0 + a.dot(b) + b.dot(c) + c.dot(a);
  return 2.0 * std::atan2(num, den);
}

double AreaMeasure::total_mass() const {
  double s = 0.0;
  for (const AtomPiece& a : atoms) s += a.mass;
  for (const ArcPiece& a : arcs) s += a.angle * a.density;
  for (const TrianglePiece& t : triangles) {
    s += t.weight * spherical_triangle_area(t.corners[0], t.corners[1], t.corners[2]);
  }
  return s;
}

AreaMeasure AreaMeasure::scaled(double c) const {
  AreaMeasure r = *this;
  for (AtomPiece& a : r.atoms) a.mass *= c;
  for (ArcPiece& a : r.arcs) a.density *= c;
  for (TrianglePiece& t : r.triangles) t.weight *= c;
  return r;
}

AreaMeasure& AreaMeasure::operator+=(const AreaMeasure& o) {
  atoms.insert(atoms.end(), o.atoms.begin(), o.atoms.end());
  arcs.insert(arcs.end(), o.arcs.begin(), o.arcs.end());
  triangles.insert(triangles.end(), o.triangles.begin(), o.triangles.end());
  return *this;
}

namespace {

void add_hemisphere(AreaMeasure& S, const Vec3& d) {
  const Frame f = frame_around(d);
  const Vec3 ring[4] = {f.e1, f.e2, -f.e1, -f.e2};
  for (int i = 0; i < 4; ++i) S.triangles.push_back({{d, ring[i], ring[(i + 1) % 4]}, 1.0});
}

}  // namespace

AreaMeasure area_measure(const Polytope& P, int i) {
  if (i < 0 || i > 2) throw DomainError("area_measure: degree must be 0, 1 or 2 in R^3");
  AreaMeasure S;
  S.degree = i;
  if (P.empty()) return S;
  const double norm = 1.0 / binomial(2, i);
  const int d = P.dimension();

  if (d == 3) {
    if (i == 2) {
      for (const Facet& f : P.facets()) S.atoms.push_back({f.normal, f.area});
    } else if (i == 1) {
      for (const Edge& e : P.edges()) {
        const Vec3& n1 = P.facets()[e.left].normal;
        const Vec3& n2 = P.facets()[e.right].normal;
        const double c = clamp_unit(n1.dot(n2));
        const double ang = std::acos(c);
        if (ang <= 0.0) continue;
        S.arcs.push_back({n1, (n2 - c * n1).normalized(), ang, norm * e.length});
      }
    } else {
      std::vector<std::vector<int>> incident(P.vertices().size());
      for (int fi = 0; fi < static_cast<int>(P.facets().size()); ++fi) {
        for (int v : P.facets()[fi].vertices) incident[v].push_back(fi);
      }
      for (const auto& fs : incident) {
        Vec3 m = Vec3::Zero();
        for (int fi : fs) m += P.facets()[fi].normal;
        m.normalize();
        const Frame f = frame_around(m);
        std::vector<Vec3> ns;
        for (int fi : fs) ns.push_back(P.facets()[fi].normal);
        std::sort(ns.begin(), ns.end(), [&](const Vec3& a, const Vec3& b) {
          return std::atan2(a.dot(f.e2), a.dot(f.e1)) < std::atan2(b.dot(f.e2), b.dot(f.e1));
        });
        for (std::size_t k = 0; k < ns.size(); ++k) {
          S.triangles.push_back({{m, ns[k], ns[(k + 1) % ns.size()]}, 1.0});
        }
      }
    }
  } else if (d == 2) {
    const Vec3& nu = P.axis();
    if (i == 2) {
      S.atoms.push_back({nu, P.facets()[0].area});
      S.atoms.push_back({-nu, P.facets()[0].area});
    } else if (i == 1) {
      for (const Edge& e : P.edges()) S.arcs.push_back({nu, e.outer, std::numbers::pi, norm * e.length});
    } else {
      const int m = static_cast<int>(P.edges().size());
      for (int k = 0; k < m; ++k) {
        const Vec3& prev = P.edges()[(k + m - 1) % m].outer;
        const Vec3& next = P.edges()[k].outer;
        S.triangles.push_back({{nu, prev, next}, 1.0});
        S.triangles.push_back({{-nu, next, prev}, 1.0});
      }
    }
  } else if (d == 1) {
    if (i == 1) {
      const Frame f = frame_around(P.axis());
      S.arcs.push_back({f.e1, f.e2, 2.0 * std::numbers::pi, norm * P.edges()[0].length});
    } else if (i == 0) {
      add_hemisphere(S, P.axis());
      add_hemisphere(S, -P.axis());
    }
  } else if (i == 0) {
    for (int k = 0; k < 8; ++k) {
      const double sx = k & 1 ? -1.0 : 1.0, sy = k & 2 ? -1.0 : 1.0, sz = k & 4 ? -1.0 : 1.0;
      S.triangles.push_back({{Vec3(sx, 0, 0), Vec3(0, sy, 0), Vec3(0, 0, sz)}, 1.0});
    }
  }
  return S;
}

AreaMeasure steiner_area_measure(const Polytope& P, int i, double t) {
  if (!(t >= 0.0)) throw InputError("steiner_area_measure: parameter must be >= 0");
  if (i < 0 || i > 2) throw DomainError("steiner_area_measure: degree must be 0, 1 or 2 in R^3");
  AreaMeasure S;
  S.degree = i;
  for (int j = 0; j <= i; ++j) {
    const double c = binomial(i, j) * std::pow(t, i - j);
    if (c == 0.0) continue;
    S += area_measure(P, j).scaled(c);
  }
  return S;
}

BodyMeasures body_measures(const Polytope& P) { return parallel_body_measures(P, 0.0); }

BodyMeasures parallel_body_measures(const Polytope& P, double t) {
  BodyMeasures B;
  B.empty = P.empty();
  for (int i = 0; i < 3; ++i) B.S[i] = steiner_area_measure(P, i, t);
  const auto V = intrinsic_volumes(P);
  B.volume = V[3] + 2.0 * V[2] * t + std::numbers::pi * V[1] * t * t + 4.0 * std::numbers::pi / 3.0 * V[0] * t * t * t;
  return B;
}

// ---------------------------------------------------------------------------
// Quadrature on the sphere

namespace {

struct Integrator {
  const std::function<double(const Vec3&)>& f;
  double tol;
  long budget;
  double floor = 0.0;  // absolute error accepted per unit of measure
  long used = 0;
  const Quadrature& g_lo = gauss_legendre(10);
  const Quadrature& g_hi = gauss_legendre(20);
  const Quadrature& g_tri = gauss_legendre(8);

  double eval(const Vec3& u) {
    if (++used > budget) throw ToleranceError("spherical quadrature: evaluation budget exhausted");
    return f(u);
  }

  // arc rule on [a,b]; returns value and max |f| seen
  std::pair<double, double> arc_rule(const ArcPiece& arc, double a, double b, const Quadrature& q) {
    const double h = 0.5 * (b - a), m = 0.5 * (a + b);
    double s = 0.0, mx = 0.0;
    for (std::size_t i = 0; i < q.nodes.size(); ++i) {
      const double ph = m + h * q.nodes[i];
      const double v = eval(std::cos(ph) * arc.start + std::sin(ph) * arc.tangent);
      s += q.weights[i] * v;
      mx = std::max(mx, std::abs(v));
    }
    return {s * h, mx};
  }

  Estimate arc(const ArcPiece& a, double lo, double hi, int depth) {
    auto [coarse, m1] = arc_rule(a, lo, hi, g_lo);
    auto [fine, m2] = arc_rule(a, lo, hi, g_hi);
    const double err = std::abs(fine - coarse);
    const double scale = std::max(std::abs(fine), std::max(m1, m2) * (hi - lo));
    if (err <= tol * scale + floor * (hi - lo) || depth >= 24) return {fine * a.density, err * std::abs(a.density)};
    const double mid = 0.5 * (lo + hi);
    Estimate l = arc(a, lo, mid, depth + 1), r = arc(a, mid, hi, depth + 1);
    return {l.value + r.value, l.error + r.error};
  }

  std::pair<double, double> tri_rule(const Vec3& A, const Vec3& B, const Vec3& C) {
    const Vec3 N = (B - A).cross(C - A);
    const double jac = std::abs(A.dot(N));
    double s = 0.0, mx = 0.0;
    for (std::size_t i = 0; i < g_tri.nodes.size(); ++i) {
      const double x = 0.5 * (1.0 + g_tri.nodes[i]), wx = 0.5 * g_tri.weights[i];
      for (std::size_t j = 0; j < g_tri.nodes.size(); ++j) {
        const double y = 0.5 * (1.0 + g_tri.nodes[j]), wy = 0.5 * g_tri.weights[j];
        const Vec3 p = A + x * (B - A) + (1.0 - x) * y * (C - A);
        const double r = p.norm();
        const double v = eval(p / r);
        s += wx * wy * (1.0 - x) * v * jac / (r * r * r);
        mx = std::max(mx, std::abs(v));
      }
    }
    return {s, mx};
  }

  Estimate tri(const Vec3& A, const Vec3& B, const Vec3& C, double whole, double mx, int depth) {
    const Vec3 ab = 0.5 * (A + B), bc = 0.5 * (B + C), ca = 0.5 * (C + A);
    const Vec3 kids[4][3] = {{A, ab, ca}, {ab, B, bc}, {ca, bc, C}, {ab, bc, ca}};
    double parts[4], mxs[4], sum = 0.0, m = mx;
    for (int k = 0; k < 4; ++k) {
      std::tie(parts[k], mxs[k]) = tri_rule(kids[k][0], kids[k][1], kids[k][2]);
      sum += parts[k];
      m = std::max(m, mxs[k]);
    }
    const double err = std::abs(sum - whole);
    const double area = spherical_triangle_area(A.normalized(), B.normalized(), C.normalized());
    if (err <= tol * std::max(std::abs(sum), m * area) + floor * area || depth >= 14) return {sum, err};
    Estimate out;
    for (int k = 0; k < 4; ++k) {
      Estimate e = tri(kids[k][0], kids[k][1], kids[k][2], parts[k], mxs[k], depth + 1);
      out.value += e.value;
      out.error += e.error;
    }
    return out;
  }
};

}  // namespace

Estimate integrate(const AreaMeasure& S, const std::function<double(const Vec3&)>& f, double tol, long budget) {
  Integrator I{f, tol, budget};
  // rounding-level noise relative to the overall size of f is not resolved
  double fscale = 0.0;
  for (const AtomPiece& a : S.atoms) fscale = std::max(fscale, std::abs(I.eval(a.u)));
  for (const ArcPiece& a : S.arcs) {
    for (double ph : {0.0, 0.5 * a.angle, a.angle}) {
      fscale = std::max(fscale, std::abs(I.eval(std::cos(ph) * a.start + std::sin(ph) * a.tangent)));
    }
  }
  for (const TrianglePiece& t : S.triangles) {
    fscale = std::max(fscale, std::abs(I.eval((t.corners[0] + t.corners[1] + t.corners[2]).normalized())));
  }
  I.floor = 1e-14 * fscale;
  Estimate out;
  for (const AtomPiece& a : S.atoms) out.value += a.mass * I.eval(a.u);
  for (const ArcPiece& a : S.arcs) {
    if (a.density == 0.0 || a.angle <= 0.0) continue;
    // split long arcs so the first level already resolves smooth integrands
    const int pieces = std::max(1, static_cast<int>(std::ceil(a.angle / (std::numbers::pi / 2))));
    for (int p = 0; p < pieces; ++p) {
      Estimate e = I.arc(a, a.angle * p / pieces, a.angle * (p + 1) / pieces, 0);
      out.value += e.value;
      out.error += e.error;
    }
  }
  for (const TrianglePiece& t : S.triangles) {
    if (t.weight == 0.0) continue;
    const auto& c = t.corners;
    if (spherical_triangle_area(c[0], c[1], c[2]) == 0.0) continue;
    auto [whole, mx] = I.tri_rule(c[0], c[1], c[2]);
    Estimate e = I.tri(c[0], c[1], c[2], whole, mx, 0);
    out.value += t.weight * e.value;
    out.error += std::abs(t.weight) * e.error;
  }
  return out;
}

}  // namespace minkval
