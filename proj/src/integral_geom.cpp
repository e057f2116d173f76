#include "minkval/integral_geom.hpp"

#include <Eigen/Geometry>
#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <thread>

#include "minkval/constants.hpp"
#include "minkval/error.hpp"

namespace minkval {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Frame (d, e1, e2) from the Gram-Schmidt process on Gaussian vectors.
std::array<Vec3, 3> random_frame(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  std::array<Vec3, 3> f;
  for (int i = 0; i < 3; ++i) {
    for (;;) {
      Vec3 v(g(rng), g(rng), g(rng));
      for (int j = 0; j < i; ++j) v -= v.dot(f[j]) * f[j];
      const double len = v.norm();
      if (len > 1e-8) {
        f[i] = v / len;
        break;
      }
    }
  }
  return f;
}

Vec3 uniform_in_ball(std::mt19937_64& rng, int dim) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (;;) {
    Vec3 x(u(rng), dim > 1 ? u(rng) : 0.0, dim > 2 ? u(rng) : 0.0);
    if (x.squaredNorm() <= 1.0) return x;
  }
}

void finish(EstimateReport& r, const McConfig& cfg) {
  r.samples = cfg.samples;
  r.seed = cfg.seed;
  r.z = r.std_error > 0.0 ? (r.estimate - r.target) / r.std_error
                          : (r.estimate == r.target ? 0.0 : std::numeric_limits<double>::infinity());
  if (cfg.max_stderr && r.std_error > *cfg.max_stderr) {
    throw ToleranceError("Monte-Carlo standard error " + std::to_string(r.std_error) + " exceeds the requested " +
                         std::to_string(*cfg.max_stderr) + "; increase the sample count");
  }
}

void check_config(const McConfig& cfg) {
  if (cfg.samples < 2) throw InputError("Monte-Carlo: need at least 2 samples");
  if (cfg.shards < 1) throw InputError("Monte-Carlo: shard count must be positive");
  if (cfg.threads < 0) throw InputError("Monte-Carlo: thread count must be nonnegative");
}

McConfig derived(const McConfig& cfg, std::uint64_t stream) {
  McConfig c = cfg;
  c.seed = cfg.seed * 0x9E3779B97F4A7C15ULL + stream;
  c.max_stderr.reset();
  return c;
}

}  // namespace

nlohmann::json EstimateReport::to_json() const {
  return {{"estimate", estimate}, {"stderr", std_error}, {"target", target}, {"z", z},
          {"N", samples},         {"seed", seed},        {"wall_time_s", wall_time_s}};
}

EstimateReport EstimateReport::from_json(const nlohmann::json& j) {
  auto num = [&](const char* key) {
    const auto& v = j.at(key);
    return v.is_null() ? std::numeric_limits<double>::quiet_NaN() : v.get<double>();
  };
  try {
    EstimateReport r;
    r.estimate = num("estimate");
    r.std_error = num("stderr");
    r.target = num("target");
    r.z = num("z");
    r.samples = j.at("N").get<long>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.wall_time_s = num("wall_time_s");
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("estimate report: ") + e.what());
  }
}

McMoments monte_carlo(int width, const SampleFn& sample, const McConfig& cfg) {
  check_config(cfg);
  if (width < 1) throw InputError("Monte-Carlo: sample width must be positive");
  const int shards = static_cast<int>(std::min<long>(cfg.shards, cfg.samples));
  struct Acc {
    std::vector<double> sum, sq;
    long count = 0;
  };
  std::vector<Acc> acc(shards);
  auto run_shard = [&](int s) {
    const long lo = cfg.samples * s / shards, hi = cfg.samples * (s + 1) / shards;
    std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed), static_cast<std::uint32_t>(cfg.seed >> 32),
                      static_cast<std::uint32_t>(s)};
    std::mt19937_64 rng(seq);
    Acc& a = acc[s];
    a.sum.assign(width, 0.0);
    a.sq.assign(width, 0.0);
    std::vector<double> out(width);
    for (long m = lo; m < hi; ++m) {
      std::fill(out.begin(), out.end(), 0.0);
      sample(rng, s, out);
      for (int w = 0; w < width; ++w) {
        a.sum[w] += out[w];
        a.sq[w] += out[w] * out[w];
      }
    }
    a.count = hi - lo;
  };
  int threads = cfg.threads > 0 ? cfg.threads : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  threads = std::min(threads, shards);
  if (threads <= 1) {
    for (int s = 0; s < shards; ++s) run_shard(s);
  } else {
    std::atomic<int> next{0};
    std::vector<std::exception_ptr> errors(threads);
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        try {
          for (int s = next++; s < shards; s = next++) run_shard(s);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }
  McMoments m;
  m.samples = cfg.samples;
  m.mean.assign(width, 0.0);
  m.std_error.assign(width, 0.0);
  std::vector<double> sum(width, 0.0), sq(width, 0.0);
  for (const Acc& a : acc) {
    for (int w = 0; w < width; ++w) {
      sum[w] += a.sum[w];
      sq[w] += a.sq[w];
    }
  }
  const double N = static_cast<double>(cfg.samples);
  for (int w = 0; w < width; ++w) {
    m.mean[w] = sum[w] / N;
    const double var = std::max(0.0, (sq[w] - N * m.mean[w] * m.mean[w]) / (N - 1.0));
    m.std_error[w] = std::sqrt(var / N);
  }
  return m;
}

Mat3 random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  for (;;) {
    Eigen::Quaterniond q(g(rng), g(rng), g(rng), g(rng));
    const double len = q.norm();
    if (len > 1e-8) {
      q.coeffs() /= len;
      return q.toRotationMatrix();
    }
  }
}

PlaneSampler::PlaneSampler(int codim, const Vec3& center, double radius)
    : codim_(codim), center_(center), radius_(radius) {
  if (codim < 0 || codim > 3) throw InputError("PlaneSampler: codimension must be in 0..3");
  if (!(radius > 0.0) || !std::isfinite(radius)) throw InputError("PlaneSampler: radius must be positive");
}

PlaneSampler PlaneSampler::enclosing(const Polytope& P, int codim) {
  if (P.empty()) throw InputError("PlaneSampler: empty body");
  const Vec3 c = P.vertex_centroid();
  return PlaneSampler(codim, c, std::max(P.circumradius(c), 1e-12) * (1.0 + 1e-9));
}

double PlaneSampler::total_measure() const {
  return binomial(3, codim_) * kappa(3) / kappa(3 - codim_) * std::pow(radius_, codim_);
}

Polytope PlaneSampler::section(const Polytope& P, std::mt19937_64& rng) const {
  switch (codim_) {
    case 0:
      return P;
    case 1: {
      const auto f = random_frame(rng);
      std::uniform_real_distribution<double> u(-radius_, radius_);
      return intersect(P, Hyperplane{f[0], f[0].dot(center_) + u(rng)});
    }
    case 2: {
      const auto f = random_frame(rng);
      const Vec3 o = radius_ * uniform_in_ball(rng, 2);
      return intersect(P, Line{center_ + o.x() * f[1] + o.y() * f[2], f[0]});
    }
    default: {
      const Vec3 x = center_ + radius_ * uniform_in_ball(rng, 3);
      if (P.dimension() < 3) return Polytope();
      for (const Facet& fc : P.facets()) {
        if (fc.normal.dot(x) > fc.offset) return Polytope();
      }
      const Vec3 pts[] = {x};
      return Polytope::from_points(pts);
    }
  }
}

EstimateReport crofton_integral(const Polytope& P, int codim, const std::function<double(const Polytope&)>& phi,
                                const McConfig& cfg) {
  check_config(cfg);
  const auto t0 = Clock::now();
  EstimateReport r;
  r.target = std::numeric_limits<double>::quiet_NaN();
  if (P.empty()) {
    r.samples = cfg.samples;
    r.seed = cfg.seed;
    return r;
  }
  if (codim == 0) {
    r.estimate = phi(P);
  } else {
    const PlaneSampler S = PlaneSampler::enclosing(P, codim);
    const McMoments m = monte_carlo(
        1, [&](std::mt19937_64& rng, int, std::span<double> out) { out[0] = phi(S.section(P, rng)); }, cfg);
    r.estimate = S.total_measure() * m.mean[0];
    r.std_error = S.total_measure() * m.std_error[0];
  }
  r.wall_time_s = seconds_since(t0);
  r.samples = cfg.samples;
  r.seed = cfg.seed;
  return r;
}

EstimateReport crofton_intrinsic(const Polytope& P, int i, int j, const McConfig& cfg) {
  if (i < 1 || i > 3 || j < 0 || i + j > 3) {
    throw DomainError("crofton_intrinsic: need 1 <= i, 0 <= j, i + j <= 3");
  }
  EstimateReport r = crofton_integral(P, i, [j](const Polytope& Q) { return intrinsic_volumes(Q)[j]; }, cfg);
  r.target = flag_coefficient(i + j, j) * intrinsic_volumes(P)[i + j];
  finish(r, cfg);
  return r;
}

MotionWindow default_window(const Polytope& K, const Polytope& L) {
  if (K.empty() || L.empty()) throw InputError("kinematic: bodies must be nonempty");
  const Vec3 cK = K.vertex_centroid(), cL = L.vertex_centroid();
  const double r = K.circumradius(cK) + L.circumradius(cL);
  // gL = R(L - cL) + t' meets K only if |t' - cK| <= r
  return {cK, 2.0 * r * 1.05};
}

EstimateReport kinematic_integral(const Polytope& K, const Polytope& L,
                                  const std::function<double(const Polytope&)>& phi, const McConfig& cfg,
                                  std::optional<double> window) {
  check_config(cfg);
  if (L.dimension() != 3) throw InputError("kinematic: moving body must be full-dimensional");
  const auto t0 = Clock::now();
  MotionWindow W = default_window(K, L);
  if (window) {
    if (!(*window > 0.0)) throw InputError("kinematic: window must be positive");
    W.side = *window;
  }
  const Vec3 cL = L.vertex_centroid();
  const Polytope L0 = L.transformed(Mat3::Identity(), -cL);
  const double half = 0.5 * W.side, shell = 0.98 * half;
  std::vector<long> boundary_hits(std::max(1, cfg.shards), 0);
  const McMoments m = monte_carlo(
      1,
      [&](std::mt19937_64& rng, int shard, std::span<double> out) {
        const Mat3 R = random_rotation(rng);
        std::uniform_real_distribution<double> u(-half, half);
        const Vec3 d(u(rng), u(rng), u(rng));
        const Polytope X = intersect(K, L0.transformed(R, W.center + d));
        if (X.empty()) return;
        if (d.cwiseAbs().maxCoeff() > shell) ++boundary_hits[shard];
        out[0] = phi(X);
      },
      cfg);
  long hits = 0;
  for (long h : boundary_hits) hits += h;
  if (hits > 0) {
    throw DomainError("kinematic: translation window too small (" + std::to_string(hits) +
                      " intersections near the boundary)");
  }
  const double vol = std::pow(W.side, 3);
  EstimateReport r;
  r.estimate = vol * m.mean[0];
  r.std_error = vol * m.std_error[0];
  r.target = std::numeric_limits<double>::quiet_NaN();
  r.samples = cfg.samples;
  r.seed = cfg.seed;
  r.wall_time_s = seconds_since(t0);
  return r;
}

nlohmann::json HadwigerReport::to_json() const {
  nlohmann::json t = nlohmann::json::array();
  for (const auto& x : terms) t.push_back(x.to_json());
  return {{"estimate", estimate}, {"stderr", std_error}, {"terms", t}};
}

HadwigerReport hadwiger_sum(const Polytope& K, const Polytope& L, const std::function<double(const Polytope&)>& phi,
                            const McConfig& cfg) {
  const auto VL = intrinsic_volumes(L);
  HadwigerReport h;
  double var = 0.0;
  for (int i = 0; i <= 3; ++i) {
    EstimateReport t = crofton_integral(K, i, phi, derived(cfg, 1 + i));
    const double c = VL[3 - i] / flag_coefficient(3, i);
    t.estimate *= c;
    t.std_error *= c;
    h.estimate += t.estimate;
    var += t.std_error * t.std_error;
    h.terms.push_back(t);
  }
  h.std_error = std::sqrt(var);
  return h;
}

nlohmann::json KinematicCheck::to_json() const {
  return {{"direct", direct.to_json()}, {"hadwiger", hadwiger.to_json()}, {"z_consistency", z_consistency}};
}

double kinematic_target(const Polytope& K, const Polytope& L, int j) {
  if (j < 0 || j > 3) throw DomainError("kinematic: degree must be in 0..3");
  const auto VK = intrinsic_volumes(K), VL = intrinsic_volumes(L);
  double s = 0.0;
  for (int i = 0; i <= 3 - j; ++i) s += flag_coefficient(i + j, j) / flag_coefficient(3, i) * VK[i + j] * VL[3 - i];
  return s;
}

namespace {

KinematicCheck assemble(const Polytope& K, const Polytope& L, const std::function<double(const Polytope&)>& phi,
                        double target, const McConfig& cfg) {
  KinematicCheck c;
  c.direct = kinematic_integral(K, L, phi, cfg);
  c.direct.target = target;
  c.hadwiger = hadwiger_sum(K, L, phi, cfg);
  const double se = std::hypot(c.direct.std_error, c.hadwiger.std_error);
  c.z_consistency = se > 0.0 ? (c.direct.estimate - c.hadwiger.estimate) / se : 0.0;
  finish(c.direct, cfg);
  return c;
}

}  // namespace

KinematicCheck kinematic_check(const Polytope& K, const Polytope& L, int j, const McConfig& cfg) {
  return assemble(K, L, [j](const Polytope& X) { return intrinsic_volumes(X)[j]; }, kinematic_target(K, L, j), cfg);
}

KinematicCheck kinematic_valuation_check(const Polytope& K, const Polytope& L, const MinkowskiValuationSpec& spec,
                                         const Vec3& u, const McConfig& cfg) {
  spec.validate(false);
  const Vec3 dir[] = {u};
  auto phi = [&](const Polytope& X) { return evaluate(spec, X, dir).values[0]; };
  KinematicCheck c = assemble(K, L, phi, std::numeric_limits<double>::quiet_NaN(), cfg);
  // the analytic side is the Hadwiger sum itself
  c.direct.target = c.hadwiger.estimate;
  c.direct.z = c.z_consistency;
  return c;
}

MultiplierSequence crofton_minkowski_multipliers(int n, int i, int j, const ZonalObject& mu) {
  if (mu.dimension() != n) throw InputError("crofton_minkowski: dimension mismatch");
  if (j < 1 || j > n - 2 || i < 0 || i > n - j - 1) {
    throw DomainError("crofton_minkowski: need 1 <= j <= n-2 and 0 <= i <= n-j-1");
  }
  const ZonalObject g = ZonalObject::berg(n, n - i - j + 1, mu.kmax());
  const ZonalObject kernel = box_j(g, n - j + 1);
  const MultiplierSequence m = mu.multipliers() * kernel.multipliers();
  if (i == 0) return m;
  return m.scaled(crofton_minkowski_constant(n, i, j));
}

nlohmann::json CroftonMvReport::to_json() const {
  nlohmann::json r = nlohmann::json::array();
  for (const auto& x : rows) {
    r.push_back({{"k", x.k}, {"lhs", x.lhs}, {"rhs", x.rhs}, {"stderr", x.std_error},
                 {"berg_error", x.berg_error}, {"pass", x.pass}});
  }
  return {{"axis", {axis.x(), axis.y(), axis.z()}}, {"N", samples}, {"seed", seed}, {"wall_time_s", wall_time_s},
          {"rows", r}};
}

std::string CroftonMvReport::to_csv() const {
  std::ostringstream os;
  os.precision(17);
  os << "k,lhs,rhs,stderr\n";
  for (const auto& x : rows) os << x.k << ',' << x.lhs << ',' << x.rhs << ',' << x.std_error << '\n';
  return os.str();
}

CroftonMvReport crofton_minkowski(const Polytope& P, const ZonalObject& mu, int kmax, const Vec3& axis,
                                  const McConfig& cfg) {
  if (mu.dimension() != 3) throw InputError("crofton_minkowski: the geometric path needs n = 3");
  if (kmax < 0 || kmax > mu.kmax()) throw DomainError("crofton_minkowski: kmax outside the datum's range");
  if (P.dimension() != 3) throw InputError("crofton_minkowski: body must be full-dimensional");
  const double len = axis.norm();
  if (!(len > 0.0)) throw InputError("crofton_minkowski: axis must be nonzero");
  const auto t0 = Clock::now();
  CroftonMvReport rep;
  rep.axis = axis / len;
  rep.samples = cfg.samples;
  rep.seed = cfg.seed;
  const Vec3 e = rep.axis;
  const MultiplierSequence& a = mu.multipliers();

  // pairing of a measure with P_k(. e) for all k at once
  const LegendreTable T(3, kmax);
  auto pairings = [&](const AreaMeasure& S, std::span<double> out) {
    for (int k = 0; k <= kmax; ++k) {
      if (a[k] == 0.0) continue;
      out[k] = a[k] * integrate(S, [&](const Vec3& u) { return T.value(k, std::clamp(u.dot(e), -1.0, 1.0)); }, 1e-11)
                          .value;
    }
  };

  const PlaneSampler S = PlaneSampler::enclosing(P, 1);
  const McMoments m = monte_carlo(
      kmax + 1,
      [&](std::mt19937_64& rng, int, std::span<double> out) {
        const Polytope X = S.section(P, rng);
        if (X.empty()) return;
        pairings(area_measure(X, 1), out);
      },
      cfg);

  const MultiplierSequence rhs_mult = crofton_minkowski_multipliers(3, 1, 1, mu);
  const AreaMeasure S2 = area_measure(P, 2);
  for (int k = 0; k <= kmax; ++k) {
    CroftonDegreeRow row;
    row.k = k;
    row.lhs = S.total_measure() * m.mean[k];
    row.std_error = S.total_measure() * m.std_error[k];
    const double moment =
        integrate(S2, [&](const Vec3& u) { return T.value(k, std::clamp(u.dot(e), -1.0, 1.0)); }).value;
    row.rhs = rhs_mult[k] * moment;
    row.berg_error = rhs_mult.error(k) * std::abs(moment);
    row.pass = std::abs(row.lhs - row.rhs) <= 3.0 * row.std_error + row.berg_error + 1e-12;
    rep.rows.push_back(row);
  }
  rep.wall_time_s = seconds_since(t0);
  return rep;
}

nlohmann::json GeometricConstants::to_json() const {
  nlohmann::json j{{"n", n}, {"kappa", kappa}, {"omega_n", omega_n}};
  if (flag) j["flag"] = *flag;
  if (q_section) j["q_section"] = *q_section;
  if (c_k) j["c_k"] = *c_k;
  if (q_crofton) j["q_crofton"] = *q_crofton;
  return j;
}

GeometricConstants geometric_constants(int n, int i, int j, int k) {
  if (n < 2) throw DomainError("constants: n must be >= 2");
  GeometricConstants g;
  g.n = n;
  for (int p = 0; p <= n; ++p) g.kappa.push_back(kappa(p));
  g.omega_n = omega(n);
  if (i >= 0 && j >= 0 && i + j <= n) g.flag = flag_coefficient(i + j, j);
  if (j >= 2 && j <= n) g.q_section = mean_section_constant(n, j);
  if (k >= 1 && k <= n - 2) g.c_k = crofton_factor(n, k);
  if (j >= 1 && j <= n - 2 && i >= 1 && i <= n - j - 1) g.q_crofton = crofton_minkowski_constant(n, i, j);
  if (!g.flag && !g.q_section && !g.c_k && !g.q_crofton) {
    throw DomainError("constants: no constant is defined for these indices");
  }
  return g;
}

}  // namespace minkval
