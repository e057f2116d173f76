#include "minkval/valuation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "minkval/constants.hpp"
#include "minkval/error.hpp"

namespace minkval {

namespace {

constexpr double kCenterTol = 1e-9;

ZonalObject add_optional(const std::optional<ZonalObject>& a, const ZonalObject& b) {
  return a ? a->plus(b) : b;
}

void check_datum(const ZonalObject& z, int n, const std::string& name) {
  if (z.dimension() != n) throw InputError(name + ": dimension " + std::to_string(z.dimension()) + " differs from n");
  const double scale = std::max(1.0, std::abs(z.multipliers()[0]));
  if (!z.centered(kCenterTol * scale)) throw InputError(name + ": datum is not centered (a_1 != 0)");
}

// Each datum paired with the area measure degree it acts on.
std::vector<std::pair<int, const ZonalObject*>> data_by_degree(const MinkowskiValuationSpec& spec) {
  std::vector<std::pair<int, const ZonalObject*>> out;
  for (std::size_t i = 0; i < spec.mu.size(); ++i) {
    if (spec.mu[i]) out.emplace_back(static_cast<int>(i) + 1, &*spec.mu[i]);
  }
  if (spec.f_top) out.emplace_back(spec.n - 1, &*spec.f_top);
  return out;
}

void require_three(const MinkowskiValuationSpec& spec) {
  if (spec.n != 3) throw InputError("evaluation is implemented for n = 3 only, got n = " + std::to_string(spec.n));
}

SupportFunctionResult start_result(std::span<const Vec3> directions, const char* path) {
  SupportFunctionResult r;
  r.path = path;
  r.directions.reserve(directions.size());
  for (const Vec3& u : directions) {
    const double len = u.norm();
    if (!(len > 0.0) || !std::isfinite(len)) throw InputError("evaluate: direction must be a nonzero finite vector");
    r.directions.push_back(u / len);
  }
  r.values.assign(directions.size(), 0.0);
  r.errors.assign(directions.size(), 0.0);
  return r;
}

void add_constant_terms(const MinkowskiValuationSpec& spec, const BodyMeasures& body, SupportFunctionResult& r) {
  for (std::size_t d = 0; d < r.values.size(); ++d) r.values[d] += spec.c0 + spec.cn * body.volume;
}

}  // namespace

MinkowskiValuationSpec MinkowskiValuationSpec::empty(int n) {
  if (n < 3) throw InputError("valuation spec: n must be >= 3");
  MinkowskiValuationSpec s;
  s.n = n;
  s.mu.assign(n - 2, std::nullopt);
  return s;
}

void MinkowskiValuationSpec::validate(bool check_signs) const {
  if (n < 3) throw InputError("valuation spec: n must be >= 3");
  if (static_cast<int>(mu.size()) != n - 2) {
    throw InputError("valuation spec: expected " + std::to_string(n - 2) + " entries in mu");
  }
  if (!std::isfinite(c0) || !std::isfinite(cn)) throw InputError("valuation spec: c0 and cn must be finite");
  if (check_signs && c0 < 0.0) throw InputError("valuation spec: c0 must be nonnegative");
  if (check_signs && cn < 0.0) throw InputError("valuation spec: cn must be nonnegative");
  for (std::size_t i = 0; i < mu.size(); ++i) {
    if (mu[i]) check_datum(*mu[i], n, "mu_" + std::to_string(i + 1));
  }
  if (f_top) check_datum(*f_top, n, "f_top");
}

int MinkowskiValuationSpec::kmax() const {
  int k = -1;
  for (const auto& m : mu) {
    if (m) k = k < 0 ? m->kmax() : std::min(k, m->kmax());
  }
  if (f_top) k = k < 0 ? f_top->kmax() : std::min(k, f_top->kmax());
  return k < 0 ? kDefaultKmax : k;
}

nlohmann::json MinkowskiValuationSpec::to_json() const {
  nlohmann::json j;
  j["n"] = n;
  j["c0"] = c0;
  nlohmann::json m = nlohmann::json::array();
  for (const auto& x : mu) m.push_back(x ? x->to_json() : nlohmann::json(nullptr));
  j["mu"] = m;
  j["f_top"] = f_top ? f_top->to_json() : nlohmann::json(nullptr);
  j["cn"] = cn;
  return j;
}

MinkowskiValuationSpec MinkowskiValuationSpec::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw InputError("valuation spec: expected a JSON object");
  try {
    const int n = j.value("n", 3);
    if (j.contains("builtin")) {
      return builtin_spec(j.at("builtin").get<std::string>(), n, j.value("kmax", kDefaultKmax));
    }
    MinkowskiValuationSpec s = empty(n);
    s.c0 = j.value("c0", 0.0);
    s.cn = j.value("cn", 0.0);
    if (j.contains("mu") && !j.at("mu").is_null()) {
      const auto& m = j.at("mu");
      if (!m.is_array() || static_cast<int>(m.size()) != n - 2) {
        throw InputError("valuation spec: mu must be an array of " + std::to_string(n - 2) + " entries");
      }
      for (int i = 0; i < n - 2; ++i) {
        if (!m[i].is_null()) s.mu[i] = ZonalObject::from_json(m[i]);
      }
    }
    if (j.contains("f_top") && !j.at("f_top").is_null()) s.f_top = ZonalObject::from_json(j.at("f_top"));
    s.validate();
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("valuation spec: ") + e.what());
  }
}

MinkowskiValuationSpec builtin_spec(std::string_view name, int n, int kmax) {
  MinkowskiValuationSpec s = MinkowskiValuationSpec::empty(n);
  if (name == "projection_body") {
    s.f_top = ZonalObject::abs_half(n, kmax);
  } else if (name == "difference_body") {
    // h(DK) = h(K) + h(-K) = S_1 * (delta + delta_antipode) * g_n
    MultiplierSequence g = ZonalObject::berg(n, n, kmax).multipliers();
    std::vector<Rational> sym(kmax + 1);
    for (int k = 0; k <= kmax; ++k) sym[k] = Rational(k % 2 ? 0 : 2);
    s.mu[0] = ZonalObject::from_multipliers(g * MultiplierSequence::exact(n, sym));
  } else if (name == "mean_width_ball") {
    s.mu[0] = ZonalObject::constant(n, 1.0 / kappa(n - 1), kmax);
  } else if (name.starts_with("mean_section:")) {
    int j = 0;
    try {
      j = std::stoi(std::string(name.substr(13)));
    } catch (const std::exception&) {
      throw InputError("builtin spec: bad index in '" + std::string(name) + "'");
    }
    return mean_section_spec(n, j, kmax);
  } else {
    throw InputError("unknown builtin valuation '" + std::string(name) + "'");
  }
  return s;
}

nlohmann::json SupportFunctionResult::to_json() const {
  nlohmann::json j;
  j["path"] = path;
  if (band >= 0) {
    j["band"] = band;
    j["tail_l2"] = tail_l2;
  }
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < values.size(); ++i) {
    const Vec3& u = directions[i];
    rows.push_back({{"u", {u.x(), u.y(), u.z()}}, {"h", values[i]}, {"error", errors[i]}});
  }
  j["values"] = rows;
  return j;
}

SupportFunctionResult evaluate(const MinkowskiValuationSpec& spec, const BodyMeasures& body,
                               std::span<const Vec3> directions) {
  spec.validate(false);
  require_three(spec);
  SupportFunctionResult r = start_result(directions, "pointwise");
  if (body.empty) return r;
  for (const auto& [deg, z] : data_by_degree(spec)) {
    if (z->has_atoms()) throw DomainError("pointwise evaluation: datum of degree " + std::to_string(deg) + " has atoms");
    if (!z->pointwise()) {
      throw DomainError("pointwise evaluation: datum of degree " + std::to_string(deg) + " has no continuous density");
    }
    const AreaMeasure& S = body.S[deg];
    const double bound = z->density_error_bound() * S.total_mass();
    for (std::size_t d = 0; d < r.values.size(); ++d) {
      const Vec3 v = r.directions[d];
      const Estimate e = integrate(S, [&](const Vec3& u) { return z->density(std::clamp(u.dot(v), -1.0, 1.0)); });
      r.values[d] += e.value;
      r.errors[d] += e.error + bound;
    }
  }
  add_constant_terms(spec, body, r);
  return r;
}

SupportFunctionResult evaluate(const MinkowskiValuationSpec& spec, const Polytope& P,
                               std::span<const Vec3> directions) {
  return evaluate(spec, body_measures(P), directions);
}

SupportFunctionResult evaluate_spectral(const MinkowskiValuationSpec& spec, const BodyMeasures& body,
                                        std::span<const Vec3> directions, int band) {
  spec.validate(false);
  require_three(spec);
  if (band < 0) throw InputError("spectral evaluation: band must be nonnegative");
  if (band > spec.kmax()) {
    throw DomainError("spectral evaluation: band " + std::to_string(band) + " exceeds kmax " +
                      std::to_string(spec.kmax()));
  }
  SupportFunctionResult r = start_result(directions, "spectral");
  r.band = band;
  const auto data = data_by_degree(spec);
  for (const auto& [deg, z] : data) {
    const double t = z->multipliers().tail_l2(band + 1), d = z->discarded_tail_l2();
    r.tail_l2 += std::sqrt(t * t + d * d);
  }
  if (body.empty) return r;
  const int n = spec.n;
  for (const auto& [deg, z] : data) {
    std::vector<double> c(band + 1);
    double mult_err = 0.0;
    for (int k = 0; k <= band; ++k) {
      const double w = harmonic_dimension(n, k) / omega(n);
      c[k] = w * z->multipliers()[k];
      mult_err += w * z->multipliers().error(k);
    }
    const AreaMeasure& S = body.S[deg];
    const double bound = mult_err * S.total_mass();
    for (std::size_t d = 0; d < r.values.size(); ++d) {
      const Vec3 v = r.directions[d];
      const Estimate e =
          integrate(S, [&](const Vec3& u) { return legendre_series(n, c, std::clamp(u.dot(v), -1.0, 1.0)); });
      r.values[d] += e.value;
      r.errors[d] += e.error + bound;
    }
  }
  add_constant_terms(spec, body, r);
  return r;
}

SupportFunctionResult evaluate_spectral(const MinkowskiValuationSpec& spec, const Polytope& P,
                                        std::span<const Vec3> directions, int band) {
  return evaluate_spectral(spec, body_measures(P), directions, band);
}

MinkowskiValuationSpec lambda_derivative(const MinkowskiValuationSpec& spec) {
  spec.validate(false);
  const int n = spec.n;
  MinkowskiValuationSpec out = MinkowskiValuationSpec::empty(n);
  // S_i(K + tB) = sum_j C(i,j) t^{i-j} S_j(K), so d/dt S_i = i S_{i-1}.
  if (spec.mu[0]) out.c0 = spec.mu[0]->multipliers()[0];
  for (int i = 2; i <= n - 2; ++i) {
    if (spec.mu[i - 1]) out.mu[i - 2] = add_optional(out.mu[i - 2], spec.mu[i - 1]->scaled(i));
  }
  if (spec.f_top) {
    if (n - 2 >= 1) {
      out.mu[n - 3] = add_optional(out.mu[n - 3], spec.f_top->scaled(n - 1));
    }
  }
  // d/dt V_n(K + tB) = S_{n-1}(K, S^{n-1})
  if (spec.cn != 0.0) out.f_top = ZonalObject::constant(n, spec.cn, spec.kmax());
  return out;
}

MultiplierSequence degree1_multipliers(const MinkowskiValuationSpec& spec) {
  spec.validate(false);
  const int kmax = spec.kmax();
  const MultiplierSequence box = box_multipliers(spec.n, kmax);
  if (!spec.mu[0]) return box.scaled(0.0);
  return spec.mu[0]->multipliers().truncated(kmax) * box;
}

MinkowskiValuationSpec mean_section_spec(int n, int j, int kmax) {
  if (n < 3) throw InputError("mean section: n must be >= 3");
  if (j < 2 || j > n) throw DomainError("mean section: need 2 <= j <= n, got j = " + std::to_string(j));
  MinkowskiValuationSpec s = MinkowskiValuationSpec::empty(n);
  const ZonalObject datum = ZonalObject::berg(n, j, kmax).scaled(mean_section_constant(n, j));
  const int degree = n + 1 - j;
  if (degree == n - 1) {
    s.f_top = datum;
  } else {
    s.mu[degree - 1] = datum;
  }
  return s;
}

double poincare_pair(const ZonalObject& h, const ZonalObject& f, int i) {
  const int n = h.dimension();
  if (f.dimension() != n) throw InputError("poincare_pair: dimension mismatch");
  if (i < 1 || i > n - 1) throw DomainError("poincare_pair: need 1 <= i <= n-1");
  const ZonalProfile hp = h.as_profile();
  std::function<double(double)> box_f_reflected;
  std::vector<double> kinks = hp.kinks;
  int degree = hp.polynomial_degree;
  if (f.pure_legendre()) {
    // box_n f(-t) = sum_k (-1)^k box_k c_k P_k(t)
    std::vector<double> c = f.legendre_coeffs();
    for (std::size_t k = 0; k < c.size(); ++k) {
      const double kk = static_cast<double>(k);
      c[k] *= (k % 2 ? -1.0 : 1.0) * (1.0 - kk) * (kk + n - 1.0) / (n - 1.0);
    }
    box_f_reflected = [c, n](double t) { return legendre_series(n, c, t); };
    degree = degree < 0 ? -1 : degree + static_cast<int>(c.size()) - 1;
  } else {
    const ZonalProfile fp = f.as_profile();
    if (!fp.kinks.empty() || !fp.d2f) throw DomainError("poincare_pair: f must be smooth");
    box_f_reflected = [fp, n](double t) { return fp(-t) + zonal_laplacian(fp, -t) / (n - 1); };
    degree = -1;
  }
  const double c = std::tgamma(n - i + 1.0) * std::tgamma(i + 1.0) / std::tgamma(static_cast<double>(n));
  auto g = [&](double t) { return hp(t) * box_f_reflected(t); };
  double integral = 0.0;
  if (degree >= 0) {
    const Quadrature q = gauss_jacobi(n, degree / 2 + 1);
    for (std::size_t m = 0; m < q.nodes.size(); ++m) integral += q.weights[m] * g(q.nodes[m]);
  } else {
    integral = integrate_weighted(g, n, kinks).value;
  }
  return c * omega(n - 1) * integral;
}

IdentityReport valuation_identity_check(const MinkowskiValuationSpec& spec, const Polytope& P, const Hyperplane& H,
                                        std::span<const Vec3> directions, bool spectral) {
  IdentityReport rep;
  rep.directions = static_cast<int>(directions.size());
  const double len = H.normal.norm();
  if (!(len > 0.0)) throw InputError("valuation identity: hyperplane normal must be nonzero");
  const Vec3 nu = H.normal / len;
  const double s = H.offset / len;
  const Polytope K = intersect(P, Halfspace{nu, s});
  const Polytope L = intersect(P, Halfspace{-nu, -s});
  if (P.empty() || K.dimension() < P.dimension() || L.dimension() < P.dimension()) {
    rep.degenerate = true;
    rep.note = "hyperplane does not split the body into two full-dimensional pieces";
    return rep;
  }
  const Polytope M = intersect(P, Hyperplane{nu, s});
  auto eval = [&](const Polytope& X) {
    return spectral ? evaluate_spectral(spec, X, directions, std::min(16, spec.kmax())).values
                    : evaluate(spec, X, directions).values;
  };
  const auto hK = eval(K), hL = eval(L), hP = eval(P), hM = eval(M);
  for (std::size_t d = 0; d < directions.size(); ++d) {
    rep.max_residual = std::max(rep.max_residual, std::abs(hK[d] + hL[d] - hP[d] - hM[d]));
  }
  return rep;
}

std::vector<Vec3> fibonacci_directions(int count) {
  if (count < 1) throw InputError("fibonacci_directions: count must be positive");
  std::vector<Vec3> out;
  out.reserve(count);
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < count; ++i) {
    const double z = 1.0 - (2.0 * i + 1.0) / count;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    out.emplace_back(r * std::cos(golden * i), r * std::sin(golden * i), z);
  }
  return out;
}

std::vector<Vec3> random_directions(int count, std::uint64_t seed) {
  if (count < 1) throw InputError("random_directions: count must be positive");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::vector<Vec3> out;
  out.reserve(count);
  while (static_cast<int>(out.size()) < count) {
    Vec3 v(g(rng), g(rng), g(rng));
    const double len = v.norm();
    if (len > 1e-12) out.push_back(v / len);
  }
  return out;
}

}  // namespace minkval
