#include "minkval/zonal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <string>
#include <tuple>

#include "minkval/constants.hpp"
#include "minkval/error.hpp"

namespace minkval {

// ---------------------------------------------------------------------------
// MultiplierSequence

MultiplierSequence::MultiplierSequence(int n, std::vector<double> values, std::vector<double> errors)
    : n_(n), base_(std::move(values)), factor_(base_.size(), Rational(1)), error_(std::move(errors)) {
  if (n < 2) throw InputError("MultiplierSequence: dimension must be >= 2");
  if (error_.empty()) error_.assign(base_.size(), 0.0);
  if (error_.size() != base_.size()) throw InputError("MultiplierSequence: error bar count mismatch");
}

MultiplierSequence MultiplierSequence::exact(int n, const std::vector<Rational>& values) {
  MultiplierSequence m(n, std::vector<double>(values.size(), 1.0));
  m.factor_ = values;
  return m;
}

MultiplierSequence MultiplierSequence::ones(int n, int kmax) {
  return MultiplierSequence(n, std::vector<double>(kmax + 1, 1.0));
}

void MultiplierSequence::check(int k) const {
  if (k < 0 || k > kmax()) {
    throw DomainError("multiplier degree " + std::to_string(k) + " outside 0.." + std::to_string(kmax()));
  }
}

double MultiplierSequence::operator[](int k) const {
  check(k);
  return base_[k] * static_cast<double>(factor_[k].num()) / static_cast<double>(factor_[k].den());
}

double MultiplierSequence::error(int k) const {
  check(k);
  return error_[k];
}

double MultiplierSequence::max_error() const {
  return error_.empty() ? 0.0 : *std::max_element(error_.begin(), error_.end());
}

std::optional<Rational> MultiplierSequence::exact_value(int k) const {
  check(k);
  if (error_[k] != 0.0) return std::nullopt;
  if (base_[k] == 0.0) return Rational(0);
  if (base_[k] == 1.0) return factor_[k];
  if (base_[k] == -1.0) return factor_[k].times(Rational(-1));
  return std::nullopt;
}

std::vector<double> MultiplierSequence::values() const {
  std::vector<double> v(base_.size());
  for (int k = 0; k <= kmax(); ++k) v[k] = (*this)[k];
  return v;
}

MultiplierSequence MultiplierSequence::operator*(const MultiplierSequence& o) const {
  if (n_ != o.n_) throw InputError("multiplier product: dimension mismatch");
  const int km = std::min(kmax(), o.kmax());
  MultiplierSequence r(n_, std::vector<double>(km + 1));
  for (int k = 0; k <= km; ++k) {
    r.base_[k] = base_[k] * o.base_[k];
    if (auto f = factor_[k].times(o.factor_[k])) {
      r.factor_[k] = *f;
    } else {
      r.base_[k] *= factor_[k].to_double() * o.factor_[k].to_double();
    }
    const double a = std::abs((*this)[k]), b = std::abs(o[k]);
    r.error_[k] = a * o.error_[k] + b * error_[k] + error_[k] * o.error_[k];
  }
  return r;
}

MultiplierSequence MultiplierSequence::operator+(const MultiplierSequence& o) const {
  if (n_ != o.n_) throw InputError("multiplier sum: dimension mismatch");
  const int km = std::min(kmax(), o.kmax());
  MultiplierSequence r(n_, std::vector<double>(km + 1));
  for (int k = 0; k <= km; ++k) {
    std::optional<Rational> f;
    if (base_[k] == 1.0 && o.base_[k] == 1.0) f = factor_[k].plus(o.factor_[k]);
    if (f) {
      r.base_[k] = 1.0;
      r.factor_[k] = *f;
    } else {
      r.base_[k] = (*this)[k] + o[k];
    }
    r.error_[k] = error_[k] + o.error_[k];
  }
  return r;
}

MultiplierSequence MultiplierSequence::scaled(double c) const {
  MultiplierSequence r = *this;
  for (int k = 0; k <= kmax(); ++k) {
    r.base_[k] *= c;
    r.error_[k] *= std::abs(c);
  }
  return r;
}

MultiplierSequence MultiplierSequence::truncated(int km) const {
  if (km > kmax()) throw DomainError("cannot extend multipliers beyond kmax " + std::to_string(kmax()));
  if (km < 0) throw InputError("truncation degree must be >= 0");
  MultiplierSequence r = *this;
  r.base_.resize(km + 1);
  r.factor_.resize(km + 1);
  r.error_.resize(km + 1);
  return r;
}

MultiplierSequence MultiplierSequence::alternated() const {
  MultiplierSequence r = *this;
  for (int k = 1; k <= kmax(); k += 2) r.base_[k] = -r.base_[k];
  return r;
}

MultiplierSequence MultiplierSequence::with_entry(int k, double v) const {
  check(k);
  MultiplierSequence r = *this;
  r.base_[k] = v;
  r.factor_[k] = Rational(1);
  r.error_[k] = 0.0;
  return r;
}

MultiplierSequence MultiplierSequence::divided_by(const MultiplierSequence& d, std::span<const int> skip) const {
  if (n_ != d.n_) throw InputError("multiplier quotient: dimension mismatch");
  const int km = std::min(kmax(), d.kmax());
  MultiplierSequence r(n_, std::vector<double>(km + 1));
  for (int k = 0; k <= km; ++k) {
    if (std::find(skip.begin(), skip.end(), k) != skip.end()) {
      r.base_[k] = 0.0;
      continue;
    }
    const double dv = d[k];
    if (dv == 0.0) throw DomainError("multiplier quotient: division by zero at degree " + std::to_string(k));
    r.base_[k] = base_[k] / d.base_[k];
    if (auto f = factor_[k].divided_by(d.factor_[k])) {
      r.factor_[k] = *f;
    } else {
      r.base_[k] *= factor_[k].to_double() / d.factor_[k].to_double();
    }
    r.error_[k] = error_[k] / std::abs(dv) + std::abs((*this)[k]) * d.error_[k] / (dv * dv);
  }
  return r;
}

double MultiplierSequence::tail_l2(int from) const {
  double s = 0.0;
  for (int k = std::max(from, 0); k <= kmax(); ++k) s += (*this)[k] * (*this)[k];
  return std::sqrt(s);
}

MultiplierSequence box_multipliers(int n, int kmax) {
  std::vector<Rational> v;
  for (int k = 0; k <= kmax; ++k) v.emplace_back((1 - k) * static_cast<std::int64_t>(k + n - 1), n - 1);
  return MultiplierSequence::exact(n, v);
}

// ---------------------------------------------------------------------------
// Berg functions

double BergFunction::value(double t, int order) const {
  return legendre_series(j, series, std::clamp(t, -1.0, 1.0), order);
}

double BergFunction::pointwise_error_bound() const {
  if (j != 2) return std::numeric_limits<double>::infinity();
  const double K = truncation;
  return (1.0 / K + 1.0 / (K + 1.0)) / (2.0 * std::numbers::pi) * (1.0 + 1e-9) + 1e-14;
}

namespace {

std::vector<double> berg_series(int j, int K) {
  std::vector<double> c(K + 1, 0.0);
  for (int k = 0; k <= K; ++k) {
    if (k == 1) continue;
    const double a = (j - 1.0) / ((1.0 - k) * (k + j - 1.0));
    c[k] = harmonic_dimension(j, k) / omega(j) * a;
  }
  return c;
}

std::vector<double> ambient_coefficients(int n, int kmax, const std::vector<double>& series, int j) {
  const int K = static_cast<int>(series.size()) - 1;
  Quadrature q = gauss_jacobi(n, (K + kmax) / 2 + 1);
  LegendreTable table(n, kmax);
  std::vector<double> out(kmax + 1, 0.0), p(kmax + 1);
  for (std::size_t i = 0; i < q.nodes.size(); ++i) {
    const double g = legendre_series(j, series, q.nodes[i], 0);
    table.evaluate(q.nodes[i], p);
    for (int m = 0; m <= kmax; ++m) out[m] += q.weights[i] * g * p[m];
  }
  for (double& v : out) v *= omega(n - 1);
  return out;
}

std::shared_ptr<const BergFunction> build_berg(int j, int kmax, int n, int K) {
  auto b = std::make_shared<BergFunction>();
  b->j = j;
  b->n = n;
  b->kmax = kmax;
  b->truncation = K;
  b->series = berg_series(j, K);
  std::vector<Rational> native;
  for (int k = 0; k <= kmax; ++k) {
    native.push_back(k == 1 ? Rational(0) : Rational(j - 1, (1 - k) * static_cast<std::int64_t>(k + j - 1)));
  }
  b->native = MultiplierSequence::exact(j, native);
  if (j == n) {
    b->ambient_raw = MultiplierSequence::exact(n, native);
    b->ambient = b->ambient_raw;
    return b;
  }
  std::vector<double> full = ambient_coefficients(n, kmax, b->series, j);
  std::vector<double> half = ambient_coefficients(n, kmax, berg_series(j, K / 2), j);
  std::vector<double> err(kmax + 1);
  for (int k = 0; k <= kmax; ++k) err[k] = std::abs(full[k] - half[k]) + 1e-15 * std::abs(full[k]);
  b->ambient_raw = MultiplierSequence(n, full, err);
  b->ambient = b->ambient_raw.with_entry(1, 0.0);
  return b;
}

}  // namespace

std::shared_ptr<const BergFunction> berg_function(int j, int kmax, int n, int truncation) {
  if (n < 3) throw InputError("berg_function: ambient dimension must be >= 3");
  if (j < 2 || j > n) {
    throw DomainError("berg_function: need 2 <= j <= n, got j=" + std::to_string(j) + ", n=" + std::to_string(n));
  }
  if (kmax < 1) throw InputError("berg_function: kmax must be >= 1");
  const int K = truncation > 0 ? truncation : std::max(1024, 4 * kmax);
  if (K < 2 * kmax) throw InputError("berg_function: truncation must be at least 2*kmax");
  static std::mutex mu;
  static std::map<std::tuple<int, int, int, int>, std::shared_ptr<const BergFunction>> cache;
  std::lock_guard lock(mu);
  auto& slot = cache[{j, kmax, n, K}];
  if (!slot) slot = build_berg(j, kmax, n, K);
  return slot;
}

// ---------------------------------------------------------------------------
// Analytic profiles

double AnalyticProfile::value(double t, int order) const {
  const double s = reflected ? -t : t;
  const double sign = (reflected && order % 2 == 1) ? -1.0 : 1.0;
  double v = 0.0;
  switch (kind) {
    case ProfileKind::abs_half:
      v = order == 0 ? std::abs(s) / 2 : order == 1 ? (s > 0 ? 0.5 : s < 0 ? -0.5 : 0.0) : 0.0;
      break;
    case ProfileKind::cap_bump: {
      const double d = s - cap_cos;
      if (d > 0) v = cap_norm * (order == 0 ? d * d : order == 1 ? 2 * d : 2.0);
      break;
    }
    case ProfileKind::berg:
      v = berg->value(s, order);
      break;
  }
  return scale * sign * v;
}

bool AnalyticProfile::continuous() const { return kind != ProfileKind::berg || index == 2; }

namespace {

const char* kind_name(ProfileKind k) {
  switch (k) {
    case ProfileKind::abs_half:
      return "abs_half";
    case ProfileKind::cap_bump:
      return "cap_bump";
    case ProfileKind::berg:
      return "berg";
  }
  return "";
}

MultiplierSequence profile_multipliers(const AnalyticProfile& p, int n, int kmax) {
  MultiplierSequence m;
  if (p.kind == ProfileKind::berg) {
    m = p.berg->ambient_raw.truncated(kmax);
  } else {
    ZonalProfile f;
    f.dim = n;
    AnalyticProfile unit = p;
    unit.scale = 1.0;
    unit.reflected = false;
    f.f = [unit](double t) { return unit.value(t); };
    f.kinks = {p.kind == ProfileKind::abs_half ? 0.0 : p.cap_cos};
    std::vector<double> v(kmax + 1), e(kmax + 1);
    for (int k = 0; k <= kmax; ++k) {
      Estimate est = zonal_coefficient(f, k, 1e-13);
      v[k] = est.value;
      e[k] = est.error;
    }
    m = MultiplierSequence(n, v, e);
  }
  if (p.reflected) m = m.alternated();
  return p.scale == 1.0 ? m : m.scaled(p.scale);
}

AnalyticProfile make_cap(int n, int j) {
  if (j < 1) throw InputError("approx_identity: index must be >= 1");
  AnalyticProfile p;
  p.kind = ProfileKind::cap_bump;
  p.index = j;
  p.cap_cos = std::cos(1.0 / j);
  const double c = p.cap_cos;
  std::vector<double> kinks{c};
  Estimate mass = integrate_weighted([c](double t) { return t > c ? (t - c) * (t - c) : 0.0; }, n, kinks, 1e-14);
  p.cap_norm = 1.0 / (omega(n - 1) * mass.value);
  return p;
}

}  // namespace

// ---------------------------------------------------------------------------
// ZonalObject

void ZonalObject::rebuild_multipliers(int kmax) {
  if (kmax < 0) throw InputError("kmax must be >= 0");
  std::optional<MultiplierSequence> acc;
  auto add = [&](const MultiplierSequence& m) { acc = acc ? *acc + m : m; };
  for (const AnalyticProfile& p : profiles_) add(profile_multipliers(p, n_, kmax));
  bool any_legendre = std::any_of(legendre_.begin(), legendre_.end(), [](double c) { return c != 0.0; });
  if (any_legendre) {
    std::vector<double> v(kmax + 1, 0.0);
    for (int k = 0; k <= kmax && k < static_cast<int>(legendre_.size()); ++k) {
      v[k] = legendre_[k] * omega(n_) / harmonic_dimension(n_, k);
    }
    add(MultiplierSequence(n_, v));
  }
  if (atoms_.size() == 1 && atoms_[0].t == 1.0 && atoms_[0].mass == 1.0) {
    add(MultiplierSequence::ones(n_, kmax));
  } else if (!atoms_.empty()) {
    LegendreTable table(n_, kmax);
    std::vector<double> v(kmax + 1, 0.0), p(kmax + 1);
    for (const PointMass& a : atoms_) {
      table.evaluate(std::clamp(a.t, -1.0, 1.0), p);
      for (int k = 0; k <= kmax; ++k) v[k] += a.mass * p[k];
    }
    add(MultiplierSequence(n_, v));
  }
  mult_ = acc ? *acc : MultiplierSequence(n_, std::vector<double>(kmax + 1, 0.0));
}

ZonalObject ZonalObject::dirac_pole(int n, int kmax) { return from_atoms(n, {{1.0, 1.0}}, kmax); }

ZonalObject ZonalObject::from_atoms(int n, std::vector<PointMass> atoms, int kmax) {
  AmbientDim{n};
  for (const PointMass& a : atoms) {
    if (!(std::abs(a.t) <= 1.0)) throw InputError("atom position must lie in [-1,1]");
    if (!std::isfinite(a.mass)) throw InputError("atom mass must be finite");
  }
  ZonalObject z;
  z.n_ = n;
  z.atoms_ = std::move(atoms);
  z.rebuild_multipliers(kmax);
  return z;
}

ZonalObject ZonalObject::legendre_density(int n, std::vector<double> coeffs, int kmax) {
  AmbientDim{n};
  for (double c : coeffs) {
    if (!std::isfinite(c)) throw InputError("Legendre coefficients must be finite");
  }
  ZonalObject z;
  z.n_ = n;
  z.legendre_ = std::move(coeffs);
  z.rebuild_multipliers(kmax);
  return z;
}

ZonalObject ZonalObject::constant(int n, double c, int kmax) { return legendre_density(n, {c}, kmax); }

ZonalObject ZonalObject::abs_half(int n, int kmax) {
  AmbientDim{n};
  ZonalObject z;
  z.n_ = n;
  z.profiles_.push_back(AnalyticProfile{});
  z.rebuild_multipliers(kmax);
  return z;
}

ZonalObject ZonalObject::equator(int n, int kmax) { return from_atoms(n, {{0.0, omega(n - 1)}}, kmax); }

ZonalObject ZonalObject::approx_identity(int n, int j, int kmax) {
  AmbientDim{n};
  ZonalObject z;
  z.n_ = n;
  z.profiles_.push_back(make_cap(n, j));
  z.rebuild_multipliers(kmax);
  return z;
}

ZonalObject ZonalObject::berg(int n, int j, int kmax, int truncation) {
  AmbientDim{n};
  auto b = berg_function(j, std::max(kmax, 1), n, truncation);
  AnalyticProfile p;
  p.kind = ProfileKind::berg;
  p.index = j;
  p.berg = b;
  ZonalObject z;
  z.n_ = n;
  z.profiles_.push_back(p);
  const double raw_a1 = b->ambient_raw[1];
  if (raw_a1 != 0.0) z.legendre_ = {0.0, -harmonic_dimension(n, 1) / omega(n) * raw_a1};
  z.rebuild_multipliers(kmax);
  z.mult_ = z.mult_.with_entry(1, 0.0);
  return z;
}

ZonalObject ZonalObject::from_multipliers(MultiplierSequence m) {
  ZonalObject z;
  z.n_ = m.dimension();
  AmbientDim{z.n_};
  z.structural_ = false;
  z.mult_ = std::move(m);
  return z;
}

bool ZonalObject::is_identity() const {
  return structural_ && profiles_.empty() && atoms_.size() == 1 && atoms_[0].t == 1.0 &&
         atoms_[0].mass == 1.0 && std::all_of(legendre_.begin(), legendre_.end(), [](double c) { return c == 0.0; });
}

bool ZonalObject::pointwise() const {
  return structural_ && atoms_.empty() &&
         std::all_of(profiles_.begin(), profiles_.end(), [](const AnalyticProfile& p) { return p.continuous(); });
}

double ZonalObject::density(double t, int order) const {
  if (!structural_) throw DomainError("zonal object is multiplier-only; no pointwise density");
  if (!atoms_.empty()) throw DomainError("zonal object has atoms; no pointwise density");
  if (!(std::abs(t) <= 1.0 + 1e-12)) throw DomainError("density argument outside [-1,1]");
  t = std::clamp(t, -1.0, 1.0);
  double v = legendre_series(n_, legendre_, t, order);
  for (const AnalyticProfile& p : profiles_) {
    if (!p.continuous()) throw DomainError("Berg function g_j with j >= 3 is unbounded at the pole");
    v += p.value(t, order);
  }
  return v;
}

ZonalProfile ZonalObject::as_profile() const {
  if (!pointwise()) throw DomainError("zonal object has no continuous density");
  auto self = std::make_shared<const ZonalObject>(*this);
  ZonalProfile f;
  f.dim = n_;
  f.f = [self](double t) { return self->density(t, 0); };
  f.df = [self](double t) { return self->density(t, 1); };
  f.d2f = [self](double t) { return self->density(t, 2); };
  for (const AnalyticProfile& p : profiles_) {
    if (p.kind == ProfileKind::abs_half) f.kinks.push_back(0.0);
    if (p.kind == ProfileKind::cap_bump) f.kinks.push_back(p.reflected ? -p.cap_cos : p.cap_cos);
  }
  f.polynomial_degree = profiles_.empty() ? std::max<int>(0, legendre_.size() - 1) : -1;
  return f;
}

double ZonalObject::density_error_bound() const {
  double e = 0.0;
  for (const AnalyticProfile& p : profiles_) {
    if (p.kind == ProfileKind::berg) e += std::abs(p.scale) * p.berg->pointwise_error_bound();
  }
  return e;
}

bool ZonalObject::centered(double tol) const {
  if (kmax() < 1) return true;
  return std::abs(mult_[1]) <= tol * std::max(1.0, std::abs(mult_[0]));
}

ZonalObject ZonalObject::centered_part() const {
  ZonalObject z = *this;
  if (kmax() < 1) return z;
  const double a1 = mult_[1];
  if (a1 == 0.0) return z;
  if (structural_) {
    if (z.legendre_.size() < 2) z.legendre_.resize(2, 0.0);
    z.legendre_[1] -= harmonic_dimension(n_, 1) / omega(n_) * a1;
  }
  z.mult_ = mult_.with_entry(1, 0.0);
  return z;
}

ZonalObject ZonalObject::reflected() const {
  ZonalObject z = *this;
  for (PointMass& a : z.atoms_) a.t = -a.t;
  for (std::size_t k = 1; k < z.legendre_.size(); k += 2) z.legendre_[k] = -z.legendre_[k];
  for (AnalyticProfile& p : z.profiles_) p.reflected = !p.reflected;
  z.mult_ = mult_.alternated();
  return z;
}

ZonalObject ZonalObject::scaled(double c) const {
  ZonalObject z = *this;
  for (PointMass& a : z.atoms_) a.mass *= c;
  for (double& v : z.legendre_) v *= c;
  for (AnalyticProfile& p : z.profiles_) p.scale *= c;
  z.mult_ = mult_.scaled(c);
  return z;
}

void ZonalObject::require_same_dimension(const ZonalObject& o) const {
  if (n_ != o.n_) {
    throw InputError("zonal objects live in different dimensions (" + std::to_string(n_) + " vs " +
                     std::to_string(o.n_) + ")");
  }
}

ZonalObject ZonalObject::plus(const ZonalObject& o) const {
  require_same_dimension(o);
  ZonalObject z;
  z.n_ = n_;
  z.structural_ = structural_ && o.structural_;
  if (z.structural_) {
    z.atoms_ = atoms_;
    z.atoms_.insert(z.atoms_.end(), o.atoms_.begin(), o.atoms_.end());
    z.legendre_.assign(std::max(legendre_.size(), o.legendre_.size()), 0.0);
    for (std::size_t k = 0; k < legendre_.size(); ++k) z.legendre_[k] += legendre_[k];
    for (std::size_t k = 0; k < o.legendre_.size(); ++k) z.legendre_[k] += o.legendre_[k];
    z.profiles_ = profiles_;
    z.profiles_.insert(z.profiles_.end(), o.profiles_.begin(), o.profiles_.end());
  }
  z.mult_ = mult_ + o.mult_;
  return z;
}

ZonalObject ZonalObject::with_multipliers(MultiplierSequence m, double tol) const {
  if (m.dimension() != n_ || m.kmax() != kmax()) throw InputError("with_multipliers: shape mismatch");
  for (int k = 0; k <= kmax(); ++k) {
    const double scale = std::max({1.0, std::abs(mult_[k]), mult_.error(k) / tol});
    if (std::abs(m[k] - mult_[k]) > tol * scale) {
      throw DomainError("with_multipliers: degree " + std::to_string(k) + " inconsistent with structure");
    }
  }
  ZonalObject z = *this;
  z.mult_ = std::move(m);
  return z;
}

ZonalObject ZonalObject::truncated(int km) const {
  ZonalObject z = *this;
  z.mult_ = mult_.truncated(km);
  return z;
}

double ZonalObject::discarded_tail_l2() const {
  double s = 0.0;
  for (std::size_t k = kmax() + 1; k < legendre_.size(); ++k) s += legendre_[k] * legendre_[k];
  return std::sqrt(s);
}

// ---------------------------------------------------------------------------
// Operations

ZonalObject convolve(const ZonalObject& x, const ZonalObject& y) {
  if (x.dimension() != y.dimension()) throw InputError("convolve: dimension mismatch");
  const int km = std::min(x.kmax(), y.kmax());
  if (x.is_identity()) return y.truncated(km);
  if (y.is_identity()) return x.truncated(km);
  MultiplierSequence m = x.multipliers() * y.multipliers();
  const ZonalObject* dens = x.pure_legendre() ? &x : y.pure_legendre() ? &y : nullptr;
  if (!dens) return ZonalObject::from_multipliers(m);
  const ZonalObject& other = dens == &x ? y : x;
  std::vector<double> c(std::min<int>(dens->legendre_coeffs().size(), km + 1));
  for (std::size_t k = 0; k < c.size(); ++k) c[k] = dens->legendre_coeffs()[k] * other.multipliers()[k];
  return ZonalObject::legendre_density(x.dimension(), c, km).with_multipliers(m);
}

ZonalObject box_n(const ZonalObject& x) {
  const int n = x.dimension();
  MultiplierSequence b = box_multipliers(n, x.kmax());
  return convolve(x, ZonalObject::from_multipliers(b));
}

ZonalObject box_j(const ZonalObject& x, int j, double tol) {
  const int n = x.dimension();
  if (j == n) return box_n(x);
  auto b = berg_function(j, std::max(x.kmax(), 1), n);
  const MultiplierSequence& d = b->ambient;
  double big = 0.0, small = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= x.kmax(); ++k) {
    if (k == 1) continue;
    big = std::max(big, std::abs(d[k]));
    small = std::min(small, std::abs(d[k]));
  }
  if (small <= tol * big) {
    throw ToleranceError("box_j: Berg multipliers ill-conditioned (condition number " +
                         std::to_string(big / small) + ")");
  }
  const int skip[] = {1};
  MultiplierSequence m = x.multipliers().divided_by(d.truncated(x.kmax()), skip);
  if (!x.pure_legendre()) return ZonalObject::from_multipliers(m);
  std::vector<double> c(std::min<int>(x.legendre_coeffs().size(), x.kmax() + 1));
  for (std::size_t k = 0; k < c.size(); ++k) c[k] = k == 1 ? 0.0 : x.legendre_coeffs()[k] / d[k];
  return ZonalObject::legendre_density(n, c, x.kmax()).with_multipliers(m);
}

ZonalObject zonal_builtin(std::string_view name, int n, int kmax) {
  auto index_of = [&](std::string_view prefix) {
    try {
      return std::stoi(std::string(name.substr(prefix.size())));
    } catch (const std::exception&) {
      throw InputError("bad index in builtin zonal object '" + std::string(name) + "'");
    }
  };
  if (name == "dirac_pole") return ZonalObject::dirac_pole(n, kmax);
  if (name == "abs_half") return ZonalObject::abs_half(n, kmax);
  if (name == "equator") return ZonalObject::equator(n, kmax);
  if (name == "constant") return ZonalObject::constant(n, 1.0, kmax);
  if (name.starts_with("berg:")) return ZonalObject::berg(n, index_of("berg:"), kmax);
  if (name.starts_with("cap:")) return ZonalObject::approx_identity(n, index_of("cap:"), kmax);
  throw InputError("unknown builtin zonal object '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------
// JSON

nlohmann::json ZonalObject::to_json() const {
  nlohmann::json j;
  j["n"] = n_;
  j["kmax"] = kmax();
  j["structural"] = structural_;
  if (structural_) {
    j["legendre_coeffs"] = legendre_;
    j["atoms"] = nlohmann::json::array();
    for (const PointMass& a : atoms_) j["atoms"].push_back({{"t", a.t}, {"mass", a.mass}});
    j["profiles"] = nlohmann::json::array();
    for (const AnalyticProfile& p : profiles_) {
      nlohmann::json q{{"kind", kind_name(p.kind)}, {"scale", p.scale}, {"reflected", p.reflected}};
      if (p.kind != ProfileKind::abs_half) q["index"] = p.index;
      if (p.kind == ProfileKind::berg) q["truncation"] = p.berg->truncation;
      j["profiles"].push_back(q);
    }
  }
  j["multipliers"] = mult_.values();
  std::vector<double> err(kmax() + 1);
  for (int k = 0; k <= kmax(); ++k) err[k] = mult_.error(k);
  j["multiplier_errors"] = err;
  return j;
}

ZonalObject ZonalObject::from_json(const nlohmann::json& j) {
  try {
    const int n = j.at("n").get<int>();
    AmbientDim{n};
    if (j.contains("builtin")) {
      return zonal_builtin(j["builtin"].get<std::string>(), n, j.value("kmax", kDefaultKmax));
    }
    const bool structural = j.value("structural", !(j.contains("multipliers") && !j.contains("legendre_coeffs") &&
                                                     !j.contains("atoms") && !j.contains("profiles")));
    if (!structural) {
      auto v = j.at("multipliers").get<std::vector<double>>();
      if (v.empty()) throw InputError("multipliers must be non-empty");
      std::vector<double> e = j.value("multiplier_errors", std::vector<double>{});
      return from_multipliers(MultiplierSequence(n, v, e));
    }
    const int kmax = j.value("kmax", kDefaultKmax);
    ZonalObject z;
    z.n_ = n;
    z.legendre_ = j.value("legendre_coeffs", std::vector<double>{});
    for (double c : z.legendre_) {
      if (!std::isfinite(c)) throw InputError("Legendre coefficients must be finite");
    }
    if (j.contains("atoms")) {
      for (const auto& a : j["atoms"]) {
        PointMass pm{a.at("t").get<double>(), a.at("mass").get<double>()};
        if (!(std::abs(pm.t) <= 1.0)) throw InputError("atom position must lie in [-1,1]");
        z.atoms_.push_back(pm);
      }
    }
    bool has_berg = false;
    double raw_a1 = 0.0;
    if (j.contains("profiles")) {
      for (const auto& q : j["profiles"]) {
        const std::string kind = q.at("kind").get<std::string>();
        AnalyticProfile p;
        if (kind == "abs_half") {
          p.kind = ProfileKind::abs_half;
        } else if (kind == "cap_bump") {
          p = make_cap(n, q.at("index").get<int>());
        } else if (kind == "berg") {
          p.kind = ProfileKind::berg;
          p.index = q.at("index").get<int>();
          p.berg = berg_function(p.index, std::max(kmax, 1), n, q.value("truncation", 0));
          has_berg = true;
        } else {
          throw InputError("unknown profile kind '" + kind + "'");
        }
        p.scale = q.value("scale", 1.0);
        p.reflected = q.value("reflected", false);
        if (p.kind == ProfileKind::berg) raw_a1 += p.scale * (p.reflected ? -1.0 : 1.0) * p.berg->ambient_raw[1];
        z.profiles_.push_back(p);
      }
    }
    z.rebuild_multipliers(kmax);
    // the stored degree-1 correction may differ from the recomputed one by rounding
    if (has_berg && kmax >= 1 && std::abs(z.mult_[1]) <= 1e-12 * std::max(1.0, std::abs(raw_a1))) {
      z.mult_ = z.mult_.with_entry(1, 0.0);
    }
    return z;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("zonal object JSON: ") + e.what());
  }
}

}  // namespace minkval
