#include "minkval/constants.hpp"

#include <cmath>
#include <numbers>
#include <optional>
#include <initializer_list>
#include <string>

#include "minkval/error.hpp"
#include "minkval/rational.hpp"

namespace minkval {


double omega(int n) {
  if (n < 1) throw InputError("omega: n must be positive, got " + std::to_string(n));
  return n * kappa(n);
}

double binomial(int m, int k) {
  if (k < 0 || m < 0 || k > m) return 0.0;
  k = std::min(k, m - k);
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (m - k + i) / i;
  return r;
}

double harmonic_dimension(int n, int k) {
  if (n < 2) throw InputError("harmonic_dimension: n must be >= 2");
  if (k < 0) throw DomainError("harmonic_dimension: negative degree");
  if (k == 0) return 1.0;
  if (n == 2) return 2.0;
  return (n + 2.0 * k - 2.0) / (n + k - 2.0) * binomial(n + k - 2, n - 2);
}

double flag_coefficient(int a, int b) {
  if (b < 0 || b > a) throw DomainError("flag_coefficient: need 0 <= b <= a");
  return binomial(a, b) * kappa(a) / (kappa(b) * kappa(a - b));
}

double mean_section_constant(int n, int j) {
  if (j < 2 || j > n) {
    throw DomainError("mean_section_constant: need 2 <= j <= n, got j=" + std::to_string(j));
  }
  return (j - 1.0) / (2.0 * std::numbers::pi * (n + 1.0 - j)) * kappa(j - 1) * kappa(j - 2) *
         kappa(n - j) / (kappa(j - 3) * kappa(n - 2));
}

namespace {

// kappa_p = r pi^e for integer p >= -1, with r rational.
struct ExactKappa {
  Rational r;
  int e = 0;
};

std::optional<ExactKappa> exact_kappa(int p) {
  if (p == -1) return ExactKappa{Rational(1), -1};
  if (p < -1) return std::nullopt;
  const int m = p / 2;
  std::optional<Rational> r = Rational(1);
  if (p % 2 == 0) {
    // pi^m / m!
    for (int i = 2; i <= m && r; ++i) r = r->divided_by(Rational(i));
  } else {
    // 2 m! 4^m pi^m / (2m+1)!
    r = Rational(2);
    for (int i = 1; i <= m && r; ++i) r = r->times(Rational(4 * i, (2 * i) * (2 * i + 1)));
  }
  if (!r) return std::nullopt;
  return ExactKappa{*r, m};
}

// prod kappa_{num} / prod kappa_{den} times c, exactly when possible.
std::optional<double> exact_kappa_ratio(Rational c, std::initializer_list<int> num, std::initializer_list<int> den) {
  std::optional<Rational> r = c;
  int e = 0;
  for (int p : num) {
    const auto k = exact_kappa(p);
    if (!k || !r) return std::nullopt;
    r = r->times(k->r);
    e += k->e;
  }
  for (int p : den) {
    const auto k = exact_kappa(p);
    if (!k || !r) return std::nullopt;
    r = r->divided_by(k->r);
    e -= k->e;
  }
  if (!r) return std::nullopt;
  return r->to_double() * std::pow(std::numbers::pi, e);
}

}  // namespace

double kappa(double p) {
  if (p == std::floor(p) && p >= -1.0 && p <= 40.0) {
    if (auto k = exact_kappa(static_cast<int>(p))) return k->r.to_double() * std::pow(std::numbers::pi, k->e);
  }
  return std::pow(std::numbers::pi, p / 2.0) / std::tgamma(1.0 + p / 2.0);
}

double crofton_factor(int n, int k) {
  if (k < 1 || k > n - 2) {
    throw DomainError("crofton_factor: need 1 <= k <= n-2, got k=" + std::to_string(k));
  }
  const int mi = n - k;
  {
    const auto c = Rational(k * (mi - 1) * (mi + 1)).divided_by(Rational(2 * mi * (k + 1)));
    if (c) {
      if (auto r = exact_kappa_ratio(*c, {mi - 2, mi - 2, mi + 1, k}, {mi - 3, mi, mi, k - 1})) return *r;
    }
  }
  const double m = n - k;
  const double num = k * (m - 1.0) * (m + 1.0) * kappa(m - 2) * kappa(m - 2) * kappa(m + 1) * kappa(k);
  const double den = 2.0 * m * (k + 1.0) * kappa(m - 3) * kappa(m) * kappa(m) * kappa(k - 1);
  return num / den;
}

double crofton_minkowski_constant(int n, int i, int j) {
  if (j < 1 || j > n - 2 || i < 1 || i > n - j - 1) {
    throw DomainError("crofton_minkowski_constant: indices out of range (n=" + std::to_string(n) +
                      ", i=" + std::to_string(i) + ", j=" + std::to_string(j) + ")");
  }
  std::optional<Rational> f = Rational(1);
  for (int m = 2; m <= i && f; ++m) f = f->divided_by(Rational(m));
  double r = 0.0;
  if (auto e = f ? exact_kappa_ratio(*f, {}, {i}) : std::nullopt) {
    r = std::pow(2.0, i) * *e;
  } else {
    r = std::pow(2.0, i) / (std::tgamma(i + 1.0) * kappa(i));
  }
  for (int k = j; k <= i + j - 1; ++k) r *= crofton_factor(n, k);
  return r;
}

}  // namespace minkval
