#pragma once

#include <cstdint>
#include <numeric>
#include <optional>
#include <string>

#include "minkval/error.hpp"

namespace minkval {

/// Reduced fraction with 64-bit parts. Arithmetic returns nullopt when the
/// reduced result does not fit, so callers can fall back to floating point.
class Rational {
 public:
  constexpr Rational() = default;
  Rational(std::int64_t num, std::int64_t den = 1) {
    if (den == 0) throw DomainError("Rational: zero denominator");
    auto r = make(num, den);
    if (!r) throw DomainError("Rational: value out of range");
    *this = *r;
  }

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }
  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }
  bool is_zero() const { return num_ == 0; }
  bool is_one() const { return num_ == 1 && den_ == 1; }

  std::optional<Rational> times(const Rational& o) const {
    return make(static_cast<__int128>(num_) * o.num_, static_cast<__int128>(den_) * o.den_);
  }
  std::optional<Rational> plus(const Rational& o) const {
    return make(static_cast<__int128>(num_) * o.den_ + static_cast<__int128>(o.num_) * den_,
                static_cast<__int128>(den_) * o.den_);
  }
  std::optional<Rational> divided_by(const Rational& o) const {
    if (o.num_ == 0) throw DomainError("Rational: division by zero");
    return make(static_cast<__int128>(num_) * o.den_, static_cast<__int128>(den_) * o.num_);
  }

  friend bool operator==(const Rational&, const Rational&) = default;

  std::string str() const {
    return den_ == 1 ? std::to_string(num_) : std::to_string(num_) + "/" + std::to_string(den_);
  }

 private:
  static std::optional<Rational> make(__int128 n, __int128 d) {
    if (d < 0) {
      n = -n;
      d = -d;
    }
    __int128 a = n < 0 ? -n : n, b = d;
    while (b != 0) {
      __int128 t = a % b;
      a = b;
      b = t;
    }
    if (a > 1) {
      n /= a;
      d /= a;
    }
    constexpr __int128 lim = INT64_MAX;
    if (n > lim || n < -lim || d > lim) return std::nullopt;
    Rational r;
    r.num_ = static_cast<std::int64_t>(n);
    r.den_ = static_cast<std::int64_t>(d);
    return r;
  }

  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

}  // namespace minkval
