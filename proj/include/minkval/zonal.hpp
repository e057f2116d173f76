#pragma once

#include <memory>
#include <nlohmann/json.hpp>
#include <optional>
#include <string_view>
#include <vector>

#include "minkval/harmonics.hpp"
#include "minkval/rational.hpp"

namespace minkval {

inline constexpr int kDefaultKmax = 32;

/// Funk-Hecke multipliers a_0..a_kmax of a zonal object in R^n.
///
/// Each entry is stored as base * factor with an exact rational factor, so
/// chains of rational operators (box, Berg inversion) cancel without rounding.
/// Entries computed by quadrature carry an error bar.
class MultiplierSequence {
 public:
  MultiplierSequence() = default;
  MultiplierSequence(int n, std::vector<double> values, std::vector<double> errors = {});
  static MultiplierSequence exact(int n, const std::vector<Rational>& values);
  static MultiplierSequence ones(int n, int kmax);

  int dimension() const { return n_; }
  int kmax() const { return static_cast<int>(base_.size()) - 1; }
  double operator[](int k) const;
  double error(int k) const;
  double max_error() const;
  /// Set when the entry is known to be exactly this rational number.
  std::optional<Rational> exact_value(int k) const;
  std::vector<double> values() const;

  MultiplierSequence operator*(const MultiplierSequence& o) const;
  MultiplierSequence operator+(const MultiplierSequence& o) const;
  MultiplierSequence scaled(double c) const;
  MultiplierSequence truncated(int kmax) const;
  /// (-1)^k a_k.
  MultiplierSequence alternated() const;
  MultiplierSequence with_entry(int k, double v) const;
  /// Entrywise quotient; entries listed in `skip` are set to zero.
  MultiplierSequence divided_by(const MultiplierSequence& d, std::span<const int> skip = {}) const;

  /// l2 norm of the entries with index >= from.
  double tail_l2(int from) const;

 private:
  void check(int k) const;

  int n_ = 3;
  std::vector<double> base_;
  std::vector<Rational> factor_;
  std::vector<double> error_;
};

/// Multipliers of box_n = id + Delta/(n-1): (1-k)(k+n-1)/(n-1).
MultiplierSequence box_multipliers(int n, int kmax);

/// Truncated Berg function g_j as a native series on S^{j-1}, and its
/// zonal extension to S^{n-1}.
struct BergFunction {
  int j = 3;
  int n = 3;
  int kmax = kDefaultKmax;
  int truncation = 0;
  /// Series coefficients of g_j in P_k^j, k <= truncation.
  std::vector<double> series;
  /// a_k^j[g_j] for k <= kmax (exact rationals).
  MultiplierSequence native;
  /// a_k^n of the truncated series before removing the degree-1 part.
  MultiplierSequence ambient_raw;
  /// ambient_raw with a_1 = 0; error bars from halving the truncation.
  MultiplierSequence ambient;

  double value(double t, int order = 0) const;
  /// Bound on |g_j - truncated series| for j = 2; infinite otherwise.
  double pointwise_error_bound() const;
};

/// Shared, cached Berg data. truncation <= 0 selects the default (1024).
std::shared_ptr<const BergFunction> berg_function(int j, int kmax, int n, int truncation = 0);

enum class ProfileKind { abs_half, cap_bump, berg };

/// Named density with known multipliers.
struct AnalyticProfile {
  ProfileKind kind = ProfileKind::abs_half;
  double scale = 1.0;
  bool reflected = false;
  int index = 0;       // j of cap_bump or berg
  double cap_cos = 1.0;
  double cap_norm = 1.0;
  std::shared_ptr<const BergFunction> berg;

  double value(double t, int order = 0) const;
  bool continuous() const;
};

/// Zonal measure or function on S^{n-1}: atoms plus a density made of a
/// Legendre series and analytic profiles. Multipliers are the source of
/// truth; objects produced by operations without a structural description
/// are multiplier-only.
class ZonalObject {
 public:
  static ZonalObject dirac_pole(int n, int kmax = kDefaultKmax);
  static ZonalObject from_atoms(int n, std::vector<PointMass> atoms, int kmax = kDefaultKmax);
  static ZonalObject legendre_density(int n, std::vector<double> coeffs, int kmax = kDefaultKmax);
  static ZonalObject constant(int n, double c, int kmax = kDefaultKmax);
  /// |t|/2, the generating function of the projection body.
  static ZonalObject abs_half(int n, int kmax = kDefaultKmax);
  /// Uniform measure on the equator, total mass omega_{n-1}.
  static ZonalObject equator(int n, int kmax = kDefaultKmax);
  /// Normalized bump c max(0, t - cos(1/j))^2 with a_0 = 1.
  static ZonalObject approx_identity(int n, int j, int kmax = kDefaultKmax);
  /// Zonal extension of the Berg function g_j, 2 <= j <= n, degree 1 removed.
  static ZonalObject berg(int n, int j, int kmax = kDefaultKmax, int truncation = 0);
  static ZonalObject from_multipliers(MultiplierSequence m);

  int dimension() const { return n_; }
  int kmax() const { return mult_.kmax(); }
  const MultiplierSequence& multipliers() const { return mult_; }
  bool structural() const { return structural_; }
  const std::vector<PointMass>& atoms() const { return atoms_; }
  const std::vector<double>& legendre_coeffs() const { return legendre_; }
  const std::vector<AnalyticProfile>& profiles() const { return profiles_; }

  bool has_atoms() const { return !atoms_.empty(); }
  bool is_identity() const;
  bool pure_legendre() const { return structural_ && atoms_.empty() && profiles_.empty(); }
  /// True when the object is a continuous function usable on the pointwise path.
  bool pointwise() const;
  /// Density and its t-derivatives. Throws DomainError unless pointwise().
  double density(double t, int order = 0) const;
  ZonalProfile as_profile() const;
  /// Bound on the pointwise error of density() from truncated series.
  double density_error_bound() const;

  bool centered(double tol = 1e-10) const;
  ZonalObject centered_part() const;
  ZonalObject reflected() const;
  ZonalObject scaled(double c) const;
  ZonalObject plus(const ZonalObject& o) const;
  ZonalObject truncated(int kmax) const;
  /// Replace the multipliers by an equal sequence carrying better provenance
  /// (exact factors, error bars). Throws if they disagree with the structure.
  ZonalObject with_multipliers(MultiplierSequence m, double tol = 1e-9) const;
  /// l2 mass of Legendre coefficients beyond kmax that the multipliers ignore.
  double discarded_tail_l2() const;

  nlohmann::json to_json() const;
  static ZonalObject from_json(const nlohmann::json& j);

 private:
  ZonalObject() = default;
  void rebuild_multipliers(int kmax);
  void require_same_dimension(const ZonalObject& o) const;

  int n_ = 3;
  bool structural_ = true;
  std::vector<PointMass> atoms_;
  std::vector<double> legendre_;
  std::vector<AnalyticProfile> profiles_;
  MultiplierSequence mult_;
};

/// Zonal convolution; multipliers multiply entrywise.
ZonalObject convolve(const ZonalObject& x, const ZonalObject& y);

/// box_n applied to x.
ZonalObject box_n(const ZonalObject& x);

/// box_j: inverse of convolution with the Berg extension g_j on centered
/// objects. Throws ToleranceError when a multiplier of g_j is too small.
ZonalObject box_j(const ZonalObject& x, int j, double tol = 1e-12);

/// Named objects: dirac_pole, abs_half, equator, constant, berg:<j>, cap:<j>.
ZonalObject zonal_builtin(std::string_view name, int n, int kmax = kDefaultKmax);

}  // namespace minkval
