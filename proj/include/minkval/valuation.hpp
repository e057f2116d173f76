#pragma once

#include <cstdint>
#include <nlohmann/json.hpp>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "minkval/convex.hpp"
#include "minkval/zonal.hpp"

namespace minkval {

/// Generating data of a continuous, translation invariant, SO(n) equivariant
/// Minkowski valuation:
///   h(Phi K, .) = c0 + sum_{i=1}^{n-2} S_i(K,.) * mu_i + S_{n-1}(K,.) * f_top + cn V_n(K).
struct MinkowskiValuationSpec {
  int n = 3;
  double c0 = 0.0;
  /// mu[i-1] is the datum of degree i, 1 <= i <= n-2.
  std::vector<std::optional<ZonalObject>> mu;
  std::optional<ZonalObject> f_top;
  double cn = 0.0;

  static MinkowskiValuationSpec empty(int n);

  /// Dimensions, centering and (optionally) the sign conditions c0, cn >= 0.
  void validate(bool check_signs = true) const;
  /// Smallest kmax among the zonal data (kDefaultKmax when there are none).
  int kmax() const;

  nlohmann::json to_json() const;
  /// Accepts {"n","c0","mu","f_top","cn"} or {"builtin": name, "n": n}.
  static MinkowskiValuationSpec from_json(const nlohmann::json& j);
};

/// projection_body, difference_body, mean_width_ball, mean_section:<j>.
MinkowskiValuationSpec builtin_spec(std::string_view name, int n, int kmax = kDefaultKmax);

struct SupportFunctionResult {
  std::vector<Vec3> directions;
  std::vector<double> values;
  std::vector<double> errors;
  std::string path;  // "pointwise" or "spectral"
  int band = -1;
  /// l2 mass of the multipliers beyond the band, summed over the data.
  double tail_l2 = 0.0;

  nlohmann::json to_json() const;
};

/// Pointwise path: direct quadrature of each zonal density against S_i.
SupportFunctionResult evaluate(const MinkowskiValuationSpec& spec, const BodyMeasures& body,
                               std::span<const Vec3> directions);
SupportFunctionResult evaluate(const MinkowskiValuationSpec& spec, const Polytope& P,
                               std::span<const Vec3> directions);

/// Spectral path: sum over k <= band of a_k N(n,k)/omega_n int P_k(u.v) dS_i(u).
SupportFunctionResult evaluate_spectral(const MinkowskiValuationSpec& spec, const BodyMeasures& body,
                                        std::span<const Vec3> directions, int band = 16);
SupportFunctionResult evaluate_spectral(const MinkowskiValuationSpec& spec, const Polytope& P,
                                        std::span<const Vec3> directions, int band = 16);

/// Derivation operator: d/dt at t = 0 of K -> Phi(K + tB).
MinkowskiValuationSpec lambda_derivative(const MinkowskiValuationSpec& spec);

/// Multipliers of box_n mu_1.
MultiplierSequence degree1_multipliers(const MinkowskiValuationSpec& spec);

/// Mean section operator M_j: sole datum q_{n,j} g_j at degree n+1-j.
MinkowskiValuationSpec mean_section_spec(int n, int j, int kmax = kDefaultKmax);

/// (n-i)! i!/(n-1)! int_{S^{n-1}} h(u) box_n f(-u) du for zonal densities.
double poincare_pair(const ZonalObject& h, const ZonalObject& f, int i);

struct IdentityReport {
  double max_residual = 0.0;
  int directions = 0;
  /// The hyperplane does not cut P into two full-dimensional pieces.
  bool degenerate = false;
  std::string note;
};

/// sup over directions of |h(Phi K) + h(Phi L) - h(Phi P) - h(Phi(K cap L))|
/// with K, L the two halves of P cut by H.
IdentityReport valuation_identity_check(const MinkowskiValuationSpec& spec, const Polytope& P, const Hyperplane& H,
                                        std::span<const Vec3> directions, bool spectral = false);

/// Deterministic quasi-uniform directions.
std::vector<Vec3> fibonacci_directions(int count);
/// Uniform random directions.
std::vector<Vec3> random_directions(int count, std::uint64_t seed);

}  // namespace minkval
