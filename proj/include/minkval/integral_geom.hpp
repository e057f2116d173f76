#pragma once

#include <cstdint>
#include <functional>
#include <nlohmann/json.hpp>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "minkval/convex.hpp"
#include "minkval/valuation.hpp"
#include "minkval/zonal.hpp"

namespace minkval {

/// Monte-Carlo run parameters. Samples are split into `shards` independent
/// streams seeded by (seed, shard); results do not depend on `threads`.
struct McConfig {
  long samples = 200'000;
  std::uint64_t seed = 1;
  int shards = 16;
  int threads = 0;  // 0: hardware concurrency
  /// Throw ToleranceError when the achieved standard error is larger.
  std::optional<double> max_stderr;
};

struct EstimateReport {
  double estimate = 0.0;
  double std_error = 0.0;
  double target = 0.0;
  double z = 0.0;
  long samples = 0;
  std::uint64_t seed = 0;
  double wall_time_s = 0.0;

  nlohmann::json to_json() const;
  static EstimateReport from_json(const nlohmann::json& j);
};

/// Mean and standard error of a vector-valued sample, reduced over shards in
/// a fixed order.
struct McMoments {
  std::vector<double> mean;
  std::vector<double> std_error;
  long samples = 0;
};

using SampleFn = std::function<void(std::mt19937_64& rng, int shard, std::span<double> out)>;
McMoments monte_carlo(int width, const SampleFn& sample, const McConfig& cfg);

/// Uniform random rotation (unit quaternion law).
Mat3 random_rotation(std::mt19937_64& rng);

/// Affine planes of codimension `codim` meeting the ball B(center, radius),
/// drawn from the motion invariant measure restricted to that set.
class PlaneSampler {
 public:
  PlaneSampler(int codim, const Vec3& center, double radius);
  /// Enclosing ball of P around its vertex centroid.
  static PlaneSampler enclosing(const Polytope& P, int codim);

  int codim() const { return codim_; }
  /// Measure of the planes meeting the ball: C(3,i) kappa_3/kappa_{3-i} R^i.
  double total_measure() const;
  /// P intersected with a random plane.
  Polytope section(const Polytope& P, std::mt19937_64& rng) const;

 private:
  int codim_;
  Vec3 center_;
  double radius_;
};

/// int phi(P cap E) dsigma(E) over planes of codimension `codim`; no target.
EstimateReport crofton_integral(const Polytope& P, int codim, const std::function<double(const Polytope&)>& phi,
                                const McConfig& cfg);

/// int V_j(P cap E) dsigma(E) against [i+j; j] V_{i+j}(P).
EstimateReport crofton_intrinsic(const Polytope& P, int i, int j, const McConfig& cfg);

/// Translations are drawn from a cube of side `window` centered so that every
/// position with K cap gL nonempty lies inside.
struct MotionWindow {
  Vec3 center;
  double side;
};
MotionWindow default_window(const Polytope& K, const Polytope& L);

/// int phi(K cap gL) dg with the rotation part a probability measure.
/// Throws DomainError when a nonempty intersection occurs near the window
/// boundary (window too small).
EstimateReport kinematic_integral(const Polytope& K, const Polytope& L,
                                  const std::function<double(const Polytope&)>& phi, const McConfig& cfg,
                                  std::optional<double> window = std::nullopt);

/// Right side of the general integral geometric theorem: sum_i V_{3-i}(L)
/// [3;i]^{-1} int phi(K cap E) dsigma_{3-i}(E), each term by its own stream.
struct HadwigerReport {
  std::vector<EstimateReport> terms;  // i = 0..3
  double estimate = 0.0;
  double std_error = 0.0;

  nlohmann::json to_json() const;
};
HadwigerReport hadwiger_sum(const Polytope& K, const Polytope& L, const std::function<double(const Polytope&)>& phi,
                            const McConfig& cfg);

/// Kinematic formula for V_j: the direct integral against the closed form and
/// the Hadwiger decomposition against both.
struct KinematicCheck {
  EstimateReport direct;
  HadwigerReport hadwiger;
  /// |direct - hadwiger| / combined standard error.
  double z_consistency = 0.0;

  nlohmann::json to_json() const;
};
double kinematic_target(const Polytope& K, const Polytope& L, int j);
KinematicCheck kinematic_check(const Polytope& K, const Polytope& L, int j, const McConfig& cfg);

/// Kinematic formula for a Minkowski valuation at a fixed direction u.
KinematicCheck kinematic_valuation_check(const Polytope& K, const Polytope& L, const MinkowskiValuationSpec& spec,
                                         const Vec3& u, const McConfig& cfg);

/// Multipliers of q_{n,i,j} mu * box_{n-j+1} g_{n-i-j+1}. The formal case
/// i = 0 gives the centered part of mu.
MultiplierSequence crofton_minkowski_multipliers(int n, int i, int j, const ZonalObject& mu);

struct CroftonDegreeRow {
  int k = 0;
  double lhs = 0.0;
  double rhs = 0.0;
  double std_error = 0.0;
  /// Berg truncation bar carried by the right side.
  double berg_error = 0.0;
  bool pass = false;
};

struct CroftonMvReport {
  std::vector<CroftonDegreeRow> rows;
  Vec3 axis;
  long samples = 0;
  std::uint64_t seed = 0;
  double wall_time_s = 0.0;

  nlohmann::json to_json() const;
  std::string to_csv() const;
};

/// Per-degree check of the Crofton formula for F_K = S_1(K, .) * mu in R^3 with
/// planes (i = j = 1): both sides paired with P_k(u . axis), k <= kmax.
CroftonMvReport crofton_minkowski(const Polytope& P, const ZonalObject& mu, int kmax, const Vec3& axis,
                                  const McConfig& cfg);

struct GeometricConstants {
  int n = 3;
  std::vector<double> kappa;  // kappa_0..kappa_n
  double omega_n = 0.0;
  std::optional<double> flag;        // [i+j; j]
  std::optional<double> q_section;   // q_{n,j}
  std::optional<double> c_k;         // c_{n,k}
  std::optional<double> q_crofton;   // q_{n,i,j}

  nlohmann::json to_json() const;
};
/// Every constant whose index range admits (n, i, j, k).
GeometricConstants geometric_constants(int n, int i, int j, int k);

}  // namespace minkval
