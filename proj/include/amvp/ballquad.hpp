#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "amvp/backend.hpp"
#include "amvp/group.hpp"

namespace amvp {

enum class SamplingMethod { pseudorandom_rejection, low_discrepancy_rejection };

struct QuadratureSpec {
  /// Number of box proposals (not accepted points).
  std::uint64_t n_samples = 100000;
  std::uint64_t seed = 1;
  SamplingMethod method = SamplingMethod::pseudorandom_rejection;
  /// Proposals per work item; each item draws from its own (seed, item) substream.
  std::uint64_t batch = 65536;
  /// Append every layer-wise sign reflection of each accepted proposal, so the
  /// cloud is exactly symmetric under y^(j) -> -y^(j). Reflections share one
  /// proposal and are treated as a single draw by the error estimates.
  bool antithetic = false;

  void validate() const;
};

/// Number of independent scrambles used in low-discrepancy mode.
inline constexpr int kLowDiscrepancyReplicates = 16;

struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
  std::uint64_t n = 0;

  /// (value - reference) / std_error; 0 when both the error and the gap are 0.
  double z_score(double reference) const;
};

/// Quadrature nodes over a pseudoball with equal positive weights summing to
/// the volume estimate.
struct SampleCloud {
  Stratification strat{{1}};
  /// Column i is point i.
  Eigen::MatrixXd points;
  std::vector<double> values;
  std::vector<double> weights;
  Point center;
  double radius = 1.0;

  // Estimator bookkeeping.
  std::uint64_t n_proposals = 0;
  /// Consecutive points that came from one proposal (2^k with antithetic reflections).
  int group_size = 1;
  int replicates = 1;
  /// Replicate of each proposal group; empty when replicates == 1.
  std::vector<std::uint32_t> group_replicate;
  /// Set when boundary points were appended; such clouds are for min/max only.
  bool boundary_augmented = false;

  std::size_t size() const { return static_cast<std::size_t>(points.cols()); }
  std::size_t groups() const { return size() / static_cast<std::size_t>(group_size); }
  int dim() const { return static_cast<int>(points.rows()); }
  double volume_estimate() const;
};

/// Rejection sampling of the unit pseudoball from the box [-1,1]^m.
SampleCloud sample_unit_ball(const Stratification& strat, const QuadratureSpec& spec,
                             Backend backend = kDefaultBackend);

/// Cloud over B(x, eps) obtained as x * delta_eps(unit-ball samples); weights scale by eps^Q.
SampleCloud sample_ball(const GroupModel& g, const PointRef& x, double eps, const QuadratureSpec& spec,
                        Backend backend = kDefaultBackend);

/// Returns the cloud with the radial projections delta_{1/|z|} z of its points
/// appended (points on the unit sphere), for max/min evaluations over the
/// closed ball. Integration over the result is rejected.
SampleCloud augment_with_boundary(const SampleCloud& unit_cloud);

/// Weighted Monte-Carlo sum of `values` over the cloud, with standard error.
Estimate integrate(const SampleCloud& cloud, std::span<const double> values);

/// Ratio of two integrals over the same cloud with a delta-method standard error.
Estimate integrate_ratio(const SampleCloud& cloud, std::span<const double> numerator,
                         std::span<const double> denominator);

/// Singular integrands |y_1|^{p-2} with p < 2 are set to zero below this.
inline constexpr double kSingularCutoff = 1e-12;

/// Weight |y_1|^{p-2}, zero at the singular set when p < 2.
double singular_weight(double y1, double p);

/// gamma_0 = int |y_1|^{p-2} (1/2 <C y^(1), y^(1)> + <eta, y^(2)>) / int |y_1|^{p-2}
/// over the unit pseudoball.
Estimate gamma0_numeric(const Stratification& strat, double p, const Eigen::MatrixXd& C,
                        const Eigen::VectorXd& eta, const QuadratureSpec& spec,
                        Backend backend = kDefaultBackend);

/// Monte-Carlo integral of |y_1|^{p-2} over the unit pseudoball.
Estimate moment_I_numeric(const Stratification& strat, double p, const QuadratureSpec& spec,
                          Backend backend = kDefaultBackend);

/// Monte-Carlo volume of B(0, radius).
Estimate ball_volume_numeric(const Stratification& strat, double radius, const QuadratureSpec& spec,
                             Backend backend = kDefaultBackend);

/// Monte-Carlo integral of prod x_i^{alpha_i} over the positive-orthant unit ball.
Estimate dirichlet_oracle(std::span<const double> alphas, const QuadratureSpec& spec,
                          Backend backend = kDefaultBackend);

}  // namespace amvp
