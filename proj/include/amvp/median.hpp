#pragma once

#include <functional>
#include <span>

#include "amvp/backend.hpp"
#include "amvp/ballquad.hpp"
#include "amvp/group.hpp"

namespace amvp {

struct MedianConfig {
  /// Exponent in [1, inf].
  double p = 2.0;
  /// Bisection stops once the bracket is below tol_lambda * (max - min).
  double tol_lambda = 1e-12;
  int max_bisect = 200;

  void validate() const;
};

using Field = std::function<double(const PointRef&)>;

/// The generalized median of weighted values: the minimizer of
/// sum w_i |u_i - lambda|^p. Weighted mean at p = 2, midrange at p = inf,
/// lower weighted median at p = 1, otherwise the root of the decreasing
/// residual F(lambda) = sum w_i |u_i - lambda|^{p-2} (u_i - lambda).
/// Empty `weights` means equal weights.
double mu_p_samples(std::span<const double> values, std::span<const double> weights, const MedianConfig& cfg,
                    Backend backend = kDefaultBackend);

/// F(lambda) for finite p > 1.
double median_residual(std::span<const double> values, std::span<const double> weights, double lambda, double p,
                       Backend backend = kDefaultBackend);

/// sum w_i |u_i - lambda|^{p-1}, the magnitude against which F(lambda) is judged.
double median_residual_scale(std::span<const double> values, std::span<const double> weights, double lambda,
                             double p);

/// (sum w_i |u_i - lambda|^p)^{1/p}, or max |u_i - lambda| at p = inf.
double weighted_lp_distance(std::span<const double> values, std::span<const double> weights, double lambda,
                            double p);

/// mu_p(eps, u)(x) evaluated on a unit-ball cloud pulled back through
/// z -> x * delta_eps(z). Weights of the unit cloud are reused, so the value
/// equals mu_p_samples of u at the mapped points.
double mu_p_ball(const GroupModel& g, const Field& u, const PointRef& x, double eps, const SampleCloud& unit_cloud,
                 const MedianConfig& cfg, Backend backend = kDefaultBackend);

/// Same, drawing the unit cloud from `spec` first.
double mu_p_ball(const GroupModel& g, const Field& u, const PointRef& x, double eps, const QuadratureSpec& spec,
                 const MedianConfig& cfg, Backend backend = kDefaultBackend);

}  // namespace amvp
