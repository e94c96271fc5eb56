#pragma once

#include <optional>
#include <vector>

#include <Eigen/Core>

#include "amvp/backend.hpp"
#include "amvp/ballquad.hpp"
#include "amvp/group.hpp"
#include "amvp/median.hpp"

namespace amvp {

/// q(y) = q0 + <xi, w1> + <eta, w2> + 1/2 <A w1, w1>,  w = x^{-1} y.
struct QuadraticModel {
  double q0 = 0.0;
  Eigen::VectorXd xi;
  Eigen::VectorXd eta;  // empty for step-1 groups
  Eigen::MatrixXd A;
  Point x;

  /// Zero model of the right shape at the identity.
  static QuadraticModel zero(const GroupModel& g);
  void validate(const GroupModel& g) const;
};

double eval_quadratic(const QuadraticModel& m, const GroupModel& g, const PointRef& y);

/// Finite-difference model of u at x, differentiating along group translations
/// x * (s v). xi and the vertical derivative use central first differences,
/// A the symmetrized second differences (X_i X_j + X_j X_i) / 2. The extracted
/// eta is twice the vertical gradient.
/// Without `h`, the first-difference step is eps_mach^{1/3} max(1, |x|) and
/// the second-difference step eps_mach^{1/4} max(1, |x|).
QuadraticModel quadratic_from_function(const GroupModel& g, const Field& u, const PointRef& x,
                                       std::optional<double> h = std::nullopt);

/// tr A + (p - 2) <A xi, xi> / |xi|^2, or <A xi, xi> / |xi|^2 at p = inf.
double normalized_p_laplacian(const QuadraticModel& m, double p);

struct SweepReport {
  double p = 2.0;
  double q0 = 0.0;
  std::vector<double> eps_list;
  std::vector<double> mu_values;
  /// a and b of the least-squares fit mu - q0 = a eps^2 + b eps^3.
  double fitted_coeff = 0.0;
  double fitted_cubic = 0.0;
  /// Spread of a over disjoint sub-clouds, divided by sqrt(#sub-clouds).
  double fitted_std_error = 0.0;
  double predicted_coeff = 0.0;
  double rel_error = 0.0;
  /// Root-mean-square residual of the fit.
  double fit_residual = 0.0;
  std::uint64_t n_proposals = 0;
};

/// Number of disjoint sub-clouds used for fitted_std_error.
inline constexpr int kSweepSubclouds = 8;

/// Evaluates mu_p(eps_i, q)(x) for eps_i = eps0 / 2^i on one layer-symmetric
/// unit cloud (common random numbers) and fits the eps^2 coefficient. For
/// p = inf the cloud also carries its radial projections onto the unit sphere.
SweepReport expansion_sweep(const GroupModel& g, const QuadraticModel& m, double p, double eps0, int levels,
                            const QuadratureSpec& spec, const MedianConfig& cfg, Backend backend = kDefaultBackend);

/// The same experiment for a smooth u; the prediction comes from its
/// finite-difference quadratic model at x.
SweepReport check_amvp(const GroupModel& g, const Field& u, const PointRef& x, double p, double eps0, int levels,
                       const QuadratureSpec& spec, const MedianConfig& cfg, Backend backend = kDefaultBackend);

}  // namespace amvp
