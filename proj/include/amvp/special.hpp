#pragma once

#include <limits>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "amvp/group.hpp"

namespace amvp {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

double log_gamma(double t);
double log_beta(double a, double b);
double beta(double a, double b);

/// Integral of x_1^{a_1} ... x_n^{a_n} over the positive-orthant part of the
/// Euclidean unit ball:
///   2^{-n} prod Gamma((a_i+1)/2) / Gamma((n + 2 + sum a_i)/2).
double dirichlet_integral(std::span<const double> alphas);

/// theta_2..theta_k from theta_2 = v_1 + p - 2, theta_{j+1} = v_j + (j-1)/j theta_j.
std::vector<double> theta_sequence(double p, const Stratification& strat);
/// Closed form theta_j = (p - 2 + sum_{i<j} i v_i) / (j - 1), j >= 2.
double theta_closed(double p, const Stratification& strat, int j);
/// theta'_j = theta_j evaluated at p + 2.
std::vector<double> theta_prime_sequence(double p, const Stratification& strat);

/// Log of the layer-j Beta factor B(j v_j/(2k!), (j-1) theta/(2k!) + 1) that
/// integrating R_{j-1}^theta over the j-th layer contributes (2 <= j <= k).
double log_layer_beta(const Stratification& strat, int j, double theta);

enum class ConstantBranch { euclidean_closed_form, general_beta_product, p_infinity };
std::string to_string(ConstantBranch branch);

struct ConstantReport {
  double p = 2.0;
  Stratification strat{{1}};
  /// Coefficient of the normalized p-Laplacian in the eps^2 term. For
  /// p = inf this is 1/2, the coefficient of <A xi, xi>/|xi|^2.
  double c_value = 0.0;
  std::vector<double> theta;
  std::vector<double> theta_prime;
  ConstantBranch branch = ConstantBranch::euclidean_closed_form;
};

/// c(p, v_1, ..., v_k) =
///   1/(2(p+v_1)) prod_{j=2}^{k} B(j v_j/(2k!), (j-1)theta'_j/(2k!)+1)
///                             / B(j v_j/(2k!), (j-1)theta_j/(2k!)+1),
/// assembled in log space. Step 1 reduces to 1/(2(p+N)).
ConstantReport c_constant(double p, const Stratification& strat);

/// c(p) = 2/((p+2)(p+4)) (Gamma((p+6)/4) / Gamma((p+4)/4))^2 for H_1.
double c_heisenberg1(double p);

/// c(p,n,k) = 1/(2(n+p)) B(k/2,(n+p+4)/4) / B(k/2,(n+p+2)/4) for step-2 groups.
double c_step2(double p, int n, int k);

/// I = integral over the unit pseudoball of |y_1|^{p-2}, as a product of
/// Gamma and Beta factors. At p = 2 this is the ball volume.
double moment_I_closed(double p, const Stratification& strat);

/// eps^2 coefficient of mu_p(eps, q)(x) - q(x) for the quadratic model with
/// Hessian A and horizontal gradient xi:
///   c (tr A + (p-2) <A xi, xi>/|xi|^2),  or  <A xi, xi>/(2|xi|^2) at p = inf.
double expansion_coefficient(double p, const Eigen::MatrixXd& A, const Eigen::VectorXd& xi,
                             const Stratification& strat);

/// Validates that p lies in (1, inf]; throws DomainError otherwise.
void require_p_above_one(double p);

}  // namespace amvp
