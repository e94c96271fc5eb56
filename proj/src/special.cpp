#include "amvp/special.hpp"

#include <cmath>
#include <numbers>

#include "amvp/error.hpp"

namespace amvp {

double log_gamma(double t) {
  if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("log_gamma requires a positive finite argument");
#if defined(__GLIBC__)
  int sign = 0;
  return ::lgamma_r(t, &sign);  // reentrant: std::lgamma writes the global signgam
#else
  return std::lgamma(t);
#endif
}

double log_beta(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) throw DomainError("beta requires positive arguments");
  return log_gamma(a) + log_gamma(b) - log_gamma(a + b);
}

double beta(double a, double b) { return std::exp(log_beta(a, b)); }

double dirichlet_integral(std::span<const double> alphas) {
  if (alphas.empty()) throw ContractError("dirichlet_integral needs at least one exponent");
  double log_value = -static_cast<double>(alphas.size()) * std::numbers::ln2;
  double total = 0.0;
  for (double a : alphas) {
    if (!(a > -1.0) || !std::isfinite(a)) throw DomainError("dirichlet exponents must exceed -1");
    log_value += log_gamma((a + 1.0) / 2.0);
    total += a;
  }
  log_value -= log_gamma((static_cast<double>(alphas.size()) + 2.0 + total) / 2.0);
  return std::exp(log_value);
}

void require_p_above_one(double p) {
  if (std::isnan(p) || !(p > 1.0)) throw DomainError("p must lie in (1, inf]");
}

namespace {

void require_finite_p(double p) {
  require_p_above_one(p);
  if (std::isinf(p)) throw DomainError("p must be finite here");
}

}  // namespace

double theta_closed(double p, const Stratification& strat, int j) {
  if (j < 2 || j > strat.step()) throw ContractError("theta index out of range");
  double sum = p - 2.0;
  for (int i = 1; i < j; ++i) sum += i * strat.layer_dim(i - 1);
  return sum / (j - 1);
}

std::vector<double> theta_sequence(double p, const Stratification& strat) {
  require_finite_p(p);
  std::vector<double> theta;
  if (strat.step() < 2) return theta;
  theta.push_back(strat.layer_dim(0) + p - 2.0);
  for (int j = 2; j < strat.step(); ++j)
    theta.push_back(strat.layer_dim(j - 1) + (j - 1.0) / j * theta.back());
  return theta;
}

std::vector<double> theta_prime_sequence(double p, const Stratification& strat) {
  require_finite_p(p);
  return theta_sequence(p + 2.0, strat);
}

double log_layer_beta(const Stratification& strat, int j, double theta) {
  if (j < 2 || j > strat.step()) throw ContractError("layer index out of range");
  const double e = strat.norm_exponent();
  return log_beta(j * strat.layer_dim(j - 1) / e, (j - 1) * theta / e + 1.0);
}

std::string to_string(ConstantBranch branch) {
  switch (branch) {
    case ConstantBranch::euclidean_closed_form: return "euclidean_closed_form";
    case ConstantBranch::general_beta_product: return "general_beta_product";
    case ConstantBranch::p_infinity: return "p_infinity";
  }
  return "unknown";
}

ConstantReport c_constant(double p, const Stratification& strat) {
  require_p_above_one(p);
  ConstantReport report;
  report.p = p;
  report.strat = strat;
  if (std::isinf(p)) {
    report.c_value = 0.5;
    report.branch = ConstantBranch::p_infinity;
    return report;
  }
  const double v1 = strat.layer_dim(0);
  if (strat.step() == 1) {
    report.c_value = 1.0 / (2.0 * (p + v1));
    report.branch = ConstantBranch::euclidean_closed_form;
    return report;
  }
  report.theta = theta_sequence(p, strat);
  report.theta_prime = theta_prime_sequence(p, strat);
  double log_c = -std::log(2.0 * (p + v1));
  for (int j = 2; j <= strat.step(); ++j) {
    const auto idx = static_cast<std::size_t>(j - 2);
    log_c += log_layer_beta(strat, j, report.theta_prime[idx]) - log_layer_beta(strat, j, report.theta[idx]);
  }
  report.c_value = std::exp(log_c);
  report.branch = ConstantBranch::general_beta_product;
  return report;
}

double c_heisenberg1(double p) {
  require_finite_p(p);
  const double ratio = std::exp(log_gamma((p + 6.0) / 4.0) - log_gamma((p + 4.0) / 4.0));
  return 2.0 / ((p + 2.0) * (p + 4.0)) * ratio * ratio;
}

double c_step2(double p, int n, int k) {
  require_finite_p(p);
  if (n < 1 || k < 1) throw ContractError("c_step2 needs positive layer dimensions");
  const double half_k = k / 2.0;
  return std::exp(log_beta(half_k, (n + p + 4.0) / 4.0) - log_beta(half_k, (n + p + 2.0) / 4.0)) /
         (2.0 * (n + p));
}

double moment_I_closed(double p, const Stratification& strat) {
  require_finite_p(p);
  const double v1 = strat.layer_dim(0);
  const double log_sqrt_pi = 0.5 * std::log(std::numbers::pi);
  // Innermost layer: integral of |y_1|^{p-2} over the Euclidean unit ball of R^{v_1}.
  double log_I = log_gamma((p - 1.0) / 2.0) + (v1 - 1.0) * log_sqrt_pi - log_gamma((v1 + p) / 2.0);
  if (strat.step() >= 2) {
    const auto theta = theta_sequence(p, strat);
    const double e = strat.norm_exponent();
    for (int j = 2; j <= strat.step(); ++j) {
      const double vj = strat.layer_dim(j - 1);
      // sphere area 2 pi^{v/2}/Gamma(v/2), radial substitution factor j/(2k!)
      log_I += std::log(2.0) + vj * log_sqrt_pi - log_gamma(vj / 2.0) + std::log(j / e) +
               log_layer_beta(strat, j, theta[static_cast<std::size_t>(j - 2)]);
    }
  }
  return std::exp(log_I);
}

double expansion_coefficient(double p, const Eigen::MatrixXd& A, const Eigen::VectorXd& xi,
                             const Stratification& strat) {
  require_p_above_one(p);
  const int v1 = strat.layer_dim(0);
  if (A.rows() != v1 || A.cols() != v1 || xi.size() != v1)
    throw ContractError("A must be v1 x v1 and xi a v1-vector");
  if (!A.allFinite() || !xi.allFinite()) throw DomainError("A and xi must be finite");
  const double scale = std::max(1.0, A.cwiseAbs().maxCoeff());
  if ((A - A.transpose()).cwiseAbs().maxCoeff() > 1e-14 * scale) throw ContractError("A must be symmetric");
  const double xi_sq = xi.squaredNorm();
  if (xi_sq == 0.0) throw DegenerateGradientError("xi must be nonzero");
  const double directional = xi.dot(A * xi) / xi_sq;
  if (std::isinf(p)) return 0.5 * directional;
  return c_constant(p, strat).c_value * (A.trace() + (p - 2.0) * directional);
}

}  // namespace amvp
