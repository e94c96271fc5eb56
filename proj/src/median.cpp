#include "amvp/median.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "amvp/error.hpp"
#include "amvp/kernels.hpp"

namespace amvp {

namespace {

// Bisection keeps going past tol_lambda while the residual is still large
// relative to its scale; this only matters for p < 2 near a data point.
constexpr double kResidualTarget = 1e-12;

struct Inputs {
  std::span<const double> values;
  std::span<const double> weights;
  std::vector<double> owned;  // equal weights when none were given
};

Inputs check_inputs(std::span<const double> values, std::span<const double> weights) {
  if (values.empty()) throw DomainError("median of an empty sample");
  Inputs in;
  in.values = values;
  if (weights.empty()) {
    in.owned.assign(values.size(), 1.0);
    in.weights = in.owned;
  } else {
    if (weights.size() != values.size()) throw ContractError("values and weights differ in length");
    for (double w : weights)
      if (!(w > 0.0) || !std::isfinite(w)) throw DomainError("weights must be positive and finite");
    in.weights = weights;
  }
  for (double v : values)
    if (!std::isfinite(v)) throw DomainError("values must be finite");
  return in;
}

double lower_weighted_median(std::span<const double> values, std::span<const double> weights) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  kernels::CompensatedSum total;
  for (double w : weights) total.add(w);
  const double half = 0.5 * total.value();
  kernels::CompensatedSum cumulative;
  for (std::size_t i : order) {
    cumulative.add(weights[i]);
    if (cumulative.value() >= half) return values[i];
  }
  return values[order.back()];
}

double weighted_mean(std::span<const double> values, std::span<const double> weights) {
  kernels::CompensatedSum num, den;
  for (std::size_t i = 0; i < values.size(); ++i) {
    num.add(weights[i] * values[i]);
    den.add(weights[i]);
  }
  return num.value() / den.value();
}

double root_by_bisection(std::span<const double> values, std::span<const double> weights, double lo, double hi,
                         const MedianConfig& cfg, Backend backend) {
  const double p = cfg.p;
  const double width_target = cfg.tol_lambda * (hi - lo);
  auto F = [&](double lambda) { return kernels::lp_residual(values, weights, lambda, p, backend); };
  double f_lo = F(lo);
  double f_hi = F(hi);
  double best = lo;
  for (int it = 0; it < cfg.max_bisect; ++it) {
    if (f_lo == 0.0) return lo;
    if (f_hi == 0.0) return hi;
    // Linear interpolation inside the bracket.
    best = std::clamp(lo + f_lo / (f_lo - f_hi) * (hi - lo), lo, hi);
    if (hi - lo <= width_target) {
      const double f_best = F(best);
      if (std::abs(f_best) <= kResidualTarget * median_residual_scale(values, weights, best, p)) return best;
    }
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) return best;
    const double f_mid = F(mid);
    if (f_mid > 0.0) {
      lo = mid;
      f_lo = f_mid;
    } else if (f_mid < 0.0) {
      hi = mid;
      f_hi = f_mid;
    } else {
      return mid;
    }
  }
  return best;
}

}  // namespace

void MedianConfig::validate() const {
  if (std::isnan(p) || p < 1.0) throw DomainError("p must lie in [1, inf]");
  if (!(tol_lambda > 0.0)) throw DomainError("tol_lambda must be positive");
  if (max_bisect < 1) throw DomainError("max_bisect must be positive");
}

double mu_p_samples(std::span<const double> values, std::span<const double> weights, const MedianConfig& cfg,
                    Backend backend) {
  cfg.validate();
  const Inputs in = check_inputs(values, weights);
  const auto [min_it, max_it] = std::minmax_element(in.values.begin(), in.values.end());
  const double lo = *min_it;
  const double hi = *max_it;
  if (lo == hi) return lo;
  if (std::isinf(cfg.p)) return 0.5 * lo + 0.5 * hi;
  if (cfg.p == 1.0) return lower_weighted_median(in.values, in.weights);
  if (cfg.p == 2.0) return std::clamp(weighted_mean(in.values, in.weights), lo, hi);
  return root_by_bisection(in.values, in.weights, lo, hi, cfg, backend);
}

double median_residual(std::span<const double> values, std::span<const double> weights, double lambda, double p,
                       Backend backend) {
  const Inputs in = check_inputs(values, weights);
  if (!(p > 1.0) || std::isinf(p)) throw DomainError("the residual needs finite p > 1");
  return kernels::lp_residual(in.values, in.weights, lambda, p, backend);
}

double median_residual_scale(std::span<const double> values, std::span<const double> weights, double lambda,
                             double p) {
  kernels::CompensatedSum acc;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double w = weights.empty() ? 1.0 : weights[i];
    acc.add(w * std::abs(kernels::signed_power(values[i] - lambda, p)));
  }
  return acc.value();
}

double weighted_lp_distance(std::span<const double> values, std::span<const double> weights, double lambda,
                            double p) {
  if (std::isinf(p)) {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::abs(v - lambda));
    return m;
  }
  kernels::CompensatedSum acc;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double w = weights.empty() ? 1.0 : weights[i];
    acc.add(w * std::pow(std::abs(values[i] - lambda), p));
  }
  return std::pow(acc.value(), 1.0 / p);
}

double mu_p_ball(const GroupModel& g, const Field& u, const PointRef& x, double eps, const SampleCloud& unit_cloud,
                 const MedianConfig& cfg, Backend backend) {
  if (!(eps > 0.0) || !std::isfinite(eps)) throw DomainError("ball radius must be positive");
  if (!g.has_arithmetic()) throw UnsupportedModelError("mu_p_ball needs a group with arithmetic");
  if (unit_cloud.strat != g.strat()) throw ContractError("unit cloud does not match the group stratification");
  if (unit_cloud.size() == 0) throw FeasibilityError("unit cloud is empty");
  g.check_point(x);
  std::vector<double> values(unit_cloud.size());
  Eigen::VectorXd scaled(g.dim()), y(g.dim());
  for (std::size_t i = 0; i < values.size(); ++i) {
    dilate_into(g.strat(), eps, unit_cloud.points.col(static_cast<Eigen::Index>(i)), scaled);
    g.multiply_into(x, scaled, y);
    values[i] = u(y);
  }
  return mu_p_samples(values, unit_cloud.weights, cfg, backend);
}

double mu_p_ball(const GroupModel& g, const Field& u, const PointRef& x, double eps, const QuadratureSpec& spec,
                 const MedianConfig& cfg, Backend backend) {
  return mu_p_ball(g, u, x, eps, sample_unit_ball(g.strat(), spec, backend), cfg, backend);
}

}  // namespace amvp
