#include "amvp/asymptotics.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "amvp/error.hpp"
#include "amvp/special.hpp"

namespace amvp {

namespace {

int vertical_dim(const GroupModel& g) { return g.strat().step() >= 2 ? g.strat().layer_dim(1) : 0; }

// mu - q0 on each eps for a field evaluated at x * delta_eps(z).
std::vector<double> level_medians(const GroupModel& g, const Field& u, const PointRef& x,
                                  const std::vector<double>& eps_list, const SampleCloud& cloud,
                                  std::size_t first_group, std::size_t last_group, const MedianConfig& cfg,
                                  Backend backend) {
  const auto gs = static_cast<std::size_t>(cloud.group_size);
  const std::size_t begin = first_group * gs;
  const std::size_t end = last_group * gs;
  std::vector<double> values(end - begin);
  const std::span<const double> weights(cloud.weights.data() + begin, end - begin);
  std::vector<double> mu;
  Eigen::VectorXd scaled(g.dim()), y(g.dim());
  for (double eps : eps_list) {
    for (std::size_t i = begin; i < end; ++i) {
      dilate_into(g.strat(), eps, cloud.points.col(static_cast<Eigen::Index>(i)), scaled);
      g.multiply_into(x, scaled, y);
      values[i - begin] = u(y);
    }
    mu.push_back(mu_p_samples(values, weights, cfg, backend));
  }
  return mu;
}

struct Fit {
  double a = 0.0;
  double b = 0.0;
  double rms = 0.0;
};

Fit fit_quadratic_cubic(const std::vector<double>& eps, const std::vector<double>& d) {
  const auto n = static_cast<Eigen::Index>(eps.size());
  const double e0 = eps.front();
  Eigen::MatrixXd M(n, 2);
  Eigen::VectorXd rhs(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double s = eps[static_cast<std::size_t>(i)] / e0;
    M(i, 0) = s * s;
    M(i, 1) = s * s * s;
    rhs(i) = d[static_cast<std::size_t>(i)];
  }
  const Eigen::Vector2d coef = M.colPivHouseholderQr().solve(rhs);
  Fit fit;
  fit.a = coef(0) / (e0 * e0);
  fit.b = coef(1) / (e0 * e0 * e0);
  fit.rms = std::sqrt((M * coef - rhs).squaredNorm() / static_cast<double>(n));
  return fit;
}

SweepReport run_sweep(const GroupModel& g, const Field& u, const PointRef& x, double q0, double predicted, double p,
                      double eps0, int levels, const QuadratureSpec& spec, const MedianConfig& cfg_in,
                      Backend backend) {
  if (!(eps0 > 0.0) || !std::isfinite(eps0)) throw DomainError("eps0 must be positive");
  if (levels < 2) throw DomainError("a sweep needs at least 2 levels");
  if (!g.has_arithmetic()) throw UnsupportedModelError("sweeps need a group with arithmetic");
  MedianConfig cfg = cfg_in;
  cfg.p = p;
  cfg.validate();

  QuadratureSpec symmetric = spec;
  symmetric.antithetic = true;
  SampleCloud cloud = sample_unit_ball(g.strat(), symmetric, backend);
  if (std::isinf(p)) cloud = augment_with_boundary(cloud);
  if (cloud.size() == 0) throw FeasibilityError("unit cloud is empty");

  SweepReport report;
  report.p = p;
  report.q0 = q0;
  report.n_proposals = cloud.n_proposals;
  for (int i = 0; i < levels; ++i) report.eps_list.push_back(std::ldexp(eps0, -i));

  report.mu_values = level_medians(g, u, x, report.eps_list, cloud, 0, cloud.groups(), cfg, backend);
  std::vector<double> d(report.mu_values.size());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = report.mu_values[i] - q0;
  const Fit fit = fit_quadratic_cubic(report.eps_list, d);
  report.fitted_coeff = fit.a;
  report.fitted_cubic = fit.b;
  report.fit_residual = fit.rms;
  report.predicted_coeff = predicted;
  report.rel_error = predicted != 0.0 ? std::abs(fit.a - predicted) / std::abs(predicted)
                                      : std::numeric_limits<double>::quiet_NaN();

  // Boundary points appended by augmentation sit after the interior groups, so
  // sub-clouds are only formed from proposals when the cloud is plain.
  const std::size_t groups = cloud.boundary_augmented ? 0 : cloud.groups();
  if (groups >= static_cast<std::size_t>(kSweepSubclouds)) {
    std::vector<double> sub;
    for (int s = 0; s < kSweepSubclouds; ++s) {
      const std::size_t lo = groups * static_cast<std::size_t>(s) / kSweepSubclouds;
      const std::size_t hi = groups * static_cast<std::size_t>(s + 1) / kSweepSubclouds;
      auto mu = level_medians(g, u, x, report.eps_list, cloud, lo, hi, cfg, backend);
      for (auto& v : mu) v -= q0;
      sub.push_back(fit_quadratic_cubic(report.eps_list, mu).a);
    }
    double mean = 0.0;
    for (double v : sub) mean += v;
    mean /= kSweepSubclouds;
    double ss = 0.0;
    for (double v : sub) ss += (v - mean) * (v - mean);
    report.fitted_std_error = std::sqrt(ss / (kSweepSubclouds - 1) / kSweepSubclouds);
  }
  return report;
}

}  // namespace

QuadraticModel QuadraticModel::zero(const GroupModel& g) {
  QuadraticModel m;
  const int v1 = g.horizontal_dim();
  m.xi = Eigen::VectorXd::Zero(v1);
  m.eta = Eigen::VectorXd::Zero(vertical_dim(g));
  m.A = Eigen::MatrixXd::Zero(v1, v1);
  m.x = Point::Zero(g.dim());
  return m;
}

void QuadraticModel::validate(const GroupModel& g) const {
  if (g.strat().step() > 2) throw UnsupportedModelError("quadratic models need step <= 2");
  const int v1 = g.horizontal_dim();
  if (xi.size() != v1 || A.rows() != v1 || A.cols() != v1) throw ContractError("xi and A must match V1");
  if (eta.size() != vertical_dim(g)) throw ContractError("eta must match V2");
  g.check_point(x);
  const double scale = std::max(1.0, A.cwiseAbs().maxCoeff());
  if ((A - A.transpose()).cwiseAbs().maxCoeff() > 1e-14 * scale) throw ContractError("A must be symmetric");
}

double eval_quadratic(const QuadraticModel& m, const GroupModel& g, const PointRef& y) {
  const Point w = g.multiply(g.inverse(m.x), y);
  const int v1 = g.horizontal_dim();
  const auto w1 = w.head(v1);
  double q = m.q0 + m.xi.dot(w1) + 0.5 * w1.dot(m.A * w1);
  if (m.eta.size() > 0) q += m.eta.dot(w.segment(v1, m.eta.size()));
  return q;
}

QuadraticModel quadratic_from_function(const GroupModel& g, const Field& u, const PointRef& x,
                                       std::optional<double> h) {
  if (g.strat().step() > 2) throw UnsupportedModelError("quadratic models need step <= 2");
  g.check_point(x);
  const double eps = std::numeric_limits<double>::epsilon();
  const double size = std::max(1.0, x.norm());
  const double h1 = h ? *h : std::cbrt(eps) * size;
  const double h2 = h ? *h : std::pow(eps, 0.25) * size;
  if (!(h1 > 0.0) || !std::isfinite(h1)) throw DomainError("finite-difference step must be positive");

  const int m = g.dim();
  const int v1 = g.horizontal_dim();
  const int v2 = vertical_dim(g);
  Point y(m);
  auto at = [&](const Eigen::VectorXd& step) {
    g.multiply_into(x, step, y);
    return u(y);
  };
  auto unit = [&](int i) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(m);
    e(i) = 1.0;
    return e;
  };
  auto first = [&](const Eigen::VectorXd& v) { return (at(h1 * v) - at(-h1 * v)) / (2.0 * h1); };
  const double u0 = u(x);
  auto second = [&](const Eigen::VectorXd& v) { return (at(h2 * v) - 2.0 * u0 + at(-h2 * v)) / (h2 * h2); };

  QuadraticModel model = QuadraticModel::zero(g);
  model.x = x;
  model.q0 = u0;
  for (int i = 0; i < v1; ++i) model.xi(i) = first(unit(i));
  for (int s = 0; s < v2; ++s) model.eta(s) = 2.0 * first(unit(v1 + s));
  for (int i = 0; i < v1; ++i) {
    model.A(i, i) = second(unit(i));
    for (int j = 0; j < i; ++j) {
      const double a = 0.25 * (second(unit(i) + unit(j)) - second(unit(i) - unit(j)));
      model.A(i, j) = a;
      model.A(j, i) = a;
    }
  }
  return model;
}

double normalized_p_laplacian(const QuadraticModel& m, double p) {
  require_p_above_one(p);
  const double xi_sq = m.xi.squaredNorm();
  if (xi_sq == 0.0) throw DegenerateGradientError("horizontal gradient vanishes");
  const double directional = m.xi.dot(m.A * m.xi) / xi_sq;
  if (std::isinf(p)) return directional;
  return m.A.trace() + (p - 2.0) * directional;
}

SweepReport expansion_sweep(const GroupModel& g, const QuadraticModel& m, double p, double eps0, int levels,
                            const QuadratureSpec& spec, const MedianConfig& cfg, Backend backend) {
  m.validate(g);
  require_p_above_one(p);
  const double predicted = expansion_coefficient(p, m.A, m.xi, g.strat());
  const Field q = [&](const PointRef& y) { return eval_quadratic(m, g, y); };
  return run_sweep(g, q, m.x, m.q0, predicted, p, eps0, levels, spec, cfg, backend);
}

SweepReport check_amvp(const GroupModel& g, const Field& u, const PointRef& x, double p, double eps0, int levels,
                       const QuadratureSpec& spec, const MedianConfig& cfg, Backend backend) {
  require_p_above_one(p);
  const QuadraticModel m = quadratic_from_function(g, u, x);
  const double predicted = expansion_coefficient(p, m.A, m.xi, g.strat());
  return run_sweep(g, u, x, m.q0, predicted, p, eps0, levels, spec, cfg, backend);
}

}  // namespace amvp
