#include "amvp/ballquad.hpp"

#include <cmath>
#include <limits>

#include "amvp/error.hpp"
#include "amvp/kernels.hpp"
#include "amvp/special.hpp"

namespace amvp {

namespace {

constexpr std::uint64_t kFeasibilityProposals = 10'000'000;
constexpr double kFeasibilityRatio = 1e-6;

using kernels::CompensatedSum;

struct BoxSampling {
  int dim = 1;
  double lower = -1.0;
  double upper = 1.0;
  std::function<bool(std::span<const double>)> accept;
};

SampleCloud draw_cloud(const Stratification& strat, const BoxSampling& box, const QuadratureSpec& spec,
                       bool reflect_layers, Backend backend) {
  spec.validate();
  const bool low_discrepancy = spec.method == SamplingMethod::low_discrepancy_rejection;
  kernels::RejectionTask task;
  task.dim = box.dim;
  task.lower = box.lower;
  task.upper = box.upper;
  task.accept = box.accept;
  task.n_proposals = spec.n_samples;
  task.seed = spec.seed;
  task.batch = spec.batch;
  task.low_discrepancy = low_discrepancy;
  task.replicates = low_discrepancy ? kLowDiscrepancyReplicates : 1;
  const auto raw = kernels::sample_rejection(task, backend);

  const std::size_t accepted = raw.replicate.size();
  if (raw.n_proposals >= kFeasibilityProposals &&
      static_cast<double>(accepted) < kFeasibilityRatio * static_cast<double>(raw.n_proposals))
    throw FeasibilityError("acceptance ratio below 1e-6 after " + std::to_string(raw.n_proposals) +
                           " proposals; the box is too large for the ball");

  SampleCloud cloud;
  cloud.strat = strat;
  cloud.n_proposals = raw.n_proposals;
  cloud.replicates = task.replicates;
  cloud.group_size = reflect_layers ? (1 << strat.step()) : 1;
  cloud.center = Point::Zero(box.dim);
  cloud.radius = 1.0;

  const auto g = static_cast<std::size_t>(cloud.group_size);
  cloud.points.resize(box.dim, static_cast<Eigen::Index>(accepted * g));
  for (std::size_t i = 0; i < accepted; ++i) {
    const Eigen::Map<const Eigen::VectorXd> z(raw.points.data() + i * static_cast<std::size_t>(box.dim), box.dim);
    for (std::size_t mask = 0; mask < g; ++mask) {
      auto col = cloud.points.col(static_cast<Eigen::Index>(i * g + mask));
      col = z;
      for (int j = 0; j < strat.step(); ++j)
        if (mask & (std::size_t{1} << j)) col.segment(strat.layer_offset(j), strat.layer_dim(j)) *= -1.0;
    }
  }
  if (cloud.replicates > 1) cloud.group_replicate = raw.replicate;

  const double box_volume = std::pow(box.upper - box.lower, box.dim);
  const double w = box_volume / (static_cast<double>(raw.n_proposals) * static_cast<double>(g));
  cloud.weights.assign(cloud.size(), w);
  cloud.values.assign(cloud.size(), 0.0);
  return cloud;
}

// Per-proposal contributions Y for the plain estimator; rejected proposals contribute 0.
template <typename Contribution>
Estimate proposal_estimate(const SampleCloud& cloud, Contribution&& contribution) {
  Estimate est;
  est.n = cloud.n_proposals;
  const std::size_t g = static_cast<std::size_t>(cloud.group_size);
  if (cloud.replicates == 1) {
    const double n = static_cast<double>(cloud.n_proposals);
    CompensatedSum total, squares;
    for (std::size_t grp = 0; grp < cloud.groups(); ++grp) {
      double y = 0.0;
      for (std::size_t i = grp * g; i < (grp + 1) * g; ++i) y += contribution(i);
      total.add(y);
      squares.add(y * y * n * n);
    }
    est.value = total.value();
    if (cloud.n_proposals > 1) {
      const double var = std::max(0.0, (squares.value() - n * est.value * est.value) / (n - 1.0));
      est.std_error = std::sqrt(var / n);
    }
    return est;
  }
  const auto r = static_cast<std::size_t>(cloud.replicates);
  std::vector<CompensatedSum> per_rep(r);
  for (std::size_t grp = 0; grp < cloud.groups(); ++grp)
    for (std::size_t i = grp * g; i < (grp + 1) * g; ++i) per_rep[cloud.group_replicate[grp]].add(contribution(i));
  CompensatedSum total;
  for (const auto& s : per_rep) total.add(s.value());
  est.value = total.value();
  double ss = 0.0;
  for (const auto& s : per_rep) {
    const double d = static_cast<double>(r) * s.value() - est.value;
    ss += d * d;
  }
  est.std_error = std::sqrt(ss / static_cast<double>(r - 1) / static_cast<double>(r));
  return est;
}

void check_values(const SampleCloud& cloud, std::span<const double> values) {
  if (values.size() != cloud.size()) throw ContractError("values are not aligned with the cloud");
  if (cloud.boundary_augmented) throw ContractError("cannot integrate over a boundary-augmented cloud");
}

BoxSampling ball_box(const Stratification& strat, double radius) {
  // Each layer term of the pseudonorm is at most radius^{2k!}, so
  // ||y^(j)|| <= radius^j and every coordinate lies in [-R, R].
  double extent = 1.0;
  for (int j = 1; j <= strat.step(); ++j) extent = std::max(extent, std::pow(radius, j));
  if (radius < 1.0) extent = radius;
  return {strat.total_dim(), -extent, extent, [strat, radius](std::span<const double> y) {
            return pseudonorm(strat, Eigen::Map<const Eigen::VectorXd>(y.data(), static_cast<Eigen::Index>(y.size()))) <=
                   radius;
          }};
}

}  // namespace

void QuadratureSpec::validate() const {
  if (n_samples < 1) throw DomainError("n_samples must be at least 1");
  if (batch < 1) throw DomainError("batch must be at least 1");
}

double Estimate::z_score(double reference) const {
  const double gap = value - reference;
  if (std_error > 0.0) return gap / std_error;
  if (gap == 0.0) return 0.0;
  return std::copysign(std::numeric_limits<double>::infinity(), gap);
}

double SampleCloud::volume_estimate() const {
  CompensatedSum acc;
  for (double w : weights) acc.add(w);
  return acc.value();
}

SampleCloud sample_unit_ball(const Stratification& strat, const QuadratureSpec& spec, Backend backend) {
  return draw_cloud(strat, ball_box(strat, 1.0), spec, spec.antithetic, backend);
}

SampleCloud sample_ball(const GroupModel& g, const PointRef& x, double eps, const QuadratureSpec& spec,
                        Backend backend) {
  if (!(eps > 0.0) || !std::isfinite(eps)) throw DomainError("ball radius must be positive");
  if (!g.has_arithmetic()) throw UnsupportedModelError("sample_ball needs a group with arithmetic");
  g.check_point(x);
  SampleCloud cloud = sample_unit_ball(g.strat(), spec, backend);
  Eigen::VectorXd scaled(g.dim());
  for (Eigen::Index i = 0; i < cloud.points.cols(); ++i) {
    dilate_into(g.strat(), eps, cloud.points.col(i), scaled);
    g.multiply_into(x, scaled, cloud.points.col(i));
  }
  const double jacobian = std::pow(eps, g.strat().hom_dim());
  for (double& w : cloud.weights) w *= jacobian;
  cloud.center = x;
  cloud.radius = eps;
  return cloud;
}

SampleCloud augment_with_boundary(const SampleCloud& unit_cloud) {
  if (unit_cloud.radius != 1.0 || !unit_cloud.center.isZero())
    throw ContractError("boundary augmentation expects a unit-ball cloud centred at 0");
  SampleCloud out = unit_cloud;
  const auto n = unit_cloud.points.cols();
  out.points.conservativeResize(Eigen::NoChange, 2 * n);
  Eigen::Index filled = n;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double r = pseudonorm(unit_cloud.strat, unit_cloud.points.col(i));
    if (r == 0.0) continue;
    dilate_into(unit_cloud.strat, 1.0 / r, unit_cloud.points.col(i), out.points.col(filled++));
  }
  out.points.conservativeResize(Eigen::NoChange, filled);
  const double w = unit_cloud.weights.empty() ? 1.0 : unit_cloud.weights.front();
  out.weights.assign(static_cast<std::size_t>(filled), w);
  out.values.assign(static_cast<std::size_t>(filled), 0.0);
  out.boundary_augmented = true;
  return out;
}

Estimate integrate(const SampleCloud& cloud, std::span<const double> values) {
  check_values(cloud, values);
  return proposal_estimate(cloud, [&](std::size_t i) { return cloud.weights[i] * values[i]; });
}

Estimate integrate_ratio(const SampleCloud& cloud, std::span<const double> numerator,
                         std::span<const double> denominator) {
  check_values(cloud, numerator);
  check_values(cloud, denominator);
  const Estimate num = integrate(cloud, numerator);
  const Estimate den = integrate(cloud, denominator);
  if (den.value == 0.0) throw DomainError("ratio denominator integrates to zero");
  Estimate est;
  est.n = cloud.n_proposals;
  est.value = num.value / den.value;
  if (cloud.replicates == 1) {
    // Linearised residual num - ratio * den has mean zero by construction.
    const Estimate residual = proposal_estimate(
        cloud, [&](std::size_t i) { return cloud.weights[i] * (numerator[i] - est.value * denominator[i]); });
    est.std_error = residual.std_error / std::abs(den.value);
    return est;
  }
  const auto r = static_cast<std::size_t>(cloud.replicates);
  const std::size_t g = static_cast<std::size_t>(cloud.group_size);
  std::vector<CompensatedSum> rep_num(r), rep_den(r);
  for (std::size_t grp = 0; grp < cloud.groups(); ++grp) {
    const auto rep = cloud.group_replicate[grp];
    for (std::size_t i = grp * g; i < (grp + 1) * g; ++i) {
      rep_num[rep].add(cloud.weights[i] * numerator[i]);
      rep_den[rep].add(cloud.weights[i] * denominator[i]);
    }
  }
  std::vector<double> ratios;
  for (std::size_t k = 0; k < r; ++k)
    if (rep_den[k].value() != 0.0) ratios.push_back(rep_num[k].value() / rep_den[k].value());
  if (ratios.size() > 1) {
    double mean = 0.0;
    for (double x : ratios) mean += x;
    mean /= static_cast<double>(ratios.size());
    double ss = 0.0;
    for (double x : ratios) ss += (x - mean) * (x - mean);
    const double m = static_cast<double>(ratios.size());
    est.std_error = std::sqrt(ss / (m - 1.0) / m);
  }
  return est;
}

double singular_weight(double y1, double p) {
  if (p == 2.0) return 1.0;
  const double a = std::abs(y1);
  if (p < 2.0 && a < kSingularCutoff) return 0.0;
  return std::pow(a, p - 2.0);
}

Estimate gamma0_numeric(const Stratification& strat, double p, const Eigen::MatrixXd& C, const Eigen::VectorXd& eta,
                        const QuadratureSpec& spec, Backend backend) {
  require_p_above_one(p);
  if (std::isinf(p)) throw DomainError("gamma0_numeric needs finite p");
  const int v1 = strat.layer_dim(0);
  const int v2 = strat.step() >= 2 ? strat.layer_dim(1) : 0;
  if (C.rows() != v1 || C.cols() != v1) throw ContractError("C must be v1 x v1");
  if ((C - C.transpose()).cwiseAbs().maxCoeff() > 1e-14 * std::max(1.0, C.cwiseAbs().maxCoeff()))
    throw ContractError("C must be symmetric");
  if (eta.size() != v2) throw ContractError("eta must have the dimension of the second layer");

  const SampleCloud cloud = sample_unit_ball(strat, spec, backend);
  std::vector<double> num(cloud.size()), den(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto y = cloud.points.col(static_cast<Eigen::Index>(i));
    const double w = singular_weight(y(0), p);
    double g = 0.5 * y.head(v1).dot(C * y.head(v1));
    if (v2 > 0) g += eta.dot(y.segment(v1, v2));
    num[i] = w * g;
    den[i] = w;
  }
  return integrate_ratio(cloud, num, den);
}

Estimate moment_I_numeric(const Stratification& strat, double p, const QuadratureSpec& spec, Backend backend) {
  require_p_above_one(p);
  if (std::isinf(p)) throw DomainError("moment_I_numeric needs finite p");
  const SampleCloud cloud = sample_unit_ball(strat, spec, backend);
  std::vector<double> values(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) values[i] = singular_weight(cloud.points(0, static_cast<Eigen::Index>(i)), p);
  return integrate(cloud, values);
}

Estimate ball_volume_numeric(const Stratification& strat, double radius, const QuadratureSpec& spec,
                             Backend backend) {
  if (!(radius > 0.0) || !std::isfinite(radius)) throw DomainError("radius must be positive");
  const SampleCloud cloud = draw_cloud(strat, ball_box(strat, radius), spec, spec.antithetic, backend);
  const std::vector<double> ones(cloud.size(), 1.0);
  return integrate(cloud, ones);
}

Estimate dirichlet_oracle(std::span<const double> alphas, const QuadratureSpec& spec, Backend backend) {
  if (alphas.empty()) throw ContractError("dirichlet_oracle needs at least one exponent");
  for (double a : alphas)
    if (!(a > -1.0) || !std::isfinite(a)) throw DomainError("dirichlet exponents must exceed -1");
  const int n = static_cast<int>(alphas.size());
  BoxSampling box{n, 0.0, 1.0, [](std::span<const double> x) {
                    double r2 = 0.0;
                    for (double xi : x) r2 += xi * xi;
                    return r2 < 1.0;
                  }};
  const SampleCloud cloud = draw_cloud(Stratification({n}), box, spec, false, backend);
  std::vector<double> values(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    double f = 1.0;
    for (int d = 0; d < n; ++d) f *= std::pow(cloud.points(d, static_cast<Eigen::Index>(i)), alphas[static_cast<std::size_t>(d)]);
    values[i] = f;
  }
  return integrate(cloud, values);
}

}  // namespace amvp
