#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "amvp/error.hpp"
#include "amvp/median.hpp"
#include "amvp/special.hpp"
#include "support.hpp"

using namespace amvp;
using amvp::testing::uniform;

namespace {

MedianConfig cfg(double p) {
  MedianConfig c;
  c.p = p;
  return c;
}

std::vector<double> random_values(std::size_t n, double lo = -3.0, double hi = 3.0) {
  std::vector<double> v(n);
  for (auto& x : v) x = uniform(lo, hi);
  return v;
}

double lp_cost(const std::vector<double>& v, const std::vector<double>& w, double lambda, double p) {
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) s += (w.empty() ? 1.0 : w[i]) * std::pow(std::abs(v[i] - lambda), p);
  return s;
}

const std::vector<double> kNoWeights;

}  // namespace

TEST(MuSamples, Examples) {
  EXPECT_EQ(mu_p_samples(std::vector<double>{-1, 3}, kNoWeights, cfg(kInfinity)), 1.0);
  EXPECT_NEAR(mu_p_samples(std::vector<double>{1, 2, 3, 6}, kNoWeights, cfg(2.0)), 3.0, 1e-15);
  EXPECT_NEAR(mu_p_samples(std::vector<double>{0, 0, 1}, kNoWeights, cfg(3.0)), std::sqrt(2.0) - 1.0, 1e-12);
  EXPECT_EQ(mu_p_samples(std::vector<double>{5}, kNoWeights, cfg(4.0)), 5.0);
}

TEST(MuSamples, LowerWeightedMedianAtOne) {
  EXPECT_EQ(mu_p_samples(std::vector<double>{4, 1, 3, 2}, kNoWeights, cfg(1.0)), 2.0);
  EXPECT_EQ(mu_p_samples(std::vector<double>{4, 1, 3}, kNoWeights, cfg(1.0)), 3.0);
  EXPECT_EQ(mu_p_samples(std::vector<double>{0, 10}, std::vector<double>{1, 3}, cfg(1.0)), 10.0);
}

TEST(MuSamples, WeightedMeanAtTwo) {
  EXPECT_NEAR(mu_p_samples(std::vector<double>{0, 10}, std::vector<double>{1, 3}, cfg(2.0)), 7.5, 1e-14);
}

TEST(MuSamples, Errors) {
  EXPECT_THROW(mu_p_samples(std::vector<double>{}, kNoWeights, cfg(2.0)), DomainError);
  EXPECT_THROW(mu_p_samples(std::vector<double>{1, 2}, std::vector<double>{1}, cfg(2.0)), ContractError);
  EXPECT_THROW(mu_p_samples(std::vector<double>{1, 2}, std::vector<double>{1, 0}, cfg(2.0)), DomainError);
  EXPECT_THROW(mu_p_samples(std::vector<double>{1, NAN}, kNoWeights, cfg(2.0)), DomainError);
  EXPECT_THROW(mu_p_samples(std::vector<double>{1}, kNoWeights, cfg(0.5)), DomainError);
  MedianConfig bad = cfg(3.0);
  bad.tol_lambda = 0.0;
  EXPECT_THROW(bad.validate(), DomainError);
  bad = cfg(3.0);
  bad.max_bisect = 0;
  EXPECT_THROW(bad.validate(), DomainError);
  EXPECT_THROW(median_residual(std::vector<double>{1}, kNoWeights, 0.0, 1.0), DomainError);
}

TEST(MuSamplesProperty, WithinRangeAndEquivariant) {
  for (double p : {1.0, 1.3, 2.0, 3.0, 5.5, 12.0, kInfinity}) {
    for (int trial = 0; trial < 60; ++trial) {
      const auto v = random_values(1 + static_cast<std::size_t>(uniform(0, 40)));
      std::vector<double> w(v.size());
      for (auto& x : w) x = uniform(0.1, 2.0);
      const double mu = mu_p_samples(v, w, cfg(p));
      const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
      EXPECT_GE(mu, *lo);
      EXPECT_LE(mu, *hi);

      // affine equivariance: mu(a u + b) = a mu(u) + b
      const double a = uniform(-4.0, 4.0), b = uniform(-10.0, 10.0);
      std::vector<double> t(v.size());
      std::transform(v.begin(), v.end(), t.begin(), [&](double x) { return a * x + b; });
      const double scale = 1e-10 * (std::abs(a) + 1.0) * (std::abs(b) + 4.0);
      if (p != 1.0) EXPECT_NEAR(mu_p_samples(t, w, cfg(p)), a * mu + b, scale) << "p=" << p;

      // weight normalization does not matter
      std::vector<double> w2(w);
      for (auto& x : w2) x *= 7.25;
      EXPECT_NEAR(mu_p_samples(v, w2, cfg(p)), mu, 1e-11) << "p=" << p;
    }
  }
}

TEST(MuSamplesProperty, MonotoneInData) {
  for (double p : {1.0, 1.5, 2.0, 4.0, kInfinity}) {
    for (int trial = 0; trial < 60; ++trial) {
      const auto v = random_values(25);
      auto bumped = v;
      for (auto& x : bumped) x += uniform(0.0, 0.5);
      EXPECT_LE(mu_p_samples(v, kNoWeights, cfg(p)), mu_p_samples(bumped, kNoWeights, cfg(p)) + 1e-12);
    }
  }
}

TEST(MuSamplesProperty, MinimizesTheLpCost) {
  for (double p : {1.2, 1.8, 2.5, 3.0, 7.0}) {
    for (int trial = 0; trial < 40; ++trial) {
      const auto v = random_values(30);
      const double mu = mu_p_samples(v, kNoWeights, cfg(p));
      const double best = lp_cost(v, {}, mu, p);
      for (double d : {-1e-3, 1e-3, -0.1, 0.1}) EXPECT_LE(best, lp_cost(v, {}, mu + d, p) * (1 + 1e-12));
      const double F = median_residual(v, kNoWeights, mu, p);
      EXPECT_LE(std::abs(F), 1e-9 * median_residual_scale(v, kNoWeights, mu, p)) << "p=" << p;
    }
  }
}

TEST(MuSamplesProperty, ResidualIsDecreasing) {
  const auto v = random_values(50);
  double previous = median_residual(v, kNoWeights, -4.0, 3.0);
  for (double lambda = -3.9; lambda < 4.0; lambda += 0.1) {
    const double F = median_residual(v, kNoWeights, lambda, 3.0);
    EXPECT_LT(F, previous);
    previous = F;
  }
}

TEST(WeightedLpDistance, Fixtures) {
  EXPECT_NEAR(weighted_lp_distance(std::vector<double>{1, -2}, kNoWeights, 0.0, 2.0), std::sqrt(5.0), 1e-15);
  EXPECT_EQ(weighted_lp_distance(std::vector<double>{1, -2}, kNoWeights, 0.0, kInfinity), 2.0);
  EXPECT_NEAR(weighted_lp_distance(std::vector<double>{3}, std::vector<double>{8}, 1.0, 3.0), 4.0, 1e-14);
}

TEST(MuSamples, SerialEqualsOpenMP) {
  const auto v = random_values(200000);
  for (double p : {1.5, 3.0, 6.0}) {
    EXPECT_EQ(mu_p_samples(v, kNoWeights, cfg(p), Backend::serial), mu_p_samples(v, kNoWeights, cfg(p), Backend::openmp));
  }
}

TEST(MuBall, ConstantField) {
  const GroupModel h = GroupModel::heisenberg(1);
  const SampleCloud cloud = sample_unit_ball(h.strat(), amvp::testing::spec(20000, 1));
  const Field seven = [](const PointRef&) { return 7.0; };
  for (double p : {1.0, 1.5, 2.0, 3.0, kInfinity})
    EXPECT_EQ(mu_p_ball(h, seven, Eigen::Vector3d(0.1, 0.2, 0.3), 0.25, cloud, cfg(p)), 7.0);
}

TEST(MuBall, LinearHorizontalFieldIsExactWithAntitheticCloud) {
  const GroupModel h = GroupModel::heisenberg(1);
  const SampleCloud cloud = sample_unit_ball(h.strat(), amvp::testing::spec(20000, 2, true));
  const Eigen::Vector3d x(0.4, -0.3, 1.0);
  // u(y) = <xi, (x^{-1} y)^(1)> is odd on the ball around x
  const Field u = [&](const PointRef& y) { return 1.5 * (y(0) - x(0)) - 0.7 * (y(1) - x(1)); };
  for (double p : {1.5, 2.0, 3.0, 8.0, kInfinity})
    EXPECT_NEAR(mu_p_ball(h, u, x, 0.3, cloud, cfg(p)), 0.0, 1e-12) << "p=" << p;
}

TEST(MuBall, QuadraticExpansionInHeisenberg) {
  // u = x1 + x1^2 at the identity: xi = e1, A = diag(2, 0).
  const GroupModel h = GroupModel::heisenberg(1);
  const SampleCloud cloud = sample_unit_ball(h.strat(), amvp::testing::spec(2000000, 3, true));
  const Field u = [](const PointRef& y) { return y(0) + y(0) * y(0); };
  const double eps = 0.1;
  const double mu = mu_p_ball(h, u, Eigen::Vector3d::Zero(), eps, cloud, cfg(3.0));
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(2, 2);
  A(0, 0) = 2.0;
  const double predicted = expansion_coefficient(3.0, A, Eigen::Vector2d(1, 0), h.strat()) * eps * eps;
  EXPECT_NEAR(mu / predicted, 1.0, 0.05);
}

TEST(MuBall, EuclideanMatchesDirectEvaluation) {
  const GroupModel e = GroupModel::euclidean(2);
  const SampleCloud cloud = sample_unit_ball(e.strat(), amvp::testing::spec(5000, 4));
  const Eigen::Vector2d x(0.2, 0.5);
  const Field u = [](const PointRef& y) { return std::sin(3 * y(0)) + y(1) * y(1); };
  std::vector<double> direct(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i)
    direct[i] = u(x + 0.2 * cloud.points.col(static_cast<Eigen::Index>(i)));
  for (double p : {1.5, 2.0, 4.0, kInfinity})
    EXPECT_NEAR(mu_p_ball(e, u, x, 0.2, cloud, cfg(p)), mu_p_samples(direct, cloud.weights, cfg(p)), 1e-12);
}

TEST(MuBall, SpecOverloadMatchesCloudOverload) {
  const GroupModel h = GroupModel::heisenberg(1);
  const auto s = amvp::testing::spec(10000, 5);
  const SampleCloud cloud = sample_unit_ball(h.strat(), s);
  const Field u = [](const PointRef& y) { return y(2) + y(0) * y(1); };
  const Eigen::Vector3d x(0.1, 0.1, 0.1);
  EXPECT_EQ(mu_p_ball(h, u, x, 0.3, s, cfg(3.0)), mu_p_ball(h, u, x, 0.3, cloud, cfg(3.0)));
}

TEST(MuBall, Errors) {
  const GroupModel h = GroupModel::heisenberg(1);
  const Field u = [](const PointRef&) { return 0.0; };
  const SampleCloud cloud = sample_unit_ball(h.strat(), amvp::testing::spec(100, 1));
  EXPECT_THROW(mu_p_ball(h, u, Eigen::Vector3d::Zero(), 0.0, cloud, cfg(2.0)), DomainError);
  const SampleCloud disk = sample_unit_ball(Stratification({2}), amvp::testing::spec(100, 1));
  EXPECT_THROW(mu_p_ball(h, u, Eigen::Vector3d::Zero(), 0.1, disk, cfg(2.0)), ContractError);
  const GroupModel s3 = GroupModel::stratified(Stratification({2, 1, 1}));
  EXPECT_THROW(mu_p_ball(s3, u, Eigen::Vector4d::Zero(), 0.1, amvp::testing::spec(100, 1), cfg(2.0)),
               UnsupportedModelError);
  SampleCloud empty = cloud;
  empty.points.resize(3, 0);
  empty.values.clear();
  empty.weights.clear();
  EXPECT_THROW(mu_p_ball(h, u, Eigen::Vector3d::Zero(), 0.1, empty, cfg(2.0)), FeasibilityError);
}
