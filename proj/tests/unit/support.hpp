#pragma once

#include <random>
#include <vector>

#include <Eigen/Core>

#include "amvp/ballquad.hpp"
#include "amvp/group.hpp"

namespace amvp::testing {

inline std::mt19937_64& rng() {
  static std::mt19937_64 engine(20240611);
  return engine;
}

inline double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng()); }

inline Eigen::VectorXd random_vector(int n, double scale = 1.0) {
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = uniform(-scale, scale);
  return v;
}

inline Eigen::MatrixXd random_symmetric(int n) {
  Eigen::MatrixXd a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) a(i, j) = a(j, i) = uniform(-1.0, 1.0);
  return a;
}

inline Eigen::MatrixXd random_skew(int n) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < i; ++j) {
      a(i, j) = uniform(-2.0, 2.0);
      a(j, i) = -a(i, j);
    }
  return a;
}

/// Step-2 group on R^3 x R^2 with random skew tensors.
inline GroupModel random_step2() { return GroupModel::step2(3, {random_skew(3), random_skew(3)}); }

inline QuadratureSpec spec(std::uint64_t n, std::uint64_t seed, bool antithetic = false) {
  QuadratureSpec s;
  s.n_samples = n;
  s.seed = seed;
  s.antithetic = antithetic;
  return s;
}

}  // namespace amvp::testing
