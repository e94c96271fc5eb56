#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "amvp/backend.hpp"
#include "amvp/group.hpp"
#include "amvp/median.hpp"

namespace amvp {

/// Regular lattice over an axis-aligned box in exponential coordinates.
class GridDomain {
 public:
  GridDomain(GroupModel g, Eigen::VectorXd lower, Eigen::VectorXd upper, Eigen::VectorXd h);
  /// Same spacing in every coordinate.
  GridDomain(GroupModel g, Eigen::VectorXd lower, Eigen::VectorXd upper, double h);

  const GroupModel& group() const { return g_; }
  const Eigen::VectorXd& lower() const { return lower_; }
  const Eigen::VectorXd& upper() const { return upper_; }
  const Eigen::VectorXd& spacing() const { return h_; }
  const std::vector<std::size_t>& shape() const { return shape_; }
  std::size_t size() const { return size_; }

  Point node(std::size_t index) const;
  std::vector<std::size_t> multi_index(std::size_t index) const;
  std::size_t linear_index(const std::vector<std::size_t>& idx) const;

 private:
  GroupModel g_;
  Eigen::VectorXd lower_, upper_, h_;
  std::vector<std::size_t> shape_;
  std::size_t size_ = 0;
};

struct SolverConfig {
  double p = 2.0;
  double eps = 0.0;
  double tol_sup = 1e-8;
  std::uint64_t max_iters = 100000;
  double damping = 1.0;

  void validate() const;
};

/// Interior nodes and their eps-ball stencils in compressed-row form; every
/// other node belongs to the boundary collar.
struct StencilTable {
  std::vector<std::size_t> interior;
  std::vector<std::size_t> collar;
  /// Stencil of interior[i] is indices[offsets[i] .. offsets[i+1]).
  std::vector<std::size_t> offsets;
  std::vector<std::size_t> indices;
  /// Counting-measure weights, all 1.
  std::vector<double> weights;

  std::size_t stencil_size(std::size_t i) const { return offsets[i + 1] - offsets[i]; }
};

/// A node is interior when the closed ball B(x, eps) stays inside the box;
/// its stencil lists the lattice nodes y with d(x, y) <= eps.
StencilTable build_stencils(const GridDomain& dom, const SolverConfig& cfg);

struct RelaxResult {
  std::vector<double> field;
  double sup_change = 0.0;
};

/// One Jacobi step u <- (1 - theta) u + theta mu_p over each interior stencil.
RelaxResult relax_once(std::span<const double> field, const StencilTable& stencils, const SolverConfig& cfg,
                       Backend backend = kDefaultBackend);

/// max over interior nodes of |u - mu_p(eps, u)|.
double fixed_point_residual(std::span<const double> field, const StencilTable& stencils, const SolverConfig& cfg,
                            Backend backend = kDefaultBackend);

struct SolveReport {
  std::vector<double> field;
  std::uint64_t iterations = 0;
  double final_sup_change = 0.0;
  double residual_max = 0.0;
  bool converged = false;
  /// sup-change threshold actually used: tol_sup * damping * min(1, data range).
  double threshold = 0.0;
  double data_min = 0.0;
  double data_max = 0.0;
  std::size_t n_interior = 0;
  std::size_t n_collar = 0;
};

/// Iterates relax_once from `initial` with the collar pinned to `boundary`
/// until the sup-change drops below the threshold or max_iters is reached.
SolveReport solve(const GridDomain& dom, const Field& boundary, const Field& initial, const SolverConfig& cfg,
                  Backend backend = kDefaultBackend);
SolveReport solve(const GridDomain& dom, const Field& boundary, double initial, const SolverConfig& cfg,
                  Backend backend = kDefaultBackend);

/// Built-in boundary data by name: `saddle` (y1^2 - y2^2), `linear` (y1),
/// `constant:<c>`.
Field named_boundary(const std::string& id);

}  // namespace amvp
