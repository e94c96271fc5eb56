#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace amvp {

/// A point of R^m in exponential coordinates, layers stored consecutively.
using Point = Eigen::VectorXd;
using PointRef = Eigen::Ref<const Eigen::VectorXd>;

/// Layer dimensions (v_1, ..., v_k) of a stratified Lie algebra and the
/// quantities derived from them.
class Stratification {
 public:
  explicit Stratification(std::vector<int> layer_dims);

  int step() const { return static_cast<int>(layer_dims_.size()); }
  int total_dim() const { return offsets_.back(); }
  int layer_dim(int layer) const { return layer_dims_.at(static_cast<std::size_t>(layer)); }
  /// First coordinate index of `layer` (0-based layer, so layer 0 is V_1).
  int layer_offset(int layer) const { return offsets_.at(static_cast<std::size_t>(layer)); }
  const std::vector<int>& layer_dims() const { return layer_dims_; }
  /// Per-coordinate homogeneity sigma_j (1-based layer number of coordinate j).
  const std::vector<int>& homogeneity() const { return homogeneity_; }
  /// Homogeneous dimension Q = sum_i i * v_i.
  int hom_dim() const { return hom_dim_; }
  /// 2 * k!, the common exponent of the pseudonorm.
  double norm_exponent() const { return norm_exponent_; }

  bool operator==(const Stratification& other) const { return layer_dims_ == other.layer_dims_; }

  std::string to_string() const;

 private:
  std::vector<int> layer_dims_;
  std::vector<int> offsets_;
  std::vector<int> homogeneity_;
  int hom_dim_ = 0;
  double norm_exponent_ = 2.0;
};

/// Pseudonorm |x| = (sum_j ||x^(j)||^{2k!/j})^{1/(2k!)}; needs only the stratification.
double pseudonorm(const Stratification& strat, const PointRef& x);

/// Dilation delta_lambda: layer-j coordinates scale by lambda^j.
Point dilate(const Stratification& strat, double lambda, const PointRef& x);
void dilate_into(const Stratification& strat, double lambda, const PointRef& x,
                 Eigen::Ref<Eigen::VectorXd> out);

/// A concrete Carnot group. Euclidean, Heisenberg and generic step-2 models
/// carry a multiplication law; a stratification-only model supports dilations,
/// pseudonorms and ball integrals for any step but no group arithmetic.
///
/// Step-2 law in exponential coordinates, with skew-symmetric B_s:
///   (x*y)^(1)   = x^(1) + y^(1)
///   (x*y)^(2)_s = x^(2)_s + y^(2)_s + <B_s x^(1), y^(1)>
class GroupModel {
 public:
  enum class Kind { euclidean, heisenberg, step2, stratified };

  static GroupModel euclidean(int n);
  /// H_n with coordinates (x_1..x_n, y_1..y_n, t); H_1 is (z, t) with
  /// (z1,t1)(z2,t2) = (z1+z2, t1+t2+2 Im(z1 conj z2)).
  static GroupModel heisenberg(int n);
  /// Generic step-2 group; every tensor must be n x n and skew-symmetric.
  static GroupModel step2(int n, std::vector<Eigen::MatrixXd> tensors);
  /// Any stratification; arithmetic operations throw UnsupportedModelError
  /// unless the step is 1.
  static GroupModel stratified(Stratification strat);

  Kind kind() const { return kind_; }
  const Stratification& strat() const { return strat_; }
  int dim() const { return strat_.total_dim(); }
  int horizontal_dim() const { return strat_.layer_dim(0); }
  bool has_arithmetic() const { return kind_ != Kind::stratified || strat_.step() == 1; }
  const std::vector<Eigen::MatrixXd>& tensors() const { return tensors_; }
  std::string name() const;

  Point multiply(const PointRef& x, const PointRef& y) const;
  void multiply_into(const PointRef& x, const PointRef& y, Eigen::Ref<Eigen::VectorXd> out) const;
  Point inverse(const PointRef& x) const;
  Point dilate(double lambda, const PointRef& x) const { return amvp::dilate(strat_, lambda, x); }
  double pseudonorm(const PointRef& x) const { return amvp::pseudonorm(strat_, x); }
  /// d(x, y) = |y^{-1} x|.
  double distance(const PointRef& x, const PointRef& y) const;

  /// Left-invariant horizontal fields X_1..X_{v_1} at x; column i holds the
  /// coefficients of X_i against d/dx_1..d/dx_m.
  Eigen::MatrixXd horizontal_frame(const PointRef& x) const;

  void check_point(const PointRef& x) const;

 private:
  GroupModel(Kind kind, Stratification strat, std::vector<Eigen::MatrixXd> tensors);
  void require_arithmetic(const char* op) const;

  Kind kind_;
  Stratification strat_;
  std::vector<Eigen::MatrixXd> tensors_;
};

/// Parses the group text format, e.g. `group=euclidean n=3`,
/// `group=heisenberg n=1`, `group=step2 n=2 k=1 B1=0,1;-1,0`, or the
/// stratification-only form `group=stratified layers=2,1,1`.
GroupModel parse_group_spec(const std::string& text);

/// Inverse of parse_group_spec.
std::string format_group_spec(const GroupModel& g);

/// Parses a row-major matrix written as `a,b;c,d`.
Eigen::MatrixXd parse_matrix(const std::string& text);
/// Parses a comma-separated list of reals.
std::vector<double> parse_real_list(const std::string& text);

}  // namespace amvp
