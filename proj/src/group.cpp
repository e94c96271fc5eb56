#include "amvp/group.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "amvp/error.hpp"

namespace amvp {

Stratification::Stratification(std::vector<int> layer_dims) : layer_dims_(std::move(layer_dims)) {
  if (layer_dims_.empty()) throw ContractError("stratification needs at least one layer");
  offsets_.push_back(0);
  double factorial = 1.0;
  for (std::size_t i = 0; i < layer_dims_.size(); ++i) {
    const int v = layer_dims_[i];
    if (v < 1) throw ContractError("layer dimensions must be positive");
    const int layer = static_cast<int>(i) + 1;
    offsets_.push_back(offsets_.back() + v);
    homogeneity_.insert(homogeneity_.end(), static_cast<std::size_t>(v), layer);
    hom_dim_ += layer * v;
    factorial *= layer;
  }
  norm_exponent_ = 2.0 * factorial;
}

std::string Stratification::to_string() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < layer_dims_.size(); ++i) os << (i ? "," : "") << layer_dims_[i];
  return os.str();
}

double pseudonorm(const Stratification& strat, const PointRef& x) {
  if (x.size() != strat.total_dim()) throw ContractError("point dimension does not match stratification");
  // r_j = ||x^(j)||^{1/j} is homogeneous of degree one; factor out the largest
  // so the 2k!-th powers stay representable.
  const int k = strat.step();
  std::vector<double> r(static_cast<std::size_t>(k));
  double largest = 0.0;
  for (int j = 0; j < k; ++j) {
    const auto layer = x.segment(strat.layer_offset(j), strat.layer_dim(j));
    double layer_norm = layer.norm();
    if (!std::isfinite(layer_norm) || layer_norm < 1e-150) layer_norm = layer.stableNorm();
    r[static_cast<std::size_t>(j)] = std::pow(layer_norm, 1.0 / (j + 1));
    largest = std::max(largest, r[static_cast<std::size_t>(j)]);
  }
  if (largest == 0.0) return 0.0;
  const double e = strat.norm_exponent();
  double sum = 0.0;
  for (double rj : r) sum += std::pow(rj / largest, e);
  return largest * std::pow(sum, 1.0 / e);
}

void dilate_into(const Stratification& strat, double lambda, const PointRef& x,
                 Eigen::Ref<Eigen::VectorXd> out) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw DomainError("dilation factor must be positive");
  if (x.size() != strat.total_dim() || out.size() != x.size())
    throw ContractError("point dimension does not match stratification");
  double scale = 1.0;
  for (int j = 0; j < strat.step(); ++j) {
    scale *= lambda;
    out.segment(strat.layer_offset(j), strat.layer_dim(j)) =
        scale * x.segment(strat.layer_offset(j), strat.layer_dim(j));
  }
}

Point dilate(const Stratification& strat, double lambda, const PointRef& x) {
  Point out(x.size());
  dilate_into(strat, lambda, x, out);
  return out;
}

GroupModel::GroupModel(Kind kind, Stratification strat, std::vector<Eigen::MatrixXd> tensors)
    : kind_(kind), strat_(std::move(strat)), tensors_(std::move(tensors)) {}

GroupModel GroupModel::euclidean(int n) {
  if (n < 1) throw ContractError("euclidean dimension must be positive");
  return GroupModel(Kind::euclidean, Stratification({n}), {});
}

GroupModel GroupModel::heisenberg(int n) {
  if (n < 1) throw ContractError("heisenberg index must be positive");
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  b.topRightCorner(n, n) = 2.0 * Eigen::MatrixXd::Identity(n, n);
  b.bottomLeftCorner(n, n) = -2.0 * Eigen::MatrixXd::Identity(n, n);
  return GroupModel(Kind::heisenberg, Stratification({2 * n, 1}), {b});
}

GroupModel GroupModel::step2(int n, std::vector<Eigen::MatrixXd> tensors) {
  if (n < 1) throw ContractError("step-2 horizontal dimension must be positive");
  if (tensors.empty()) throw ContractError("step-2 model needs at least one tensor");
  for (const auto& b : tensors) {
    if (b.rows() != n || b.cols() != n) throw ContractError("step-2 tensor must be n x n");
    if (!b.allFinite()) throw DomainError("step-2 tensor entries must be finite");
    const double scale = std::max(1.0, b.cwiseAbs().maxCoeff());
    if ((b + b.transpose()).cwiseAbs().maxCoeff() > 1e-14 * scale)
      throw ContractError("step-2 tensors must be skew-symmetric");
  }
  const int k = static_cast<int>(tensors.size());
  return GroupModel(Kind::step2, Stratification({n, k}), std::move(tensors));
}

GroupModel GroupModel::stratified(Stratification strat) {
  return GroupModel(Kind::stratified, std::move(strat), {});
}

std::string GroupModel::name() const {
  switch (kind_) {
    case Kind::euclidean: return "euclidean";
    case Kind::heisenberg: return "heisenberg";
    case Kind::step2: return "step2";
    case Kind::stratified: return "stratified";
  }
  return "unknown";
}

void GroupModel::check_point(const PointRef& x) const {
  if (x.size() != dim()) throw ContractError("point dimension does not match group");
}

void GroupModel::require_arithmetic(const char* op) const {
  if (!has_arithmetic())
    throw UnsupportedModelError(std::string(op) + " is not available for step " +
                                std::to_string(strat_.step()) + " stratification-only models");
}

void GroupModel::multiply_into(const PointRef& x, const PointRef& y, Eigen::Ref<Eigen::VectorXd> out) const {
  require_arithmetic("multiply");
  check_point(x);
  check_point(y);
  if (out.size() != dim()) throw ContractError("output dimension does not match group");
  const int n = horizontal_dim();
  if (tensors_.empty()) {
    out = x + y;
    return;
  }
  // out may alias x or y; read everything needed first.
  Eigen::VectorXd correction(static_cast<Eigen::Index>(tensors_.size()));
  for (std::size_t s = 0; s < tensors_.size(); ++s)
    correction(static_cast<Eigen::Index>(s)) = (tensors_[s] * x.head(n)).dot(y.head(n));
  out = x + y;
  out.tail(correction.size()) += correction;
}

Point GroupModel::multiply(const PointRef& x, const PointRef& y) const {
  Point out(dim());
  multiply_into(x, y, out);
  return out;
}

Point GroupModel::inverse(const PointRef& x) const {
  require_arithmetic("inverse");
  check_point(x);
  return -x;
}

double GroupModel::distance(const PointRef& x, const PointRef& y) const {
  return pseudonorm(multiply(inverse(y), x));
}

Eigen::MatrixXd GroupModel::horizontal_frame(const PointRef& x) const {
  require_arithmetic("horizontal_frame");
  check_point(x);
  const int n = horizontal_dim();
  Eigen::MatrixXd frame = Eigen::MatrixXd::Zero(dim(), n);
  frame.topRows(n).setIdentity();
  // d/ds (x * s e_i) at s = 0 adds (B_s x^(1))_i to vertical coordinate s.
  for (std::size_t s = 0; s < tensors_.size(); ++s) {
    const Eigen::VectorXd bx = tensors_[s] * x.head(n);
    frame.row(n + static_cast<Eigen::Index>(s)) = bx.transpose();
  }
  return frame;
}

}  // namespace amvp
