#include "amvp/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "amvp/error.hpp"
#include "amvp/kernels.hpp"

namespace amvp {

namespace {

constexpr std::size_t kMaxNodes = 50'000'000;

// Half-widths of the coordinate box containing B(x, eps).
Eigen::VectorXd ball_extent(const GroupModel& g, const PointRef& x, double eps) {
  const int v1 = g.horizontal_dim();
  Eigen::VectorXd ext = Eigen::VectorXd::Constant(g.dim(), eps);
  const auto& tensors = g.tensors();
  for (std::size_t s = 0; s < tensors.size(); ++s) {
    const double twist = (tensors[s] * x.head(v1)).norm();
    ext(v1 + static_cast<Eigen::Index>(s)) = eps * eps + eps * twist;
  }
  return ext;
}

MedianConfig median_config(const SolverConfig& cfg) {
  MedianConfig m;
  m.p = cfg.p;
  return m;
}

double stencil_median(std::span<const double> field, const StencilTable& st, std::size_t row,
                      std::vector<double>& scratch, const MedianConfig& mcfg) {
  const std::size_t begin = st.offsets[row];
  const std::size_t k = st.offsets[row + 1] - begin;
  scratch.resize(k);
  for (std::size_t j = 0; j < k; ++j) scratch[j] = field[st.indices[begin + j]];
  return mu_p_samples(scratch, std::span<const double>(st.weights.data(), k), mcfg, Backend::serial);
}

std::size_t row_of(const StencilTable& st, std::size_t node) {
  return static_cast<std::size_t>(std::lower_bound(st.interior.begin(), st.interior.end(), node) -
                                  st.interior.begin());
}

}  // namespace

GridDomain::GridDomain(GroupModel g, Eigen::VectorXd lower, Eigen::VectorXd upper, Eigen::VectorXd h)
    : g_(std::move(g)), lower_(std::move(lower)), upper_(std::move(upper)), h_(std::move(h)) {
  if (!g_.has_arithmetic()) throw UnsupportedModelError("grid domains need a group with arithmetic");
  const int m = g_.dim();
  if (lower_.size() != m || upper_.size() != m || h_.size() != m)
    throw ContractError("box bounds and spacing must match the group dimension");
  size_ = 1;
  for (int i = 0; i < m; ++i) {
    if (!(upper_(i) > lower_(i)) || !std::isfinite(lower_(i)) || !std::isfinite(upper_(i)))
      throw DomainError("box must have positive finite extent in every coordinate");
    if (!(h_(i) > 0.0) || !std::isfinite(h_(i))) throw DomainError("grid spacing must be positive");
    const double cells = (upper_(i) - lower_(i)) / h_(i);
    const auto n = static_cast<std::size_t>(std::llround(cells));
    if (n < 2 || std::abs(cells - static_cast<double>(n)) > 1e-9 * std::max(1.0, cells))
      throw DomainError("spacing must divide the box into at least 2 cells");
    shape_.push_back(n + 1);
    size_ *= n + 1;
    if (size_ > kMaxNodes) throw DomainError("grid is too large");
  }
}

GridDomain::GridDomain(GroupModel g, Eigen::VectorXd lower, Eigen::VectorXd upper, double h)
    : GridDomain(std::move(g), lower, upper, Eigen::VectorXd::Constant(lower.size(), h)) {}

std::vector<std::size_t> GridDomain::multi_index(std::size_t index) const {
  std::vector<std::size_t> idx(shape_.size());
  for (std::size_t d = shape_.size(); d-- > 0;) {
    idx[d] = index % shape_[d];
    index /= shape_[d];
  }
  return idx;
}

std::size_t GridDomain::linear_index(const std::vector<std::size_t>& idx) const {
  std::size_t index = 0;
  for (std::size_t d = 0; d < shape_.size(); ++d) index = index * shape_[d] + idx[d];
  return index;
}

Point GridDomain::node(std::size_t index) const {
  const auto idx = multi_index(index);
  Point x(g_.dim());
  for (std::size_t d = 0; d < idx.size(); ++d) {
    const auto i = static_cast<Eigen::Index>(d);
    x(i) = lower_(i) + static_cast<double>(idx[d]) * h_(i);
  }
  return x;
}

void SolverConfig::validate() const {
  if (std::isnan(p) || p < 1.0) throw DomainError("p must lie in [1, inf]");
  if (!(eps > 0.0) || !std::isfinite(eps)) throw DomainError("eps must be positive");
  if (!(tol_sup > 0.0)) throw DomainError("tol_sup must be positive");
  if (max_iters < 1) throw DomainError("max_iters must be positive");
  if (!(damping > 0.0 && damping <= 1.0)) throw DomainError("damping must lie in (0, 1]");
}

StencilTable build_stencils(const GridDomain& dom, const SolverConfig& cfg) {
  cfg.validate();
  const GroupModel& g = dom.group();
  const int v1 = g.horizontal_dim();
  const double h_max = dom.spacing().head(v1).maxCoeff();
  if (cfg.eps < 2.0 * h_max)
    throw UnderResolvedBallError("eps must be at least twice the horizontal grid spacing");

  const int m = g.dim();
  const double slack = 1e-12;
  StencilTable st;
  st.offsets.push_back(0);
  std::vector<std::size_t> lo(static_cast<std::size_t>(m)), hi(static_cast<std::size_t>(m)), cur;
  for (std::size_t node = 0; node < dom.size(); ++node) {
    const Point x = dom.node(node);
    const Eigen::VectorXd ext = ball_extent(g, x, cfg.eps);
    bool inside = true;
    for (int i = 0; i < m && inside; ++i) {
      const double tiny = slack * dom.spacing()(i);
      inside = x(i) - ext(i) >= dom.lower()(i) - tiny && x(i) + ext(i) <= dom.upper()(i) + tiny;
    }
    if (!inside) {
      st.collar.push_back(node);
      continue;
    }
    for (int i = 0; i < m; ++i) {
      const auto d = static_cast<std::size_t>(i);
      const double h = dom.spacing()(i);
      const double a = std::ceil((x(i) - ext(i) - dom.lower()(i)) / h - slack);
      const double b = std::floor((x(i) + ext(i) - dom.lower()(i)) / h + slack);
      lo[d] = static_cast<std::size_t>(std::max(0.0, a));
      hi[d] = std::min(static_cast<std::size_t>(std::max(0.0, b)), dom.shape()[d] - 1);
    }
    cur = lo;
    const std::size_t first = st.indices.size();
    while (true) {
      const std::size_t candidate = dom.linear_index(cur);
      if (g.distance(x, dom.node(candidate)) <= cfg.eps * (1.0 + slack)) st.indices.push_back(candidate);
      std::size_t d = cur.size();
      while (d-- > 0) {
        if (cur[d] < hi[d]) {
          ++cur[d];
          break;
        }
        cur[d] = lo[d];
      }
      if (d == static_cast<std::size_t>(-1)) break;
    }
    if (st.indices.size() - first < 3)
      throw UnderResolvedBallError("stencil of node " + std::to_string(node) + " has fewer than 3 nodes");
    st.interior.push_back(node);
    st.offsets.push_back(st.indices.size());
  }
  if (st.interior.empty()) throw DomainError("no interior nodes: eps is too large for the box");
  if (st.collar.empty()) throw DomainError("boundary collar is empty");
  std::size_t widest = 0;
  for (std::size_t i = 0; i < st.interior.size(); ++i) widest = std::max(widest, st.stencil_size(i));
  st.weights.assign(widest, 1.0);
  return st;
}

RelaxResult relax_once(std::span<const double> field, const StencilTable& stencils, const SolverConfig& cfg,
                       Backend backend) {
  cfg.validate();
  const MedianConfig mcfg = median_config(cfg);
  RelaxResult result;
  result.field.assign(field.begin(), field.end());
  kernels::RelaxTask task;
  task.nodes = stencils.interior;
  task.damping = cfg.damping;
  task.update = [&](std::size_t node, std::vector<double>& scratch) {
    return stencil_median(field, stencils, row_of(stencils, node), scratch, mcfg);
  };
  result.sup_change = kernels::relax_sweep(task, field, result.field, backend);
  return result;
}

double fixed_point_residual(std::span<const double> field, const StencilTable& stencils, const SolverConfig& cfg,
                            Backend backend) {
  SolverConfig plain = cfg;
  plain.damping = 1.0;
  return relax_once(field, stencils, plain, backend).sup_change;
}

SolveReport solve(const GridDomain& dom, const Field& boundary, const Field& initial, const SolverConfig& cfg,
                  Backend backend) {
  const StencilTable st = build_stencils(dom, cfg);
  SolveReport report;
  report.n_interior = st.interior.size();
  report.n_collar = st.collar.size();
  std::vector<double> field(dom.size());
  report.data_min = std::numeric_limits<double>::infinity();
  report.data_max = -std::numeric_limits<double>::infinity();
  for (std::size_t node : st.collar) {
    const double v = boundary(dom.node(node));
    if (!std::isfinite(v)) throw DomainError("boundary data must be finite on the collar");
    field[node] = v;
    report.data_min = std::min(report.data_min, v);
    report.data_max = std::max(report.data_max, v);
  }
  for (std::size_t node : st.interior) {
    const double v = initial(dom.node(node));
    if (!std::isfinite(v)) throw DomainError("initial field must be finite");
    field[node] = v;
  }
  const double range = report.data_max - report.data_min;
  report.threshold = cfg.tol_sup * cfg.damping * (range > 0.0 ? std::min(1.0, range) : 1.0);

  while (report.iterations < cfg.max_iters) {
    RelaxResult step = relax_once(field, st, cfg, backend);
    field.swap(step.field);
    ++report.iterations;
    report.final_sup_change = step.sup_change;
    if (step.sup_change <= report.threshold) {
      report.converged = true;
      break;
    }
  }
  report.residual_max = fixed_point_residual(field, st, cfg, backend);
  report.field = std::move(field);
  return report;
}

SolveReport solve(const GridDomain& dom, const Field& boundary, double initial, const SolverConfig& cfg,
                  Backend backend) {
  return solve(dom, boundary, [initial](const PointRef&) { return initial; }, cfg, backend);
}

Field named_boundary(const std::string& id) {
  if (id == "saddle")
    return [](const PointRef& y) {
      if (y.size() < 2) throw DomainError("saddle boundary data needs at least 2 coordinates");
      return y(0) * y(0) - y(1) * y(1);
    };
  if (id == "linear") return [](const PointRef& y) { return y(0); };
  const std::string prefix = "constant:";
  if (id.rfind(prefix, 0) == 0) {
    const std::string rest = id.substr(prefix.size());
    std::size_t used = 0;
    double c = 0.0;
    try {
      c = std::stod(rest, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != rest.size() || !std::isfinite(c))
      throw ContractError("constant boundary data needs a finite number: " + id);
    return [c](const PointRef&) { return c; };
  }
  throw ContractError("unknown boundary data '" + id + "' (expected saddle, linear or constant:<c>)");
}

}  // namespace amvp
