#pragma once

// Data-parallel inner loops. Each kernel has a plain serial reference and an
// OpenMP version that reduces over fixed-size chunks in chunk order, so the
// OpenMP result is identical for every thread count.

#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "amvp/backend.hpp"

namespace amvp::kernels {

inline constexpr std::size_t kReductionChunk = 4096;

/// Neumaier-compensated accumulator.
struct CompensatedSum {
  double sum = 0.0;
  double carry = 0.0;

  void add(double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x))
      carry += (sum - t) + x;
    else
      carry += (x - t) + sum;
    sum = t;
  }
  double value() const { return sum + carry; }
};

/// |s|^{p-2} s, with 0 at s = 0 for every p.
double signed_power(double s, double p);

/// F(lambda) = sum_i w_i |u_i - lambda|^{p-2} (u_i - lambda).
double lp_residual(std::span<const double> values, std::span<const double> weights, double lambda, double p,
                   Backend backend);

/// Rejection sampling from an axis-aligned cube [lower, upper]^dim.
struct RejectionTask {
  int dim = 1;
  double lower = -1.0;
  double upper = 1.0;
  std::function<bool(std::span<const double>)> accept;
  std::uint64_t n_proposals = 0;
  std::uint64_t seed = 0;
  std::uint64_t batch = 65536;
  /// Randomly shifted Halton points instead of pseudorandom ones; the proposal
  /// budget is split evenly over `replicates` independent shifts.
  bool low_discrepancy = false;
  int replicates = 1;
};

struct RejectionResult {
  std::vector<double> points;  // accepted, row-major, dim per point
  std::vector<std::uint32_t> replicate;  // replicate of each accepted point
  std::uint64_t n_proposals = 0;  // proposals actually drawn
};

RejectionResult sample_rejection(const RejectionTask& task, Backend backend);

/// Stream seed for work item `index` derived from `seed` (splitmix64 mixing).
std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index);

/// Uniform double in the open interval (0, 1) from 64 random bits.
inline double unit_open(std::uint64_t bits) {
  return (static_cast<double>(bits >> 12) + 0.5) * 0x1.0p-52;
}

/// Radical inverse of `index` in the given prime base.
double radical_inverse(std::uint64_t index, unsigned base);

/// Jacobi sweep over interior nodes: out[node] = (1-theta) in[node] + theta * update(node).
/// `update(node, scratch)` must only read `in`. Returns the sup-norm change.
struct RelaxTask {
  std::span<const std::size_t> nodes;
  std::function<double(std::size_t node, std::vector<double>& scratch)> update;
  double damping = 1.0;
};

double relax_sweep(const RelaxTask& task, std::span<const double> in, std::span<double> out, Backend backend);

}  // namespace amvp::kernels
