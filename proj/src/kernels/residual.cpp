#include <cmath>
#include <stdexcept>

#include <omp.h>

#include "amvp/kernels.hpp"

namespace amvp {

int max_threads() { return omp_get_max_threads(); }

void set_threads(int n) {
  static const int hardware = omp_get_num_procs();
  omp_set_num_threads(n > 0 ? n : hardware);
}

}  // namespace amvp

namespace amvp::kernels {

double signed_power(double s, double p) {
  if (p == 2.0) return s;
  if (p == 3.0) return std::abs(s) * s;
  if (p == 4.0) return s * s * s;
  if (s == 0.0) return 0.0;
  return std::copysign(std::pow(std::abs(s), p - 1.0), s);
}

namespace {

double chunk_sum(std::span<const double> values, std::span<const double> weights, double lambda, double p,
                 std::size_t begin, std::size_t end) {
  CompensatedSum acc;
  for (std::size_t i = begin; i < end; ++i) acc.add(weights[i] * signed_power(values[i] - lambda, p));
  return acc.value();
}

}  // namespace

double lp_residual(std::span<const double> values, std::span<const double> weights, double lambda, double p,
                   Backend backend) {
  if (values.size() != weights.size()) throw std::invalid_argument("values and weights differ in length");
  const std::size_t n = values.size();
  const std::size_t n_chunks = (n + kReductionChunk - 1) / kReductionChunk;
  if (n_chunks <= 1) return chunk_sum(values, weights, lambda, p, 0, n);
  std::vector<double> partial(n_chunks);
  if (backend == Backend::serial) {
    for (std::size_t c = 0; c < n_chunks; ++c)
      partial[c] = chunk_sum(values, weights, lambda, p, c * kReductionChunk, std::min(n, (c + 1) * kReductionChunk));
  } else {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(n_chunks); ++c) {
      const std::size_t begin = static_cast<std::size_t>(c) * kReductionChunk;
      partial[static_cast<std::size_t>(c)] =
          chunk_sum(values, weights, lambda, p, begin, std::min(n, begin + kReductionChunk));
    }
  }
  CompensatedSum acc;
  for (double s : partial) acc.add(s);
  return acc.value();
}

}  // namespace amvp::kernels
