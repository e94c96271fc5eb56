#include <cmath>
#include <stdexcept>

#include "amvp/kernels.hpp"
#include "exception_guard.hpp"

namespace amvp::kernels {

double relax_sweep(const RelaxTask& task, std::span<const double> in, std::span<double> out, Backend backend) {
  if (in.size() != out.size()) throw std::invalid_argument("field buffers differ in length");
  const double theta = task.damping;
  double sup_change = 0.0;
  if (backend == Backend::serial) {
    std::vector<double> scratch;
    for (std::size_t node : task.nodes) {
      const double updated = (1.0 - theta) * in[node] + theta * task.update(node, scratch);
      sup_change = std::max(sup_change, std::abs(updated - in[node]));
      out[node] = updated;
    }
    return sup_change;
  }
  // max is order independent, so the parallel reduction is deterministic.
  ExceptionGuard guard;
#pragma omp parallel reduction(max : sup_change)
  {
    std::vector<double> scratch;
#pragma omp for schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(task.nodes.size()); ++i) {
      guard.run([&] {
        const std::size_t node = task.nodes[static_cast<std::size_t>(i)];
        const double updated = (1.0 - theta) * in[node] + theta * task.update(node, scratch);
        sup_change = std::max(sup_change, std::abs(updated - in[node]));
        out[node] = updated;
      });
    }
  }
  guard.rethrow();
  return sup_change;
}

}  // namespace amvp::kernels
