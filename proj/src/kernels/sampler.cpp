#include <array>
#include <cmath>
#include <random>
#include <stdexcept>

#include "amvp/kernels.hpp"
#include "exception_guard.hpp"

namespace amvp::kernels {

namespace {

constexpr std::array<unsigned, 32> kPrimes = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29, 31,  37,  41,  43,  47,  53,
                                              59, 61, 67, 71, 73, 79, 83, 89, 97, 101, 103, 107, 109, 113, 127, 131};

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

struct WorkItem {
  std::uint32_t replicate = 0;
  std::uint64_t first = 0;  // index of the first proposal within its replicate
  std::uint64_t count = 0;
  std::uint64_t stream = 0;  // pseudorandom substream id
};

std::vector<WorkItem> plan(const RejectionTask& task, std::uint64_t per_replicate) {
  std::vector<WorkItem> items;
  std::uint64_t stream = 0;
  for (int r = 0; r < task.replicates; ++r) {
    for (std::uint64_t first = 0; first < per_replicate; first += task.batch) {
      items.push_back({static_cast<std::uint32_t>(r), first, std::min(task.batch, per_replicate - first), stream++});
    }
  }
  return items;
}

void run_item(const RejectionTask& task, const WorkItem& item, const std::vector<double>& shift,
              std::vector<double>& accepted) {
  const auto dim = static_cast<std::size_t>(task.dim);
  const double width = task.upper - task.lower;
  std::vector<double> x(dim);
  std::mt19937_64 rng(substream_seed(task.seed, item.stream));
  for (std::uint64_t i = 0; i < item.count; ++i) {
    if (task.low_discrepancy) {
      const std::uint64_t index = item.first + i + 1;
      for (std::size_t d = 0; d < dim; ++d) {
        double u = radical_inverse(index, kPrimes[d]) + shift[d];
        if (u >= 1.0) u -= 1.0;
        x[d] = task.lower + width * u;
      }
    } else {
      for (std::size_t d = 0; d < dim; ++d) x[d] = task.lower + width * unit_open(rng());
    }
    if (task.accept(x)) accepted.insert(accepted.end(), x.begin(), x.end());
  }
}

}  // namespace

std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

double radical_inverse(std::uint64_t index, unsigned base) {
  const double inv_base = 1.0 / base;
  double scale = inv_base;
  double result = 0.0;
  while (index > 0) {
    result += static_cast<double>(index % base) * scale;
    index /= base;
    scale *= inv_base;
  }
  return result;
}

RejectionResult sample_rejection(const RejectionTask& task, Backend backend) {
  if (task.dim < 1) throw std::invalid_argument("rejection sampling needs dim >= 1");
  if (!task.accept) throw std::invalid_argument("rejection sampling needs an acceptance test");
  if (task.batch < 1) throw std::invalid_argument("batch must be positive");
  if (task.replicates < 1) throw std::invalid_argument("replicates must be positive");
  if (task.low_discrepancy && static_cast<std::size_t>(task.dim) > kPrimes.size())
    throw std::invalid_argument("low-discrepancy sampling supports at most 32 dimensions");

  const auto replicates = static_cast<std::uint64_t>(task.replicates);
  const std::uint64_t per_replicate = std::max<std::uint64_t>(1, task.n_proposals / replicates);
  const auto items = plan(task, per_replicate);

  std::vector<std::vector<double>> shifts(replicates);
  if (task.low_discrepancy) {
    for (std::uint64_t r = 0; r < replicates; ++r) {
      std::mt19937_64 rng(substream_seed(task.seed ^ 0xa5a5a5a5a5a5a5a5ULL, r));
      shifts[r].resize(static_cast<std::size_t>(task.dim));
      for (auto& s : shifts[r]) s = unit_open(rng());
    }
  }

  std::vector<std::vector<double>> accepted(items.size());
  if (backend == Backend::serial) {
    for (std::size_t i = 0; i < items.size(); ++i) run_item(task, items[i], shifts[items[i].replicate], accepted[i]);
  } else {
    ExceptionGuard guard;
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(items.size()); ++i) {
      guard.run([&] {
        const auto& item = items[static_cast<std::size_t>(i)];
        run_item(task, item, shifts[item.replicate], accepted[static_cast<std::size_t>(i)]);
      });
    }
    guard.rethrow();
  }

  RejectionResult result;
  result.n_proposals = per_replicate * replicates;
  std::size_t total = 0;
  for (const auto& a : accepted) total += a.size();
  result.points.reserve(total);
  result.replicate.reserve(total / static_cast<std::size_t>(task.dim));
  for (std::size_t i = 0; i < items.size(); ++i) {
    result.points.insert(result.points.end(), accepted[i].begin(), accepted[i].end());
    result.replicate.insert(result.replicate.end(), accepted[i].size() / static_cast<std::size_t>(task.dim),
                            items[i].replicate);
  }
  return result;
}

}  // namespace amvp::kernels
