#pragma once

#include <exception>
#include <mutex>

namespace amvp::kernels {

// Exceptions must not escape an OpenMP region; record the first one and
// rethrow it on the calling thread after the region ends.
class ExceptionGuard {
 public:
  template <typename F>
  void run(F&& f) noexcept {
    try {
      f();
    } catch (...) {
      std::lock_guard lock(mutex_);
      if (!first_) first_ = std::current_exception();
    }
  }

  void rethrow() const {
    if (first_) std::rethrow_exception(first_);
  }

 private:
  std::mutex mutex_;
  std::exception_ptr first_;
};

}  // namespace amvp::kernels
