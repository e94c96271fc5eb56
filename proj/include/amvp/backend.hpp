#pragma once

namespace amvp {

/// Execution backend for the data-parallel kernels.
///
/// `serial` is the plain reference loop kept for testing; `openmp` splits the
/// work into fixed-size chunks whose partial results are combined in chunk
/// order, so its output does not depend on the thread count.
enum class Backend { serial, openmp };

inline constexpr Backend kDefaultBackend = Backend::openmp;

/// Number of OpenMP threads the parallel kernels will use (1 without OpenMP).
int max_threads();

/// Sets the OpenMP thread count; n <= 0 restores the hardware default.
void set_threads(int n);

}  // namespace amvp
