#pragma once

#include <cstddef>
#include <exception>
#include <mutex>

namespace hpafem {

/// Kernel execution policy. Both policies produce bitwise identical results:
/// per-element values are stored by index and reduced in index order.
enum class Exec { Serial, Parallel };

Exec default_exec();
void set_default_exec(Exec e);

/// Number of OpenMP threads available, 1 without OpenMP.
int available_threads();

/// Calls fn(i) for i in [0, n). Under Parallel the first exception thrown by
/// any iteration is rethrown after the loop.
template <class Fn>
void for_each_index(Exec exec, std::size_t n, Fn&& fn) {
  if (exec == Exec::Serial || n < 2) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::exception_ptr failure;
  std::mutex guard;
  const long count = static_cast<long>(n);
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < count; ++i) {
    try {
      fn(static_cast<std::size_t>(i));
    } catch (...) {
      std::lock_guard lock(guard);
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace hpafem
