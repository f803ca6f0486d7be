#include "hpafem/execution.hpp"

#include <atomic>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace hpafem {

namespace {
std::atomic<Exec> g_exec{Exec::Parallel};
}

Exec default_exec() { return g_exec.load(); }

void set_default_exec(Exec e) { g_exec.store(e); }

int available_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace hpafem
