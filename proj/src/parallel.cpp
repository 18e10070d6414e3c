#include "weeklyfc/parallel.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace wfc::par {

namespace {
int g_jobs = 0;
}

void set_jobs(int jobs) { g_jobs = jobs < 0 ? 0 : jobs; }

int jobs() { return g_jobs; }

void serial_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  for (std::size_t i = 0; i < n; ++i) fn(i);
}

#ifdef _OPENMP
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  if (g_jobs == 1 || n <= 1) {
    serial_for(n, fn);
    return;
  }
  const int threads = g_jobs == 0 ? omp_get_max_threads() : g_jobs;
  const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (long long i = 0; i < count; ++i) {
    fn(static_cast<std::size_t>(i));
  }
}
#else
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  serial_for(n, fn);
}
#endif

}  // namespace wfc::par
