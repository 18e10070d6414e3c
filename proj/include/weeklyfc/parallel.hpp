#pragma once

#include <cstddef>
#include <functional>

namespace wfc::par {

// Worker count used by parallel_for. 1 selects the serial reference path.
// 0 means "use all hardware threads".
void set_jobs(int jobs);
int jobs();

// Runs fn(i) for i in [0, n). Iterations must be independent: each writes
// only to its own output slot and draws randomness from its own seeded
// stream, so results are identical for any worker count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

// Serial reference loop. Kept separate so tests and the benchmark can
// compare it against the OpenMP path directly.
void serial_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace wfc::par
