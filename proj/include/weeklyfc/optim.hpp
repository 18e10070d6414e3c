#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace wfc {

struct NelderMeadResult {
  std::vector<double> x;
  double value = 0.0;
  int evaluations = 0;
};

struct NelderMeadOptions {
  int max_iterations = 500;
  double tolerance = 1e-8;
  int restarts = 3;       // deterministic seeded restarts
  std::uint64_t seed = 1; // restart perturbation stream
};

// Minimizes fn over box [lower, upper]. Points outside the box are clamped
// before evaluation; fn may return +inf to reject a region.
NelderMeadResult nelder_mead(
    const std::function<double(const std::vector<double>&)>& fn,
    std::vector<double> start, const std::vector<double>& lower,
    const std::vector<double>& upper, const NelderMeadOptions& opts = {});

// 1-D golden-section minimization on [lo, hi].
double golden_section(const std::function<double(double)>& fn, double lo,
                      double hi, double tol = 1e-8);

}  // namespace wfc
