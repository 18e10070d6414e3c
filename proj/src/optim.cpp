#include "weeklyfc/optim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "weeklyfc/common.hpp"

namespace wfc {

namespace {

double clamp_to_box(double x, double lo, double hi) {
  return std::max(lo, std::min(hi, x));
}

NelderMeadResult nelder_mead_once(
    const std::function<double(const std::vector<double>&)>& fn,
    const std::vector<double>& start, const std::vector<double>& lower,
    const std::vector<double>& upper, int max_iterations, double tolerance) {
  const std::size_t dim = start.size();
  int evals = 0;

  auto eval = [&](std::vector<double> x) {
    for (std::size_t i = 0; i < dim; ++i)
      x[i] = clamp_to_box(x[i], lower[i], upper[i]);
    ++evals;
    const double v = fn(x);
    return std::make_pair(std::move(x), std::isfinite(v)
                                            ? v
                                            : std::numeric_limits<double>::max());
  };

  // Initial simplex: start plus per-coordinate steps scaled to the box.
  std::vector<std::pair<std::vector<double>, double>> simplex;
  simplex.reserve(dim + 1);
  simplex.push_back(eval(start));
  for (std::size_t i = 0; i < dim; ++i) {
    std::vector<double> p = start;
    const double span = upper[i] - lower[i];
    double step = span > 0.0 ? 0.1 * span : 0.1;
    if (p[i] + step > upper[i]) step = -step;
    p[i] += step;
    simplex.push_back(eval(p));
  }

  auto by_value = [](const auto& a, const auto& b) { return a.second < b.second; };

  for (int iter = 0; iter < max_iterations; ++iter) {
    std::sort(simplex.begin(), simplex.end(), by_value);
    const double best = simplex.front().second;
    const double worst = simplex.back().second;
    if (std::fabs(worst - best) <= tolerance * (std::fabs(best) + tolerance))
      break;

    std::vector<double> centroid(dim, 0.0);
    for (std::size_t s = 0; s < dim; ++s)
      for (std::size_t i = 0; i < dim; ++i) centroid[i] += simplex[s].first[i];
    for (double& c : centroid) c /= static_cast<double>(dim);

    auto blend = [&](double coef) {
      std::vector<double> p(dim);
      for (std::size_t i = 0; i < dim; ++i)
        p[i] = centroid[i] + coef * (centroid[i] - simplex.back().first[i]);
      return p;
    };

    auto reflected = eval(blend(1.0));
    if (reflected.second < simplex.front().second) {
      auto expanded = eval(blend(2.0));
      simplex.back() = expanded.second < reflected.second ? expanded : reflected;
    } else if (reflected.second < simplex[dim - 1].second) {
      simplex.back() = reflected;
    } else {
      auto contracted = eval(blend(reflected.second < simplex.back().second
                                       ? 0.5
                                       : -0.5));
      if (contracted.second <
          std::min(reflected.second, simplex.back().second)) {
        simplex.back() = contracted;
      } else {
        // Shrink toward the best vertex.
        for (std::size_t s = 1; s <= dim; ++s) {
          std::vector<double> p(dim);
          for (std::size_t i = 0; i < dim; ++i)
            p[i] = simplex[0].first[i] +
                   0.5 * (simplex[s].first[i] - simplex[0].first[i]);
          simplex[s] = eval(std::move(p));
        }
      }
    }
  }

  std::sort(simplex.begin(), simplex.end(), by_value);
  return {simplex.front().first, simplex.front().second, evals};
}

}  // namespace

NelderMeadResult nelder_mead(
    const std::function<double(const std::vector<double>&)>& fn,
    std::vector<double> start, const std::vector<double>& lower,
    const std::vector<double>& upper, const NelderMeadOptions& opts) {
  const std::size_t dim = start.size();
  if (dim == 0 || lower.size() != dim || upper.size() != dim)
    throw std::invalid_argument("nelder_mead: dimension mismatch");
  for (std::size_t i = 0; i < dim; ++i)
    start[i] = clamp_to_box(start[i], lower[i], upper[i]);

  NelderMeadResult best =
      nelder_mead_once(fn, start, lower, upper, opts.max_iterations, opts.tolerance);
  Rng rng(opts.seed);
  for (int r = 1; r < opts.restarts; ++r) {
    std::vector<double> jittered = best.x;
    for (std::size_t i = 0; i < dim; ++i) {
      const double span = upper[i] - lower[i];
      jittered[i] = clamp_to_box(
          jittered[i] + 0.25 * span * (rng.uniform() - 0.5), lower[i], upper[i]);
    }
    NelderMeadResult alt = nelder_mead_once(fn, jittered, lower, upper,
                                            opts.max_iterations, opts.tolerance);
    alt.evaluations += best.evaluations;
    if (alt.value < best.value) best = alt;
    else best.evaluations = alt.evaluations;
  }
  return best;
}

double golden_section(const std::function<double(double)>& fn, double lo,
                      double hi, double tol) {
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - phi * (b - a);
  double d = a + phi * (b - a);
  double fc = fn(c), fd = fn(d);
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - phi * (b - a);
      fc = fn(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + phi * (b - a);
      fd = fn(d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace wfc
