#include "weeklyfc/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>

#include "weeklyfc/common.hpp"

namespace wfc {

double smape(const std::vector<double>& forecasts,
             const std::vector<double>& actuals, SmapeVariant variant,
             double epsilon) {
  const std::size_t n = forecasts.size();
  if (n == 0 || n != actuals.size())
    throw std::invalid_argument("smape: length mismatch");
  double sum = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double f = forecasts[k];
    const double y = actuals[k];
    if (!std::isfinite(f) || !std::isfinite(y))
      throw std::invalid_argument("smape: non-finite input");
    const double abs_sum = std::fabs(y) + std::fabs(f);
    if (variant == SmapeVariant::standard) {
      if (abs_sum == 0.0)
        throw std::runtime_error("smape: F = Y = 0, use suilin variant");
      sum += 2.0 * std::fabs(f - y) / abs_sum;
    } else {
      const double denom = std::max(abs_sum + epsilon, 0.5 + epsilon);
      sum += 2.0 * std::fabs(f - y) / denom;
    }
  }
  return 100.0 * sum / static_cast<double>(n);
}

double mase(const std::vector<double>& forecasts,
            const std::vector<double>& actuals,
            const std::vector<double>& training, int seasonal_lag) {
  const auto n = static_cast<int>(forecasts.size());
  const auto m = static_cast<int>(training.size());
  if (n == 0 || forecasts.size() != actuals.size())
    throw std::invalid_argument("mase: length mismatch");
  if (seasonal_lag < 1 || m <= seasonal_lag)
    throw std::invalid_argument("mase: training length must exceed seasonal lag");

  double scale = 0.0;
  for (int k = seasonal_lag; k < m; ++k)
    scale += std::fabs(training[k] - training[k - seasonal_lag]);
  scale *= static_cast<double>(n) / static_cast<double>(m - seasonal_lag);
  if (scale == 0.0)
    throw std::runtime_error("mase: undefined, in-sample benchmark error is zero");

  double err = 0.0;
  for (int k = 0; k < n; ++k) err += std::fabs(forecasts[k] - actuals[k]);
  return err / scale;
}

int select_mase_benchmark(const std::string& dataset_name, bool seasonal,
                          int min_training_length) {
  std::string key;
  for (char c : dataset_name)
    key += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (key == "m4") return 1;
  if (seasonal && min_training_length >= 53) return 52;
  return 1;
}

Aggregates aggregate_errors(const std::vector<double>& per_series_errors) {
  if (per_series_errors.empty())
    throw std::invalid_argument("aggregate_errors: no series");
  return {mean_of(per_series_errors), median_of(per_series_errors)};
}

}  // namespace wfc
