#pragma once

#include <string>
#include <vector>

namespace wfc {

enum class SmapeVariant { standard, suilin };

struct EvaluationContext {
  int test_length = 0;          // N
  int training_length = 0;      // M
  int seasonal_lag = 1;         // S, 1 or 52
  double epsilon = 0.1;         // Suilin constant
  SmapeVariant smape_variant = SmapeVariant::standard;
};

// Percentage in [0, 200] for the standard variant. The Suilin variant
// replaces the |Y|+|F| factor with max(|Y|+|F|+eps, 0.5+eps) and is used on
// datasets containing zeros. The standard variant rejects F = Y = 0.
double smape(const std::vector<double>& forecasts,
             const std::vector<double>& actuals,
             SmapeVariant variant = SmapeVariant::standard, double epsilon = 0.1);

// Forecast error scaled by the in-sample one-step (s)naive error. Throws
// std::runtime_error when the scaling denominator is zero.
double mase(const std::vector<double>& forecasts,
            const std::vector<double>& actuals,
            const std::vector<double>& training, int seasonal_lag);

// M4 uses the naive benchmark for comparability; otherwise the snaive
// benchmark (S = 52) when the dataset is seasonal and every training part
// has at least one full cycle plus one point.
int select_mase_benchmark(const std::string& dataset_name, bool seasonal,
                          int min_training_length);

struct Aggregates {
  double mean = 0.0;
  double median = 0.0;
};

Aggregates aggregate_errors(const std::vector<double>& per_series_errors);

}  // namespace wfc
