#include "weeklyfc/dhr_arima.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "weeklyfc/math.hpp"
#include "weeklyfc/parallel.hpp"

namespace wfc {

int dhr_max_k_for_length(int n) {
  return (n - 11) / 2;  // keeps n > 2k + 10
}

DhrArimaModel dhr_arima_fit(const std::vector<double>& series, double period,
                            int k) {
  const auto n = static_cast<int>(series.size());
  if (k < 1 || k > 25)
    throw std::invalid_argument("dhr_arima_fit: k must be in [1, 25]");
  if (2.0 * k >= period)
    throw std::invalid_argument("dhr_arima_fit: 2k must be below the period");
  if (n <= 2 * k + 10)
    throw std::invalid_argument("dhr_arima_fit: series length must exceed 2k + 10");

  const FourierSpec spec(period, k);
  const auto terms = fourier_terms(spec, 1, n);
  std::vector<std::vector<double>> X(n, std::vector<double>(1 + 2 * k));
  for (int t = 0; t < n; ++t) {
    X[t][0] = 1.0;
    for (int j = 0; j < 2 * k; ++j) X[t][j + 1] = terms[t][j];
  }

  DhrArimaModel model;
  model.k = k;
  model.period = period;
  model.n_obs = n;
  try {
    model.beta = least_squares(X, series);
  } catch (const std::runtime_error&) {
    throw std::runtime_error("dhr_arima_fit: design matrix rank-deficient, reduce k");
  }

  std::vector<double> residuals(n);
  for (int t = 0; t < n; ++t) {
    double fit = model.beta[0];
    for (int j = 0; j < 2 * k; ++j) fit += model.beta[j + 1] * terms[t][j];
    residuals[t] = series[t] - fit;
  }

  model.residual_fit = auto_arima(residuals);
  model.arima_order = model.residual_fit.order;
  model.ar = model.residual_fit.arma.ar;
  model.ma = model.residual_fit.arma.ma;
  model.sigma2 = model.residual_fit.arma.sigma2;
  return model;
}

std::vector<double> dhr_arima_forecast(const DhrArimaModel& model, int h) {
  if (h < 1) throw std::invalid_argument("dhr_arima_forecast: h must be positive");
  const FourierSpec spec(model.period, model.k);
  const auto terms = fourier_terms(spec, model.n_obs + 1, h);
  std::vector<double> out(h);
  for (int j = 0; j < h; ++j) {
    double value = model.beta[0];
    for (int c = 0; c < 2 * model.k; ++c) value += model.beta[c + 1] * terms[j][c];
    out[j] = value;
  }
  const auto resid = arima_forecast(model.residual_fit, h);
  for (int j = 0; j < h; ++j) out[j] += resid[j];
  return out;
}

DhrKSelection dhr_arima_select_k(const WeeklyDataset& dataset, int k_min,
                                 int k_max, SmapeVariant variant,
                                 double epsilon) {
  if (k_min < 1 || k_max < k_min)
    throw std::invalid_argument("dhr_arima_select_k: bad k range");
  k_max = std::min(k_max, static_cast<int>((dataset.seasonal_period_real - 1.0) / 2.0));

  const int h = dataset.horizon;
  const auto n_series = dataset.series.size();

  // Training parts and validation windows, shared across candidates.
  std::vector<std::vector<double>> training(n_series);
  std::vector<std::vector<double>> validation(n_series);
  for (std::size_t i = 0; i < n_series; ++i) {
    auto split = split_last_h(dataset.series[i], h);
    training[i] = std::move(split.training);
    validation[i] = std::move(split.validation);
  }

  DhrKSelection selection;
  selection.candidate_smape.assign(k_max - k_min + 1, 0.0);

  for (int k = k_min; k <= k_max; ++k) {
    std::vector<double> per_series(n_series);
    par::parallel_for(n_series, [&](std::size_t i) {
      const auto n = static_cast<int>(training[i].size());
      const int effective_k = std::max(1, std::min(k, dhr_max_k_for_length(n)));
      std::vector<double> fc;
      if (n > 2 * effective_k + 10) {
        try {
          const auto model =
              dhr_arima_fit(training[i], dataset.seasonal_period_real, effective_k);
          fc = dhr_arima_forecast(model, h);
        } catch (...) {
          fc.clear();
        }
      }
      if (fc.empty() || !all_finite(fc))
        fc.assign(h, training[i].back());  // short-series fallback
      per_series[i] = smape(fc, validation[i], variant, epsilon);
    });
    selection.candidate_smape[k - k_min] = mean_of(per_series);
  }

  int best = k_min;
  for (int k = k_min; k <= k_max; ++k)
    if (selection.candidate_smape[k - k_min] <
        selection.candidate_smape[best - k_min])
      best = k;
  selection.k = best;
  return selection;
}

}  // namespace wfc
