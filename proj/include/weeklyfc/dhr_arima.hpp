#pragma once

#include <vector>

#include "weeklyfc/arima.hpp"
#include "weeklyfc/metrics.hpp"
#include "weeklyfc/series.hpp"

namespace wfc {

// Harmonic regression with ARIMA-modelled residuals. The seasonal period is
// fixed during modelling; k sine/cosine pairs carry all seasonality.
struct DhrArimaModel {
  int k = 1;
  double period = 52.18;
  std::vector<double> beta;  // intercept followed by 2k Fourier coefficients
  ArimaOrder arima_order;
  std::vector<double> ar;
  std::vector<double> ma;
  double sigma2 = 0.0;
  int n_obs = 0;
  ArimaFit residual_fit;  // fitting context, needed to forecast
};

DhrArimaModel dhr_arima_fit(const std::vector<double>& series, double period,
                            int k);

std::vector<double> dhr_arima_forecast(const DhrArimaModel& model, int h);

// Grid search over k in [k_min, k_max]: fits on each series' training part,
// forecasts its validation window, and returns the k with the smallest mean
// validation sMAPE. k is capped per series where the length forbids it.
struct DhrKSelection {
  int k = 1;
  std::vector<double> candidate_smape;  // indexed by k - k_min
};

DhrKSelection dhr_arima_select_k(const WeeklyDataset& dataset, int k_min = 1,
                                 int k_max = 25,
                                 SmapeVariant variant = SmapeVariant::standard,
                                 double epsilon = 0.1);

// Largest k whose regression stays comfortably overdetermined for n points.
int dhr_max_k_for_length(int n);

}  // namespace wfc
