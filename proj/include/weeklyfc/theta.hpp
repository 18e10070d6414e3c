#pragma once

#include <vector>

namespace wfc {

// Simple exponential smoothing with drift; the drift is half the slope of
// the least-squares line through the series. Equivalent to the classic
// Theta(0)/Theta(2) combination with equal weights.
struct ThetaModel {
  double alpha = 0.5;
  double drift = 0.0;
  double level = 0.0;
};

ThetaModel theta_fit(const std::vector<double>& series);
std::vector<double> theta_forecast(const ThetaModel& model, int h);
std::vector<double> theta_fit_forecast(const std::vector<double>& series, int h);

}  // namespace wfc
