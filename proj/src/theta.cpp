#include "weeklyfc/theta.hpp"

#include <cmath>
#include <stdexcept>

#include "weeklyfc/optim.hpp"

namespace wfc {

namespace {

// One-step-ahead SSE of simple exponential smoothing with the given alpha;
// the level seeds on the first observation.
double ses_sse(const std::vector<double>& y, double alpha, double* final_level) {
  double level = y[0];
  double sse = 0.0;
  for (std::size_t t = 1; t < y.size(); ++t) {
    const double err = y[t] - level;
    sse += err * err;
    level += alpha * err;
  }
  if (final_level) *final_level = level;
  return sse;
}

}  // namespace

ThetaModel theta_fit(const std::vector<double>& series) {
  const auto n = static_cast<int>(series.size());
  if (n < 3) throw std::invalid_argument("theta_fit: series too short");

  ThetaModel model;
  model.alpha = golden_section(
      [&](double a) { return ses_sse(series, a, nullptr); }, 0.01, 0.99, 1e-8);
  ses_sse(series, model.alpha, &model.level);

  // Least-squares slope through (t, y_t), t = 1..n.
  double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
  for (int t = 0; t < n; ++t) {
    const double x = t + 1.0;
    st += x;
    sy += series[t];
    stt += x * x;
    sty += x * series[t];
  }
  const double denom = n * stt - st * st;
  const double slope = denom != 0.0 ? (n * sty - st * sy) / denom : 0.0;
  model.drift = 0.5 * slope;
  return model;
}

std::vector<double> theta_forecast(const ThetaModel& model, int h) {
  if (h < 1) throw std::invalid_argument("theta_forecast: h must be positive");
  std::vector<double> out(h);
  for (int j = 1; j <= h; ++j) out[j - 1] = model.level + j * model.drift;
  return out;
}

std::vector<double> theta_fit_forecast(const std::vector<double>& series, int h) {
  return theta_forecast(theta_fit(series), h);
}

}  // namespace wfc
