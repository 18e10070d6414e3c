#include <doctest.h>

#include <cmath>

#include "weeklyfc/common.hpp"
#include "weeklyfc/dhr_arima.hpp"
#include "weeklyfc/math.hpp"

using namespace wfc;

namespace {

std::vector<double> sine_series(int n, double period, double amplitude,
                                double level, std::uint64_t seed = 0,
                                double noise = 0.0) {
  Rng rng(seed);
  std::vector<double> out(n);
  for (int t = 0; t < n; ++t) {
    out[t] = level + amplitude * std::sin(2.0 * M_PI * (t + 1) / period);
    if (noise > 0.0) out[t] += noise * rng.normal();
  }
  return out;
}

}  // namespace

TEST_CASE("dhr regression recovers the generating sine coefficient") {
  auto series = sine_series(156, 52.0, 1.0, 3.0, 7, 0.05);
  auto model = dhr_arima_fit(series, 52.0, 1);
  // beta layout: intercept, sin, cos.
  CHECK(model.beta[0] == doctest::Approx(3.0).epsilon(0.05));
  CHECK(model.beta[1] == doctest::Approx(1.0).epsilon(0.05));
  CHECK(std::fabs(model.beta[2]) < 0.05);
  // Residuals are near white noise: the ARMA explains little variance and
  // no differencing is needed.
  CHECK(model.arima_order.d == 0);
  std::vector<double> resid(156);
  const FourierSpec spec(52.0, 1);
  const auto terms = fourier_terms(spec, 1, 156);
  for (int t = 0; t < 156; ++t)
    resid[t] = series[t] - model.beta[0] - model.beta[1] * terms[t][0] -
               model.beta[2] * terms[t][1];
  CHECK(model.sigma2 > 0.8 * variance_of(resid));
}

TEST_CASE("dhr with AR(1) residuals selects p >= 1") {
  Rng rng(11);
  auto series = sine_series(208, 52.18, 5.0, 20.0);
  double x = 0.0;
  for (auto& v : series) {
    x = 0.8 * x + rng.normal();
    v += x;
  }
  auto model = dhr_arima_fit(series, 52.18, 1);
  CHECK(model.arima_order.p >= 1);
}

TEST_CASE("dhr rejects k too large for the series") {
  std::vector<double> series(20, 1.0);
  CHECK_THROWS_AS(dhr_arima_fit(series, 52.18, 10), std::invalid_argument);
  CHECK_THROWS_AS(dhr_arima_fit(series, 52.18, 0), std::invalid_argument);
  CHECK_THROWS_AS(dhr_arima_fit(series, 52.18, 26), std::invalid_argument);
}

TEST_CASE("zero ARMA coefficients leave the harmonic extrapolation") {
  auto series = sine_series(120, 52.18, 2.0, 10.0);
  auto model = dhr_arima_fit(series, 52.18, 1);
  if (model.ar.empty() && model.ma.empty() && model.arima_order.d == 0) {
    auto fc = dhr_arima_forecast(model, 8);
    const FourierSpec spec(52.18, 1);
    const auto terms = fourier_terms(spec, model.n_obs + 1, 8);
    for (int j = 0; j < 8; ++j) {
      const double harmonic = model.beta[0] + model.beta[1] * terms[j][0] +
                              model.beta[2] * terms[j][1];
      CHECK(fc[j] == doctest::Approx(harmonic).epsilon(1e-9));
    }
  }
}

TEST_CASE("forecasts one integer period apart differ only by ARMA decay") {
  auto series = sine_series(208, 52.0, 4.0, 15.0, 3, 0.1);
  auto model = dhr_arima_fit(series, 52.0, 1);
  auto fc = dhr_arima_forecast(model, 60);
  // Harmonic part repeats at lag 52; remaining gap is the decaying
  // residual forecast.
  const double gap1 = std::fabs(fc[52] - fc[0]);
  CHECK(gap1 < 0.75);
}

TEST_CASE("select_k single-candidate grid returns that candidate") {
  WeeklyDataset ds;
  ds.name = "demo";
  ds.horizon = 4;
  for (int i = 0; i < 3; ++i) {
    TimeSeries s;
    s.id = "s" + std::to_string(i);
    s.granularity = Granularity::weekly;
    s.values = sine_series(80, 52.18, 2.0, 10.0 + i, 100 + i, 0.1);
    ds.series.push_back(s);
  }
  auto sel = dhr_arima_select_k(ds, 3, 3);
  CHECK(sel.k == 3);
  CHECK(sel.candidate_smape.size() == 1);
}

TEST_CASE("select_k prefers the generating harmonic order") {
  WeeklyDataset ds;
  ds.name = "demo";
  ds.horizon = 6;
  for (int i = 0; i < 4; ++i) {
    TimeSeries s;
    s.id = "s" + std::to_string(i);
    s.granularity = Granularity::weekly;
    s.values = sine_series(160, 52.0, 3.0, 12.0 + i, 200 + i, 0.05);
    ds.series.push_back(s);
  }
  auto sel = dhr_arima_select_k(ds, 1, 4);
  // k = 1 generated the data; ties within 0.1 percentage points allowed.
  CHECK(sel.candidate_smape[sel.k - 1] <= sel.candidate_smape[0]);
  CHECK(sel.candidate_smape[0] - sel.candidate_smape[sel.k - 1] <= 0.1);
  // Argmin contract.
  for (double s : sel.candidate_smape)
    CHECK(sel.candidate_smape[sel.k - 1] <= s + 1e-12);
}
