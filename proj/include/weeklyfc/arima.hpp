#pragma once

#include <vector>

namespace wfc {

struct ArimaOrder {
  int p = 0;
  int d = 0;
  int q = 0;
};

// Zero-mean ARMA(p, q) fitted by conditional sum of squares followed by
// exact maximum likelihood through the Kalman filter.
struct ArmaModel {
  int p = 0;
  int q = 0;
  std::vector<double> ar;
  std::vector<double> ma;
  double sigma2 = 0.0;
  double loglik = 0.0;
  double aicc = 0.0;
};

// Differencing order by repeated KPSS level-stationarity tests
// (5% critical value 0.463), capped at max_d.
int kpss_ndiffs(const std::vector<double>& series, int max_d = 2);

// Fits a zero-mean ARMA on w. approximate = CSS objective only (used while
// ranking candidates on long series). Throws on degenerate input.
ArmaModel arma_fit(const std::vector<double>& w, int p, int q,
                   bool approximate = false);

// Stepwise AICc order search: d from KPSS, then neighborhood moves on (p, q)
// from the usual four starting points until no improvement. p, q <= 5.
struct ArimaFit {
  ArimaOrder order;
  ArmaModel arma;
  std::vector<double> series;  // undifferenced input, kept for forecasting
};

ArimaFit auto_arima(const std::vector<double>& series, int max_p = 5,
                    int max_q = 5, int max_d = 2);

ArimaFit arima_fit_fixed(const std::vector<double>& series, ArimaOrder order);

// h-step point forecasts on the original (undifferenced) scale.
std::vector<double> arima_forecast(const ArimaFit& fit, int h);

// Smallest root modulus of 1 - c1 z - c2 z^2 - ... (AR convention). The MA
// polynomial 1 + t1 z + ... can be checked by negating the coefficients.
double min_root_modulus(const std::vector<double>& coeffs);

}  // namespace wfc
