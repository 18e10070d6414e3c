#pragma once

#include <vector>

#include "weeklyfc/common.hpp"

namespace wfc {

// Sine/cosine pairs at harmonics k = 1..k_max of a (possibly non-integer)
// seasonal period s.
struct FourierSpec {
  double s = 52.18;
  int k_max = 1;

  FourierSpec() = default;
  FourierSpec(double period, int k) : s(period), k_max(k) {
    if (k_max < 1) throw std::invalid_argument("FourierSpec: k_max must be >= 1");
    if (2.0 * k_max >= s)
      throw std::invalid_argument("FourierSpec: 2*k_max must be < s");
  }
};

// Row j holds the terms for time t = t_start + j; columns alternate
// sin(2*pi*k*t/s), cos(2*pi*k*t/s) for k = 1..k_max. Row-major,
// n rows x 2*k_max columns.
std::vector<std::vector<double>> fourier_terms(const FourierSpec& spec,
                                               long t_start, int n);

// Single time point convenience; 2*k_max values.
std::vector<double> fourier_row(const FourierSpec& spec, long t);

// Box-Cox transform: (y^l - 1)/l for l != 0, ln(y) for l == 0.
std::vector<double> boxcox(const std::vector<double>& values, double lambda);
std::vector<double> inv_boxcox(const std::vector<double>& values, double lambda);
double boxcox_scalar(double y, double lambda);
double inv_boxcox_scalar(double z, double lambda);

// Lambda maximizing the profile log-likelihood over the grid
// {0, 0.05, ..., 1}; the mean model is a linear trend. Requires y > 0.
double boxcox_lambda(const std::vector<double>& values);

// Autocorrelation at the given lag (denominator: full-sample variance).
double acf(const std::vector<double>& v, int lag);

// KPSS level-stationarity statistic with Bartlett-window long-run variance,
// truncation trunc(4*(n/100)^0.25).
double kpss_statistic(const std::vector<double>& v);

// Least squares via column-pivoted QR. X is row-major n x p. Throws
// std::runtime_error on rank deficiency.
std::vector<double> least_squares(const std::vector<std::vector<double>>& X,
                                  const std::vector<double>& y);

// Normalized spectral entropy of the periodogram, in [0, 1].
double spectral_entropy(const std::vector<double>& v);

std::vector<double> difference(const std::vector<double>& v, int times = 1);

}  // namespace wfc
