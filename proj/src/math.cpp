#include "weeklyfc/math.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

namespace wfc {

double median_of(std::vector<double> v) {
  if (v.empty()) throw std::invalid_argument("median of empty vector");
  const std::size_t n = v.size();
  const std::size_t mid = n / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  double hi = v[mid];
  if (n % 2 == 1) return hi;
  std::nth_element(v.begin(), v.begin() + mid - 1, v.begin() + mid);
  return 0.5 * (v[mid - 1] + hi);
}

std::vector<std::vector<double>> fourier_terms(const FourierSpec& spec,
                                               long t_start, int n) {
  if (n < 1) throw std::invalid_argument("fourier_terms: n must be >= 1");
  std::vector<std::vector<double>> out(n, std::vector<double>(2 * spec.k_max));
  for (int j = 0; j < n; ++j) {
    const double t = static_cast<double>(t_start + j);
    for (int k = 1; k <= spec.k_max; ++k) {
      const double angle = 2.0 * M_PI * k * t / spec.s;
      out[j][2 * (k - 1)] = std::sin(angle);
      out[j][2 * (k - 1) + 1] = std::cos(angle);
    }
  }
  return out;
}

std::vector<double> fourier_row(const FourierSpec& spec, long t) {
  return fourier_terms(spec, t, 1)[0];
}

double boxcox_scalar(double y, double lambda) {
  if (lambda == 0.0) {
    if (y <= 0.0)
      throw std::invalid_argument("boxcox: nonpositive value with lambda <= 0");
    return std::log(y);
  }
  if (lambda < 0.0 && y <= 0.0)
    throw std::invalid_argument("boxcox: nonpositive value with lambda <= 0");
  return (std::pow(y, lambda) - 1.0) / lambda;
}

double inv_boxcox_scalar(double z, double lambda) {
  if (lambda == 0.0) return std::exp(z);
  const double base = lambda * z + 1.0;
  if (base <= 0.0) return 0.0;  // forecast floor
  return std::pow(base, 1.0 / lambda);
}

std::vector<double> boxcox(const std::vector<double>& values, double lambda) {
  std::vector<double> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i)
    out[i] = boxcox_scalar(values[i], lambda);
  return out;
}

std::vector<double> inv_boxcox(const std::vector<double>& values, double lambda) {
  std::vector<double> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i)
    out[i] = inv_boxcox_scalar(values[i], lambda);
  return out;
}

double boxcox_lambda(const std::vector<double>& values) {
  const auto n = static_cast<int>(values.size());
  if (n < 3) throw std::invalid_argument("boxcox_lambda: need >= 3 values");
  double sum_log = 0.0;
  for (double y : values) {
    if (y <= 0.0)
      throw std::invalid_argument("boxcox_lambda: values must be positive");
    sum_log += std::log(y);
  }
  double best_lambda = 1.0;
  double best_ll = -std::numeric_limits<double>::infinity();
  for (int i = 0; i <= 20; ++i) {
    const double lambda = 0.05 * i;
    const auto z = boxcox(values, lambda);
    // Residual variance around a fitted linear trend.
    double st = 0.0, sz = 0.0, stt = 0.0, stz = 0.0;
    for (int t = 0; t < n; ++t) {
      st += t;
      sz += z[t];
      stt += static_cast<double>(t) * t;
      stz += t * z[t];
    }
    const double denom = n * stt - st * st;
    const double slope = denom != 0.0 ? (n * stz - st * sz) / denom : 0.0;
    const double icept = (sz - slope * st) / n;
    double sse = 0.0;
    for (int t = 0; t < n; ++t) {
      const double r = z[t] - icept - slope * t;
      sse += r * r;
    }
    const double sigma2 = std::max(sse / n, 1e-300);
    const double ll = -0.5 * n * std::log(sigma2) + (lambda - 1.0) * sum_log;
    if (ll > best_ll) {
      best_ll = ll;
      best_lambda = lambda;
    }
  }
  return best_lambda;
}

double acf(const std::vector<double>& v, int lag) {
  const auto n = static_cast<int>(v.size());
  if (lag < 0 || lag >= n) throw std::invalid_argument("acf: bad lag");
  const double m = mean_of(v);
  double denom = 0.0;
  for (double x : v) denom += (x - m) * (x - m);
  if (denom <= 0.0) return 0.0;
  double num = 0.0;
  for (int t = lag; t < n; ++t) num += (v[t] - m) * (v[t - lag] - m);
  return num / denom;
}

double kpss_statistic(const std::vector<double>& v) {
  const auto n = static_cast<int>(v.size());
  if (n < 4) throw std::invalid_argument("kpss: series too short");
  const double m = mean_of(v);
  std::vector<double> e(n);
  for (int t = 0; t < n; ++t) e[t] = v[t] - m;

  double cum = 0.0, s2_num = 0.0;
  std::vector<double> partial(n);
  for (int t = 0; t < n; ++t) {
    cum += e[t];
    partial[t] = cum;
    s2_num += partial[t] * partial[t];
  }

  const int l = static_cast<int>(std::trunc(4.0 * std::pow(n / 100.0, 0.25)));
  double lrv = 0.0;
  for (double x : e) lrv += x * x;
  for (int k = 1; k <= l; ++k) {
    double gamma = 0.0;
    for (int t = k; t < n; ++t) gamma += e[t] * e[t - k];
    lrv += 2.0 * (1.0 - static_cast<double>(k) / (l + 1)) * gamma;
  }
  lrv /= n;
  if (lrv <= 0.0) return 0.0;
  return s2_num / (static_cast<double>(n) * n * lrv);
}

std::vector<double> least_squares(const std::vector<std::vector<double>>& X,
                                  const std::vector<double>& y) {
  const auto n = static_cast<Eigen::Index>(X.size());
  if (n == 0 || X[0].empty())
    throw std::invalid_argument("least_squares: empty design");
  const auto p = static_cast<Eigen::Index>(X[0].size());
  if (static_cast<std::size_t>(n) != y.size())
    throw std::invalid_argument("least_squares: row count mismatch");

  Eigen::MatrixXd A(n, p);
  Eigen::VectorXd b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) A(i, j) = X[i][j];
    b(i) = y[i];
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
  qr.setThreshold(1e-10);
  if (qr.rank() < p)
    throw std::runtime_error("least_squares: design matrix is rank-deficient");
  Eigen::VectorXd beta = qr.solve(b);
  return {beta.data(), beta.data() + p};
}

double spectral_entropy(const std::vector<double>& v) {
  const auto n = static_cast<int>(v.size());
  if (n < 4) return 1.0;
  const double m = mean_of(v);
  const int nfreq = (n - 1) / 2;
  if (nfreq < 1) return 1.0;
  std::vector<double> power(nfreq);
  double total = 0.0;
  for (int j = 1; j <= nfreq; ++j) {
    double re = 0.0, im = 0.0;
    const double w = 2.0 * M_PI * j / n;
    for (int t = 0; t < n; ++t) {
      re += (v[t] - m) * std::cos(w * t);
      im += (v[t] - m) * std::sin(w * t);
    }
    power[j - 1] = re * re + im * im;
    total += power[j - 1];
  }
  if (total <= 0.0) return 0.0;  // constant series: fully predictable
  double h = 0.0;
  for (double p : power) {
    const double q = p / total;
    if (q > 0.0) h -= q * std::log(q);
  }
  return h / std::log(static_cast<double>(nfreq > 1 ? nfreq : 2));
}

std::vector<double> difference(const std::vector<double>& v, int times) {
  std::vector<double> out = v;
  for (int d = 0; d < times; ++d) {
    if (out.size() < 2) throw std::invalid_argument("difference: too short");
    std::vector<double> next(out.size() - 1);
    for (std::size_t i = 1; i < out.size(); ++i) next[i - 1] = out[i] - out[i - 1];
    out = std::move(next);
  }
  return out;
}

}  // namespace wfc
