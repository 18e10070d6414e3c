#include "weeklyfc/arima.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

#include "weeklyfc/common.hpp"
#include "weeklyfc/math.hpp"
#include "weeklyfc/optim.hpp"

namespace wfc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kRawBound = 3.9;  // tanh(3.9) ~ 0.9992

// Maps unconstrained parameters to a stationary/invertible coefficient set:
// tanh into partial autocorrelations, then the Levinson-Durbin recursion
// (Jones 1980). Guarantees all polynomial roots outside the unit circle.
std::vector<double> pacf_transform(const std::vector<double>& raw) {
  const auto p = static_cast<int>(raw.size());
  std::vector<double> out(p);
  for (int i = 0; i < p; ++i) out[i] = std::tanh(raw[i]);
  std::vector<double> work(out);
  for (int j = 1; j < p; ++j) {
    for (int k = 0; k < j; ++k) work[k] = out[k] - out[j] * out[j - k - 1];
    std::copy(work.begin(), work.begin() + j, out.begin());
  }
  return out;
}

struct KalmanSetup {
  int r = 1;
  Eigen::MatrixXd T;
  Eigen::VectorXd R;
  Eigen::MatrixXd P0;  // stationary state covariance (sigma2 = 1)
};

KalmanSetup kalman_setup(const std::vector<double>& ar,
                         const std::vector<double>& ma) {
  const auto p = static_cast<int>(ar.size());
  const auto q = static_cast<int>(ma.size());
  KalmanSetup s;
  s.r = std::max(p, q + 1);
  s.T = Eigen::MatrixXd::Zero(s.r, s.r);
  for (int i = 0; i < p; ++i) s.T(i, 0) = ar[i];
  for (int i = 0; i + 1 < s.r; ++i) s.T(i, i + 1) = 1.0;
  s.R = Eigen::VectorXd::Zero(s.r);
  s.R(0) = 1.0;
  for (int j = 0; j < q; ++j) s.R(j + 1) = ma[j];

  // Stationary covariance: vec(P) = (I - T (x) T)^-1 vec(R R').
  const int r2 = s.r * s.r;
  Eigen::MatrixXd kron(r2, r2);
  for (int i = 0; i < s.r; ++i)
    for (int j = 0; j < s.r; ++j)
      for (int k = 0; k < s.r; ++k)
        for (int l = 0; l < s.r; ++l)
          kron(i * s.r + k, j * s.r + l) = s.T(i, j) * s.T(k, l);
  Eigen::MatrixXd lhs = Eigen::MatrixXd::Identity(r2, r2) - kron;
  Eigen::MatrixXd rr = s.R * s.R.transpose();
  Eigen::VectorXd vec_rr(r2);
  for (int i = 0; i < s.r; ++i)
    for (int k = 0; k < s.r; ++k) vec_rr(i * s.r + k) = rr(i, k);
  Eigen::VectorXd vec_p = lhs.colPivHouseholderQr().solve(vec_rr);
  s.P0.resize(s.r, s.r);
  for (int i = 0; i < s.r; ++i)
    for (int k = 0; k < s.r; ++k) s.P0(i, k) = vec_p(i * s.r + k);
  return s;
}

// Exact Gaussian -2 log-likelihood with sigma2 concentrated out.
// Returns +inf on numerical failure. sigma2_out receives ssq/n.
double kalman_neg2_loglik(const std::vector<double>& w,
                          const std::vector<double>& ar,
                          const std::vector<double>& ma, double* sigma2_out) {
  const auto n = static_cast<int>(w.size());
  KalmanSetup s;
  try {
    s = kalman_setup(ar, ma);
  } catch (...) {
    return kInf;
  }
  Eigen::VectorXd a = Eigen::VectorXd::Zero(s.r);
  Eigen::MatrixXd P = s.P0;
  const Eigen::MatrixXd RR = s.R * s.R.transpose();

  double ssq = 0.0, sumlog = 0.0;
  for (int t = 0; t < n; ++t) {
    const double e = w[t] - a(0);
    const double F = P(0, 0);
    if (!(F > 1e-12) || !std::isfinite(F)) return kInf;
    ssq += e * e / F;
    sumlog += std::log(F);
    const Eigen::VectorXd K = s.T * P.col(0);
    a = s.T * a + K * (e / F);
    P = s.T * P * s.T.transpose() + RR - K * K.transpose() / F;
  }
  if (!std::isfinite(ssq)) return kInf;
  // Floor keeps a numerically perfect fit finite instead of -inf.
  const double sigma2 = std::max(ssq / n, 1e-290);
  if (sigma2_out) *sigma2_out = sigma2;
  return n * std::log(2.0 * M_PI) + n * std::log(sigma2) + n + sumlog;
}

// Conditional sum of squares, conditioning on the first p observations and
// zero pre-sample innovations.
double css_objective(const std::vector<double>& w, const std::vector<double>& ar,
                     const std::vector<double>& ma, double* sigma2_out) {
  const auto n = static_cast<int>(w.size());
  const auto p = static_cast<int>(ar.size());
  const auto q = static_cast<int>(ma.size());
  if (n - p < 1) return kInf;
  std::vector<double> e(n, 0.0);
  double ssq = 0.0;
  for (int t = p; t < n; ++t) {
    double pred = 0.0;
    for (int i = 0; i < p; ++i) pred += ar[i] * w[t - 1 - i];
    for (int j = 0; j < q; ++j)
      if (t - 1 - j >= p) pred += ma[j] * e[t - 1 - j];
    e[t] = w[t] - pred;
    ssq += e[t] * e[t];
  }
  if (!std::isfinite(ssq)) return kInf;
  const int used = n - p;
  const double sigma2 = std::max(ssq / used, 1e-290);
  if (sigma2_out) *sigma2_out = sigma2;
  return used * std::log(sigma2);
}

}  // namespace

double min_root_modulus(const std::vector<double>& coeffs) {
  // Drop trailing zeros; by convention 1 - c1 z - ... - cp z^p.
  std::vector<double> c = coeffs;
  while (!c.empty() && std::fabs(c.back()) < 1e-12) c.pop_back();
  const auto p = static_cast<int>(c.size());
  if (p == 0) return kInf;
  if (p == 1) return 1.0 / std::fabs(c[0]);
  // Roots of z^p - (c1/cp) ... via companion matrix of the reversed monic
  // polynomial u^p - c1 u^{p-1} - ... - cp, whose roots are 1/z.
  Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(p, p);
  for (int i = 0; i < p; ++i) comp(0, i) = c[i];
  for (int i = 1; i < p; ++i) comp(i, i - 1) = 1.0;
  Eigen::EigenSolver<Eigen::MatrixXd> es(comp, /*computeEigenvectors=*/false);
  double max_inv = 0.0;
  for (int i = 0; i < p; ++i) max_inv = std::max(max_inv, std::abs(es.eigenvalues()(i)));
  if (max_inv <= 0.0) return kInf;
  return 1.0 / max_inv;
}

int kpss_ndiffs(const std::vector<double>& series, int max_d) {
  std::vector<double> w = series;
  int d = 0;
  while (d < max_d && static_cast<int>(w.size()) >= 10 &&
         kpss_statistic(w) > 0.463) {
    w = difference(w);
    ++d;
  }
  return d;
}

ArmaModel arma_fit(const std::vector<double>& w, int p, int q, bool approximate) {
  const auto n = static_cast<int>(w.size());
  if (p < 0 || q < 0) throw std::invalid_argument("arma_fit: negative order");
  if (n < p + q + 3)
    throw std::invalid_argument("arma_fit: series too short for the order");
  if (!all_finite(w)) throw std::invalid_argument("arma_fit: non-finite input");

  ArmaModel model;
  model.p = p;
  model.q = q;

  auto unpack = [&](const std::vector<double>& raw) {
    std::vector<double> ar(raw.begin(), raw.begin() + p);
    std::vector<double> ma(raw.begin() + p, raw.end());
    return std::make_pair(pacf_transform(ar), pacf_transform(ma));
  };

  std::vector<double> raw(p + q, 0.0);
  if (p + q > 0) {
    const std::vector<double> lower(p + q, -kRawBound);
    const std::vector<double> upper(p + q, kRawBound);

    NelderMeadOptions opts;
    opts.max_iterations = 500;
    opts.tolerance = 1e-8;
    opts.restarts = 3;
    opts.seed = 1234 + 17ull * p + 29ull * q;

    // CSS phase for starting values.
    auto css_fn = [&](const std::vector<double>& x) {
      auto [ar, ma] = unpack(x);
      return css_objective(w, ar, ma, nullptr);
    };
    raw = nelder_mead(css_fn, raw, lower, upper, opts).x;

    if (!approximate) {
      auto ml_fn = [&](const std::vector<double>& x) {
        auto [ar, ma] = unpack(x);
        return kalman_neg2_loglik(w, ar, ma, nullptr);
      };
      raw = nelder_mead(ml_fn, raw, lower, upper, opts).x;
    }
  }

  auto [ar, ma] = unpack(raw);
  model.ar = ar;
  model.ma = ma;

  // Enforce a strict root margin; scaling coefficient i by 1/c^i moves all
  // roots outward by the factor c.
  auto enforce_margin = [](std::vector<double>& coefs, bool negate) {
    if (coefs.empty()) return;
    std::vector<double> poly = coefs;
    if (negate)
      for (double& v : poly) v = -v;
    for (int rounds = 0; rounds < 8 && min_root_modulus(poly) <= 1.0 + 1e-6;
         ++rounds) {
      double c = 1.001;
      double scale = 1.0;
      for (std::size_t i = 0; i < coefs.size(); ++i) {
        scale /= c;
        coefs[i] *= scale;
        poly[i] = negate ? -coefs[i] : coefs[i];
      }
    }
  };
  enforce_margin(model.ar, /*negate=*/false);
  enforce_margin(model.ma, /*negate=*/true);

  double sigma2 = 0.0;
  double neg2ll;
  if (approximate) {
    neg2ll = css_objective(w, model.ar, model.ma, &sigma2);
    if (!std::isfinite(neg2ll)) throw std::runtime_error("arma_fit: CSS failed");
  } else {
    neg2ll = kalman_neg2_loglik(w, model.ar, model.ma, &sigma2);
    if (!std::isfinite(neg2ll))
      throw std::runtime_error("arma_fit: likelihood evaluation failed");
  }
  model.sigma2 = sigma2;
  model.loglik = -0.5 * neg2ll;
  const double npar = p + q + 1.0;  // + sigma2
  double aic = neg2ll + 2.0 * npar;
  if (n - npar - 1.0 > 0.0)
    aic += 2.0 * npar * (npar + 1.0) / (n - npar - 1.0);
  else
    aic = kInf;
  model.aicc = aic;
  return model;
}

ArimaFit arima_fit_fixed(const std::vector<double>& series, ArimaOrder order) {
  std::vector<double> w = series;
  for (int i = 0; i < order.d; ++i) w = difference(w);
  ArimaFit fit;
  fit.order = order;
  fit.arma = arma_fit(w, order.p, order.q, /*approximate=*/false);
  fit.series = series;
  return fit;
}

ArimaFit auto_arima(const std::vector<double>& series, int max_p, int max_q,
                    int max_d) {
  const auto n0 = static_cast<int>(series.size());
  if (n0 < 10) throw std::invalid_argument("auto_arima: series too short");

  const int d = kpss_ndiffs(series, max_d);
  std::vector<double> w = series;
  for (int i = 0; i < d; ++i) w = difference(w);
  const auto n = static_cast<int>(w.size());

  // Rank candidates with the CSS approximation on long series, exact ML
  // otherwise; the winner is always refit with exact ML.
  const bool approximate = n > 500;

  max_p = std::min(max_p, (n - 3) / 2);
  max_q = std::min(max_q, (n - 3) / 2);
  max_p = std::max(max_p, 0);
  max_q = std::max(max_q, 0);

  std::set<std::pair<int, int>> visited;
  auto try_fit = [&](int p, int q) -> double {
    if (p < 0 || q < 0 || p > max_p || q > max_q) return kInf;
    if (visited.count({p, q})) return kInf;
    visited.insert({p, q});
    try {
      return arma_fit(w, p, q, approximate).aicc;
    } catch (...) {
      return kInf;
    }
  };

  int best_p = 0, best_q = 0;
  double best_aicc = try_fit(0, 0);
  for (auto [p, q] : {std::pair{2, 2}, {1, 0}, {0, 1}}) {
    const double a = try_fit(p, q);
    if (a < best_aicc) {
      best_aicc = a;
      best_p = p;
      best_q = q;
    }
  }

  bool improved = true;
  while (improved) {
    improved = false;
    const int bp = best_p, bq = best_q;
    for (auto [dp, dq] : {std::pair{-1, 0}, {1, 0}, {0, -1}, {0, 1},
                          {-1, -1}, {-1, 1}, {1, -1}, {1, 1}}) {
      const double a = try_fit(bp + dp, bq + dq);
      if (a < best_aicc) {
        best_aicc = a;
        best_p = bp + dp;
        best_q = bq + dq;
        improved = true;
      }
    }
  }

  if (!std::isfinite(best_aicc))
    throw std::runtime_error("auto_arima: no candidate model could be fitted");

  ArimaFit fit;
  fit.order = {best_p, d, best_q};
  fit.arma = arma_fit(w, best_p, best_q, /*approximate=*/false);
  fit.series = series;
  return fit;
}

std::vector<double> arima_forecast(const ArimaFit& fit, int h) {
  if (h < 1) throw std::invalid_argument("arima_forecast: h must be positive");

  // Difference down, run the filter over the sample, then propagate the
  // prediction state with zero innovations.
  std::vector<std::vector<double>> levels{fit.series};
  for (int i = 0; i < fit.order.d; ++i)
    levels.push_back(difference(levels.back()));
  const std::vector<double>& w = levels.back();

  KalmanSetup s = kalman_setup(fit.arma.ar, fit.arma.ma);
  Eigen::VectorXd a = Eigen::VectorXd::Zero(s.r);
  Eigen::MatrixXd P = s.P0;
  const Eigen::MatrixXd RR = s.R * s.R.transpose();
  for (double obs : w) {
    const double e = obs - a(0);
    const double F = P(0, 0);
    if (!(F > 1e-12))
      throw std::runtime_error("arima_forecast: filter degenerated");
    const Eigen::VectorXd K = s.T * P.col(0);
    a = s.T * a + K * (e / F);
    P = s.T * P * s.T.transpose() + RR - K * K.transpose() / F;
  }

  std::vector<double> diff_forecast(h);
  for (int j = 0; j < h; ++j) {
    diff_forecast[j] = a(0);
    a = s.T * a;
  }

  // Integrate back through each differencing level.
  std::vector<double> out = diff_forecast;
  for (int lvl = fit.order.d - 1; lvl >= 0; --lvl) {
    double last = levels[lvl].back();
    for (int j = 0; j < h; ++j) {
      last += out[j];
      out[j] = last;
    }
  }
  return out;
}

}  // namespace wfc
