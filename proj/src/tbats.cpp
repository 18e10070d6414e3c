#include "weeklyfc/tbats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "weeklyfc/common.hpp"
#include "weeklyfc/math.hpp"
#include "weeklyfc/optim.hpp"
#include "weeklyfc/parallel.hpp"

namespace wfc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Jones-style map from unconstrained values to stationary coefficients;
// shared convention with the ARIMA module but local to keep this file
// self-contained.
std::vector<double> pacf_map(const double* raw, int count) {
  std::vector<double> out(count);
  for (int i = 0; i < count; ++i) out[i] = std::tanh(raw[i]);
  std::vector<double> work(out);
  for (int j = 1; j < count; ++j) {
    for (int k = 0; k < j; ++k) work[k] = out[k] - out[j] * out[j - k - 1];
    std::copy(work.begin(), work.begin() + j, out.begin());
  }
  return out;
}

struct Candidate {
  bool use_boxcox = false;
  bool use_trend = false;
  bool use_damping = false;
  int p = 0;
  int q = 0;
  int k = 1;
};

struct RecursionState {
  double level = 0.0;
  double trend = 0.0;
  std::vector<double> seasonal;   // interleaved s, s*
  std::vector<double> d_history;  // newest first
  std::vector<double> e_history;  // newest first
};

struct RecursionParams {
  double alpha = 0.0;
  double beta = 0.0;
  double phi = 1.0;  // damping; 1 = undamped
  double gamma1 = 0.0;
  double gamma2 = 0.0;
  std::vector<double> ar;
  std::vector<double> ma;
  bool use_trend = false;
  std::vector<double> cos_w;  // per harmonic
  std::vector<double> sin_w;
};

// One step of the state recursion. Returns the one-step prediction; eps is
// the realized innovation (0 when forecasting).
double step(RecursionState& st, const RecursionParams& pr, double* dhat_out) {
  const int k = static_cast<int>(pr.cos_w.size());
  double seas_sum = 0.0;
  for (int j = 0; j < k; ++j) seas_sum += st.seasonal[2 * j];
  double dhat = 0.0;
  for (std::size_t i = 0; i < pr.ar.size(); ++i) dhat += pr.ar[i] * st.d_history[i];
  for (std::size_t i = 0; i < pr.ma.size(); ++i) dhat += pr.ma[i] * st.e_history[i];
  *dhat_out = dhat;
  return st.level + pr.phi * st.trend + seas_sum + dhat;
}

void update(RecursionState& st, const RecursionParams& pr, double dt, double eps) {
  const double new_level = st.level + pr.phi * st.trend + pr.alpha * dt;
  const double new_trend = pr.use_trend ? pr.phi * st.trend + pr.beta * dt : 0.0;
  st.level = new_level;
  st.trend = new_trend;
  const int k = static_cast<int>(pr.cos_w.size());
  for (int j = 0; j < k; ++j) {
    const double s = st.seasonal[2 * j];
    const double ss = st.seasonal[2 * j + 1];
    st.seasonal[2 * j] = s * pr.cos_w[j] + ss * pr.sin_w[j] + pr.gamma1 * dt;
    st.seasonal[2 * j + 1] = -s * pr.sin_w[j] + ss * pr.cos_w[j] + pr.gamma2 * dt;
  }
  if (!st.d_history.empty()) {
    for (std::size_t i = st.d_history.size() - 1; i > 0; --i)
      st.d_history[i] = st.d_history[i - 1];
    st.d_history[0] = dt;
  }
  if (!st.e_history.empty()) {
    for (std::size_t i = st.e_history.size() - 1; i > 0; --i)
      st.e_history[i] = st.e_history[i - 1];
    st.e_history[0] = eps;
  }
}

struct FitResult {
  bool ok = false;
  double aic = kInf;
  TbatsModel model;
};

FitResult fit_candidate(const std::vector<double>& series, const Candidate& c,
                        double period, double lambda_hint) {
  const auto n = static_cast<int>(series.size());
  FitResult result;

  const double lambda = c.use_boxcox ? lambda_hint : 1.0;
  std::vector<double> z;
  double sum_log_y = 0.0;
  try {
    if (c.use_boxcox) {
      z = boxcox(series, lambda);
      for (double y : series) sum_log_y += std::log(y);
    } else {
      z = series;
    }
  } catch (...) {
    return result;
  }

  // Seed states by regressing z_t on the zero-noise state read-out at t.
  const int cols = 1 + (c.use_trend ? 1 : 0) + 2 * c.k;
  if (n < cols + 2) return result;
  std::vector<std::vector<double>> X(n, std::vector<double>(cols));
  for (int t = 0; t < n; ++t) {
    int col = 0;
    X[t][col++] = 1.0;
    if (c.use_trend) X[t][col++] = static_cast<double>(t);
    for (int j = 1; j <= c.k; ++j) {
      const double w = 2.0 * M_PI * j / period;
      X[t][col++] = std::cos(w * t);
      X[t][col++] = std::sin(w * t);
    }
  }
  std::vector<double> seed;
  try {
    seed = least_squares(X, z);
  } catch (...) {
    return result;
  }

  RecursionParams pr;
  pr.use_trend = c.use_trend;
  for (int j = 1; j <= c.k; ++j) {
    const double w = 2.0 * M_PI * j / period;
    pr.cos_w.push_back(std::cos(w));
    pr.sin_w.push_back(std::sin(w));
  }

  RecursionState init;
  {
    int col = 0;
    init.level = seed[col++];
    init.trend = c.use_trend ? seed[col++] : 0.0;
    init.seasonal.resize(2 * c.k);
    for (int j = 0; j < c.k; ++j) {
      init.seasonal[2 * j] = seed[col++];
      init.seasonal[2 * j + 1] = seed[col++];
    }
    init.d_history.assign(c.p, 0.0);
    init.e_history.assign(c.q, 0.0);
  }

  double scale = 1.0;
  for (double v : z) scale = std::max(scale, std::fabs(v));
  const double explosion = 1e8 * scale;

  // Parameter vector: alpha, [beta], [phi], gamma1, gamma2, raw ar, raw ma.
  std::vector<double> start{0.1};
  std::vector<double> lower{1e-4};
  std::vector<double> upper{0.99};
  if (c.use_trend) {
    start.push_back(0.01);
    lower.push_back(1e-6);
    upper.push_back(0.99);
  }
  if (c.use_damping) {
    start.push_back(0.95);
    lower.push_back(0.80);
    upper.push_back(0.98);
  }
  start.insert(start.end(), {1e-3, 1e-3});
  lower.insert(lower.end(), {-0.5, -0.5});
  upper.insert(upper.end(), {0.5, 0.5});
  for (int i = 0; i < c.p + c.q; ++i) {
    start.push_back(0.0);
    lower.push_back(-3.9);
    upper.push_back(3.9);
  }

  auto unpack = [&](const std::vector<double>& x, RecursionParams& out) {
    int i = 0;
    out.alpha = x[i++];
    out.beta = c.use_trend ? x[i++] : 0.0;
    out.phi = c.use_damping ? x[i++] : 1.0;
    out.gamma1 = x[i++];
    out.gamma2 = x[i++];
    out.ar = pacf_map(x.data() + i, c.p);
    i += c.p;
    out.ma = pacf_map(x.data() + i, c.q);
  };

  auto sse_of = [&](const std::vector<double>& x) {
    RecursionParams local = pr;
    unpack(x, local);
    if (local.use_trend && local.beta > local.alpha)
      return 1e12 * (1.0 + local.beta - local.alpha);
    RecursionState st = init;
    double sse = 0.0;
    for (int t = 0; t < n; ++t) {
      double dhat;
      const double pred = step(st, local, &dhat);
      const double eps = z[t] - pred;
      sse += eps * eps;
      update(st, local, dhat + eps, eps);
      if (std::fabs(st.level) > explosion || !std::isfinite(sse)) return kInf;
    }
    return sse;
  };

  NelderMeadOptions opts;
  opts.max_iterations = 500;
  opts.tolerance = 1e-8;
  opts.restarts = 3;
  opts.seed = 97 + 13ull * c.k + 7ull * c.p + 3ull * c.q + (c.use_trend ? 1 : 0) +
              (c.use_damping ? 2 : 0) + (c.use_boxcox ? 4 : 0);

  const auto nm = nelder_mead(sse_of, start, lower, upper, opts);
  if (!std::isfinite(nm.value) || nm.value <= 0.0) return result;

  RecursionParams fitted = pr;
  unpack(nm.x, fitted);

  // Replay to capture the end-of-sample state.
  RecursionState st = init;
  double sse = 0.0;
  for (int t = 0; t < n; ++t) {
    double dhat;
    const double pred = step(st, fitted, &dhat);
    const double eps = z[t] - pred;
    sse += eps * eps;
    update(st, fitted, dhat + eps, eps);
  }
  if (!std::isfinite(sse) || sse <= 0.0) return result;

  const double sigma2 = sse / n;
  double neg2ll = n * std::log(2.0 * M_PI * sigma2) + n;
  neg2ll -= 2.0 * (lambda - 1.0) * sum_log_y * (c.use_boxcox ? 1.0 : 0.0);

  // Smoothing/damping/ARMA parameters, seed states, sigma2, and the Box-Cox
  // lambda when engaged.
  const double npar = static_cast<double>(start.size()) + cols + 1.0 +
                      (c.use_boxcox ? 1.0 : 0.0);

  TbatsModel m;
  m.lambda = c.use_boxcox ? std::optional<double>(lambda) : std::nullopt;
  m.use_trend = c.use_trend;
  m.damping = c.use_damping ? std::optional<double>(fitted.phi) : std::nullopt;
  m.k = c.k;
  m.period = period;
  m.alpha = fitted.alpha;
  m.beta = fitted.beta;
  m.gamma1 = fitted.gamma1;
  m.gamma2 = fitted.gamma2;
  m.ar = fitted.ar;
  m.ma = fitted.ma;
  m.sigma2 = sigma2;
  m.aic = neg2ll + 2.0 * npar;
  m.level = st.level;
  m.trend = st.trend;
  m.seasonal = st.seasonal;
  m.d_history = st.d_history;
  m.e_history = st.e_history;

  result.ok = true;
  result.aic = m.aic;
  result.model = std::move(m);
  return result;
}

std::string describe(const Candidate& c) {
  std::string d = "k=" + std::to_string(c.k);
  d += c.use_boxcox ? " boxcox" : " identity";
  d += c.use_trend ? (c.use_damping ? " damped-trend" : " trend") : " no-trend";
  d += " arma(" + std::to_string(c.p) + "," + std::to_string(c.q) + ")";
  return d;
}

}  // namespace

TbatsModel tbats_fit_traced(const std::vector<double>& series,
                            const TbatsOptions& options,
                            std::vector<TbatsCandidateScore>* scores) {
  const auto n = static_cast<int>(series.size());
  if (n < 8) throw std::invalid_argument("tbats_fit: series length must be >= 8");
  if (!all_finite(series))
    throw std::invalid_argument("tbats_fit: non-finite input");

  bool all_positive = true;
  for (double v : series) all_positive = all_positive && v > 0.0;
  double lambda_hint = 1.0;
  if (all_positive) {
    try {
      lambda_hint = boxcox_lambda(series);
    } catch (...) {
      all_positive = false;
    }
  }

  std::vector<Candidate> candidates;
  for (int k : options.k_candidates) {
    if (2.0 * k >= options.period) continue;
    if (n < 2 * k + 4) continue;
    for (int bc = 0; bc < (all_positive ? 2 : 1); ++bc) {
      for (int trend_mode = 0; trend_mode < 3; ++trend_mode) {
        for (int p = 0; p <= options.max_arma; ++p) {
          for (int q = 0; q <= options.max_arma; ++q) {
            Candidate c;
            c.use_boxcox = bc == 1;
            c.use_trend = trend_mode > 0;
            c.use_damping = trend_mode == 2;
            c.p = p;
            c.q = q;
            c.k = k;
            candidates.push_back(c);
          }
        }
      }
    }
  }
  if (candidates.empty())
    throw std::runtime_error("tbats_fit: no feasible candidate for this length");

  std::vector<FitResult> results(candidates.size());
  par::parallel_for(candidates.size(), [&](std::size_t i) {
    results[i] = fit_candidate(series, candidates[i], options.period, lambda_hint);
  });

  if (scores) {
    scores->clear();
    for (std::size_t i = 0; i < candidates.size(); ++i)
      if (results[i].ok)
        scores->push_back({describe(candidates[i]), results[i].aic});
  }

  std::size_t best = candidates.size();
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (!results[i].ok) continue;
    if (best == candidates.size() || results[i].aic < results[best].aic) best = i;
  }
  if (best == candidates.size())
    throw std::runtime_error(
        "tbats_fit: optimizer failed to converge on every candidate");
  return results[best].model;
}

TbatsModel tbats_fit(const std::vector<double>& series,
                     const TbatsOptions& options) {
  return tbats_fit_traced(series, options, nullptr);
}

std::vector<double> tbats_forecast(const TbatsModel& model, int h) {
  if (h < 1) throw std::invalid_argument("tbats_forecast: h must be positive");

  RecursionParams pr;
  pr.alpha = model.alpha;
  pr.beta = model.beta;
  pr.phi = model.damping.value_or(1.0);
  pr.gamma1 = model.gamma1;
  pr.gamma2 = model.gamma2;
  pr.ar = model.ar;
  pr.ma = model.ma;
  pr.use_trend = model.use_trend;
  for (int j = 1; j <= model.k; ++j) {
    const double w = 2.0 * M_PI * j / model.period;
    pr.cos_w.push_back(std::cos(w));
    pr.sin_w.push_back(std::sin(w));
  }

  RecursionState st;
  st.level = model.level;
  st.trend = model.trend;
  st.seasonal = model.seasonal;
  st.d_history = model.d_history;
  st.e_history = model.e_history;

  std::vector<double> out(h);
  for (int j = 0; j < h; ++j) {
    double dhat;
    const double pred = step(st, pr, &dhat);
    update(st, pr, dhat, 0.0);
    out[j] = model.lambda ? inv_boxcox_scalar(pred, *model.lambda) : pred;
  }
  return out;
}

}  // namespace wfc
