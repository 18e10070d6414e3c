#pragma once

#include <optional>
#include <string>
#include <vector>

namespace wfc {

// Innovations state-space model with Box-Cox transform, (damped) trend,
// trigonometric seasonality and ARMA disturbances. Fitted over a lattice of
// structural alternatives; the AIC arbitrates.
struct TbatsModel {
  std::optional<double> lambda;    // Box-Cox parameter, nullopt = transform off
  bool use_trend = false;
  std::optional<double> damping;   // phi, engaged only with trend
  int k = 1;                       // Fourier pairs in the seasonal block
  double period = 52.18;

  double alpha = 0.1;
  double beta = 0.0;
  double gamma1 = 0.0;
  double gamma2 = 0.0;
  std::vector<double> ar;
  std::vector<double> ma;

  double aic = 0.0;
  double sigma2 = 0.0;

  // End-of-sample state, ready for forecasting.
  double level = 0.0;
  double trend = 0.0;
  std::vector<double> seasonal;  // interleaved s_j, s*_j
  std::vector<double> d_history; // newest first, length p
  std::vector<double> e_history; // newest first, length q

  int state_dimension() const {
    return 2 + 2 * k + static_cast<int>(ar.size() + ma.size());
  }
};

struct TbatsOptions {
  double period = 52.18;
  std::vector<int> k_candidates{1, 2, 3, 5, 7, 10};
  int max_arma = 2;  // ARMA grid p, q <= max_arma
};

TbatsModel tbats_fit(const std::vector<double>& series,
                     const TbatsOptions& options = {});

std::vector<double> tbats_forecast(const TbatsModel& model, int h);

// AIC of every candidate evaluated during the last lattice sweep, exposed so
// the argmin contract is checkable.
struct TbatsCandidateScore {
  std::string description;
  double aic = 0.0;
};

TbatsModel tbats_fit_traced(const std::vector<double>& series,
                            const TbatsOptions& options,
                            std::vector<TbatsCandidateScore>* scores);

}  // namespace wfc
