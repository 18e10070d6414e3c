#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "weeklyfc/metrics.hpp"
#include "weeklyfc/series.hpp"

namespace wfc {

enum class SeasonalityMode { fourier_covariates, seasonal_lag_window };
enum class RnnOptimizer { cocob, adam };

struct RnnConfig {
  int cell_dimension = 32;
  int mini_batch_size = 16;
  int max_epochs = 10;
  int epoch_size = 5;
  int num_hidden_layers = 1;
  double l2_weight = 1e-4;
  double init_stddev = 0.1;
  double noise_stddev = 1e-3;
  int input_window = 53;
  int output_window = 8;
  SeasonalityMode seasonality_mode = SeasonalityMode::seasonal_lag_window;
  int fourier_pairs = 5;      // covariate pairs in fourier mode
  double period = 52.18;
  RnnOptimizer optimizer = RnnOptimizer::cocob;
  double cocob_alpha = 100.0;

  int input_dimension() const {
    return seasonality_mode == SeasonalityMode::fourier_covariates
               ? 1 + 2 * fourier_pairs
               : 1;
  }
  void validate() const;
};

// Window length implied by the seasonality mode: one full seasonal cycle
// plus one in lag mode, ceil(1.25 * horizon) with Fourier covariates.
int rnn_input_window(SeasonalityMode mode, int horizon);

struct PreprocessedSeries {
  std::vector<double> values;  // ln(max(y/mean, 1e-6))
  double mean = 0.0;
};

PreprocessedSeries rnn_preprocess(const std::vector<double>& series);

struct WindowedInstance {
  int series_index = 0;
  std::vector<double> input;       // input_window normalized-log values
  std::vector<double> covariates;  // input_window x 2*fourier_pairs, row-major
  std::vector<double> target;      // output_window normalized-log values
  bool padded = false;
};

// Sliding windows with stride 1 over every preprocessed series. Series
// shorter than input+output are left-padded with their first value.
std::vector<WindowedInstance> make_windows(
    const std::vector<PreprocessedSeries>& series, const RnnConfig& config);

// Final input window of one series, used at forecast time.
WindowedInstance final_window(const PreprocessedSeries& series, int series_index,
                              const RnnConfig& config);

// Stacked peephole-LSTM with an affine projection from the last hidden state
// of the top layer to output_window values. All parameters live in one flat
// vector so the optimizers and the finite-difference check share a layout.
struct LstmStack {
  RnnConfig config;
  std::vector<double> params;

  std::size_t parameter_count() const { return params.size(); }
};

LstmStack lstm_init(const RnnConfig& config, std::uint64_t seed);

// Named view of the flat parameter vector: per layer l the blocks
// "l<i>.Wi|Wf|Wc|Wo" (cell x input), "l<i>.Ri|Rf|Rc|Ro" (cell x cell),
// "l<i>.pi|pf|po" and "l<i>.bi|bf|bc|bo" (cell), then "proj.W"
// (output x cell) and "proj.b".
struct ParamBlock {
  std::string name;
  std::size_t offset = 0;
  int rows = 0;
  int cols = 0;
};

std::vector<ParamBlock> lstm_parameter_layout(const RnnConfig& config);

std::vector<double> lstm_forward(const LstmStack& stack,
                                 const WindowedInstance& instance);

// Mean-squared-error loss over the batch targets plus l2 * ||params||^2.
double lstm_loss(const LstmStack& stack,
                 const std::vector<const WindowedInstance*>& batch);

// Analytic gradient of lstm_loss via backpropagation through time.
std::vector<double> lstm_gradient(const LstmStack& stack,
                                  const std::vector<const WindowedInstance*>& batch,
                                  double* loss_out = nullptr);

struct TrainResult {
  LstmStack stack;
  double initial_loss = 0.0;
  double final_loss = 0.0;
};

TrainResult lstm_train(const std::vector<PreprocessedSeries>& series,
                       const RnnConfig& config, std::uint64_t seed);

// One direct multi-step forecast per series, inverted to the original scale
// and clamped at zero.
std::vector<std::vector<double>> rnn_forecast(
    const LstmStack& stack, const std::vector<PreprocessedSeries>& series);

// Convenience: preprocess + train + forecast h steps for every series.
std::vector<std::vector<double>> rnn_fit_forecast(
    const std::vector<std::vector<double>>& series_values,
    const RnnConfig& config, std::uint64_t seed);

struct RnnTuneResult {
  RnnConfig config;
  double validation_smape = 0.0;
  std::vector<double> candidate_smape;
};

// Seeded random search; each candidate trains on the head of every series
// and is scored by mean sMAPE on the last-horizon validation windows.
RnnTuneResult rnn_tune(
    const WeeklyDataset& dataset, int budget, std::uint64_t seed,
    SeasonalityMode mode = SeasonalityMode::seasonal_lag_window,
    SmapeVariant variant = SmapeVariant::standard);

// Checkpoint: text file with config and all parameter blocks.
void save_rnn_checkpoint(const std::string& path, const LstmStack& stack);
LstmStack load_rnn_checkpoint(const std::string& path);

}  // namespace wfc
