#include "weeklyfc/rnn.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "weeklyfc/math.hpp"
#include "weeklyfc/metrics.hpp"
#include "weeklyfc/parallel.hpp"

namespace wfc {

namespace {

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Flat parameter layout per layer: Wi Wf Wc Wo (cell x input each), then
// Ri Rf Rc Ro (cell x cell), peepholes pi pf po, biases bi bf bc bo.
struct LayerShape {
  int input = 0;
  int cell = 0;
  std::size_t offset = 0;

  std::size_t w_block() const { return static_cast<std::size_t>(cell) * input; }
  std::size_t r_block() const { return static_cast<std::size_t>(cell) * cell; }
  std::size_t size() const { return 4 * w_block() + 4 * r_block() + 7 * cell; }

  std::size_t w(int gate) const { return offset + gate * w_block(); }
  std::size_t r(int gate) const { return offset + 4 * w_block() + gate * r_block(); }
  std::size_t peep(int which) const {
    return offset + 4 * w_block() + 4 * r_block() +
           static_cast<std::size_t>(which) * cell;
  }
  std::size_t bias(int gate) const {
    return offset + 4 * w_block() + 4 * r_block() + 3 * static_cast<std::size_t>(cell) +
           static_cast<std::size_t>(gate) * cell;
  }
};

struct StackShape {
  std::vector<LayerShape> layers;
  std::size_t proj_w = 0;  // output x top_cell
  std::size_t proj_b = 0;
  std::size_t total = 0;
  int output = 0;
  int top_cell = 0;
};

StackShape shape_of(const RnnConfig& cfg) {
  StackShape s;
  std::size_t off = 0;
  int input = cfg.input_dimension();
  for (int l = 0; l < cfg.num_hidden_layers; ++l) {
    LayerShape ls;
    ls.input = input;
    ls.cell = cfg.cell_dimension;
    ls.offset = off;
    off += ls.size();
    s.layers.push_back(ls);
    input = cfg.cell_dimension;
  }
  s.proj_w = off;
  off += static_cast<std::size_t>(cfg.output_window) * cfg.cell_dimension;
  s.proj_b = off;
  off += cfg.output_window;
  s.total = off;
  s.output = cfg.output_window;
  s.top_cell = cfg.cell_dimension;
  return s;
}

// Per-instance forward cache: activations for every layer and step.
struct LayerCache {
  // All arrays are T x cell, row-major.
  std::vector<double> i, f, g, o, c, tanh_c, h;
};

void forward_pass(const RnnConfig& cfg, const StackShape& shape,
                  const std::vector<double>& params,
                  const WindowedInstance& inst, std::vector<LayerCache>* caches,
                  std::vector<double>* output) {
  const int T = cfg.input_window;
  const int d_in = cfg.input_dimension();

  // Assemble the layer-0 input sequence: value channel plus covariates.
  std::vector<double> x0(static_cast<std::size_t>(T) * d_in);
  for (int t = 0; t < T; ++t) {
    x0[static_cast<std::size_t>(t) * d_in] = inst.input[t];
    for (int j = 1; j < d_in; ++j)
      x0[static_cast<std::size_t>(t) * d_in + j] =
          inst.covariates[static_cast<std::size_t>(t) * (d_in - 1) + (j - 1)];
  }

  const std::vector<double>* below = &x0;
  std::vector<double> h_seq;
  for (std::size_t l = 0; l < shape.layers.size(); ++l) {
    const LayerShape& ls = shape.layers[l];
    const int d = ls.cell;
    const int D = ls.input;
    LayerCache& cache = (*caches)[l];
    cache.i.assign(static_cast<std::size_t>(T) * d, 0.0);
    cache.f = cache.i;
    cache.g = cache.i;
    cache.o = cache.i;
    cache.c = cache.i;
    cache.tanh_c = cache.i;
    cache.h = cache.i;

    const double* Wi = params.data() + ls.w(0);
    const double* Wf = params.data() + ls.w(1);
    const double* Wc = params.data() + ls.w(2);
    const double* Wo = params.data() + ls.w(3);
    const double* Ri = params.data() + ls.r(0);
    const double* Rf = params.data() + ls.r(1);
    const double* Rc = params.data() + ls.r(2);
    const double* Ro = params.data() + ls.r(3);
    const double* pi = params.data() + ls.peep(0);
    const double* pf = params.data() + ls.peep(1);
    const double* po = params.data() + ls.peep(2);
    const double* bi = params.data() + ls.bias(0);
    const double* bf = params.data() + ls.bias(1);
    const double* bc = params.data() + ls.bias(2);
    const double* bo = params.data() + ls.bias(3);

    std::vector<double> zi(d), zf(d), zc(d), zo(d);
    for (int t = 0; t < T; ++t) {
      const double* x = below->data() + static_cast<std::size_t>(t) * D;
      const double* h_prev =
          t > 0 ? cache.h.data() + static_cast<std::size_t>(t - 1) * d : nullptr;
      const double* c_prev =
          t > 0 ? cache.c.data() + static_cast<std::size_t>(t - 1) * d : nullptr;

      for (int u = 0; u < d; ++u) {
        double si = bi[u], sf = bf[u], sc = bc[u], so = bo[u];
        const std::size_t row = static_cast<std::size_t>(u) * D;
        for (int j = 0; j < D; ++j) {
          const double xv = x[j];
          si += Wi[row + j] * xv;
          sf += Wf[row + j] * xv;
          sc += Wc[row + j] * xv;
          so += Wo[row + j] * xv;
        }
        if (h_prev) {
          const std::size_t rrow = static_cast<std::size_t>(u) * d;
          for (int j = 0; j < d; ++j) {
            const double hv = h_prev[j];
            si += Ri[rrow + j] * hv;
            sf += Rf[rrow + j] * hv;
            sc += Rc[rrow + j] * hv;
            so += Ro[rrow + j] * hv;
          }
        }
        const double cp = c_prev ? c_prev[u] : 0.0;
        si += pi[u] * cp;
        sf += pf[u] * cp;
        zi[u] = si;
        zf[u] = sf;
        zc[u] = sc;
        zo[u] = so;
      }

      double* it = cache.i.data() + static_cast<std::size_t>(t) * d;
      double* ft = cache.f.data() + static_cast<std::size_t>(t) * d;
      double* gt = cache.g.data() + static_cast<std::size_t>(t) * d;
      double* ot = cache.o.data() + static_cast<std::size_t>(t) * d;
      double* ct = cache.c.data() + static_cast<std::size_t>(t) * d;
      double* tct = cache.tanh_c.data() + static_cast<std::size_t>(t) * d;
      double* ht = cache.h.data() + static_cast<std::size_t>(t) * d;
      for (int u = 0; u < d; ++u) {
        it[u] = sigmoid(zi[u]);
        ft[u] = sigmoid(zf[u]);
        gt[u] = std::tanh(zc[u]);
        const double cp = c_prev ? c_prev[u] : 0.0;
        ct[u] = ft[u] * cp + it[u] * gt[u];
        // Output gate sees the current cell state.
        ot[u] = sigmoid(zo[u] + po[u] * ct[u]);
        tct[u] = std::tanh(ct[u]);
        ht[u] = ot[u] * tct[u];
      }
    }
    h_seq = cache.h;
    below = &h_seq;
  }

  // Affine projection from the final hidden state of the top layer.
  const LayerCache& top = caches->back();
  const double* hT =
      top.h.data() + static_cast<std::size_t>(T - 1) * shape.top_cell;
  const double* V = params.data() + shape.proj_w;
  const double* b = params.data() + shape.proj_b;
  output->assign(shape.output, 0.0);
  for (int j = 0; j < shape.output; ++j) {
    double s = b[j];
    const std::size_t row = static_cast<std::size_t>(j) * shape.top_cell;
    for (int u = 0; u < shape.top_cell; ++u) s += V[row + u] * hT[u];
    (*output)[j] = s;
  }
}

// BPTT for one instance; accumulates into grad (same layout as params).
// Returns the squared-error loss term (mean over output steps).
double backward_pass(const RnnConfig& cfg, const StackShape& shape,
                     const std::vector<double>& params,
                     const WindowedInstance& inst, double batch_scale,
                     std::vector<double>* grad) {
  const int T = cfg.input_window;
  const int H = cfg.output_window;
  const auto L = shape.layers.size();

  std::vector<LayerCache> caches(L);
  std::vector<double> pred;
  forward_pass(cfg, shape, params, inst, &caches, &pred);

  double loss = 0.0;
  std::vector<double> d_out(H);
  for (int j = 0; j < H; ++j) {
    const double e = pred[j] - inst.target[j];
    loss += e * e;
    d_out[j] = 2.0 * e / H * batch_scale;
  }
  loss /= H;

  // Projection gradient and the seed for dh at the top layer's last step.
  const int dtop = shape.top_cell;
  const double* hT = caches.back().h.data() + static_cast<std::size_t>(T - 1) * dtop;
  const double* V = params.data() + shape.proj_w;
  std::vector<double> dhT(dtop, 0.0);
  for (int j = 0; j < H; ++j) {
    const std::size_t row = static_cast<std::size_t>(j) * dtop;
    for (int u = 0; u < dtop; ++u) {
      (*grad)[shape.proj_w + row + u] += d_out[j] * hT[u];
      dhT[u] += V[row + u] * d_out[j];
    }
    (*grad)[shape.proj_b + j] += d_out[j];
  }

  // External dh per layer per step; the top layer starts with the
  // projection seed, lower layers receive dx from the layer above.
  std::vector<double> dh_ext(static_cast<std::size_t>(T) * dtop, 0.0);
  for (int u = 0; u < dtop; ++u)
    dh_ext[static_cast<std::size_t>(T - 1) * dtop + u] = dhT[u];

  for (int l = static_cast<int>(L) - 1; l >= 0; --l) {
    const LayerShape& ls = shape.layers[l];
    const int d = ls.cell;
    const int D = ls.input;
    const LayerCache& cache = caches[l];

    // Input sequence of this layer.
    const std::vector<double>* below_h = nullptr;
    std::vector<double> x0;
    if (l == 0) {
      const int d_in = cfg.input_dimension();
      x0.resize(static_cast<std::size_t>(T) * d_in);
      for (int t = 0; t < T; ++t) {
        x0[static_cast<std::size_t>(t) * d_in] = inst.input[t];
        for (int j = 1; j < d_in; ++j)
          x0[static_cast<std::size_t>(t) * d_in + j] =
              inst.covariates[static_cast<std::size_t>(t) * (d_in - 1) + (j - 1)];
      }
    } else {
      below_h = &caches[l - 1].h;
    }
    auto x_at = [&](int t) {
      return l == 0 ? x0.data() + static_cast<std::size_t>(t) * D
                    : below_h->data() + static_cast<std::size_t>(t) * D;
    };

    double* gWi = grad->data() + ls.w(0);
    double* gWf = grad->data() + ls.w(1);
    double* gWc = grad->data() + ls.w(2);
    double* gWo = grad->data() + ls.w(3);
    double* gRi = grad->data() + ls.r(0);
    double* gRf = grad->data() + ls.r(1);
    double* gRc = grad->data() + ls.r(2);
    double* gRo = grad->data() + ls.r(3);
    double* gpi = grad->data() + ls.peep(0);
    double* gpf = grad->data() + ls.peep(1);
    double* gpo = grad->data() + ls.peep(2);
    double* gbi = grad->data() + ls.bias(0);
    double* gbf = grad->data() + ls.bias(1);
    double* gbc = grad->data() + ls.bias(2);
    double* gbo = grad->data() + ls.bias(3);

    const double* Wi = params.data() + ls.w(0);
    const double* Wf = params.data() + ls.w(1);
    const double* Wc = params.data() + ls.w(2);
    const double* Wo = params.data() + ls.w(3);
    const double* Ri = params.data() + ls.r(0);
    const double* Rf = params.data() + ls.r(1);
    const double* Rc = params.data() + ls.r(2);
    const double* Ro = params.data() + ls.r(3);
    const double* pi = params.data() + ls.peep(0);
    const double* pf = params.data() + ls.peep(1);
    const double* po = params.data() + ls.peep(2);

    std::vector<double> dc_next(d, 0.0), dh_rec(d, 0.0);
    std::vector<double> dx(static_cast<std::size_t>(T) * D, 0.0);
    std::vector<double> dzi(d), dzf(d), dzg(d), dzo(d);

    for (int t = T - 1; t >= 0; --t) {
      const double* it = cache.i.data() + static_cast<std::size_t>(t) * d;
      const double* ft = cache.f.data() + static_cast<std::size_t>(t) * d;
      const double* gt = cache.g.data() + static_cast<std::size_t>(t) * d;
      const double* ot = cache.o.data() + static_cast<std::size_t>(t) * d;
      const double* ct = cache.c.data() + static_cast<std::size_t>(t) * d;
      const double* tct = cache.tanh_c.data() + static_cast<std::size_t>(t) * d;
      const double* c_prev =
          t > 0 ? cache.c.data() + static_cast<std::size_t>(t - 1) * d : nullptr;
      const double* h_prev =
          t > 0 ? cache.h.data() + static_cast<std::size_t>(t - 1) * d : nullptr;

      for (int u = 0; u < d; ++u) {
        const double dh = dh_ext[static_cast<std::size_t>(t) * d + u] + dh_rec[u];
        const double dout_gate = dh * tct[u];
        const double dzo_u = dout_gate * ot[u] * (1.0 - ot[u]);
        double dc = dc_next[u] + dh * ot[u] * (1.0 - tct[u] * tct[u]) +
                    dzo_u * po[u];
        const double dzg_u = dc * it[u] * (1.0 - gt[u] * gt[u]);
        const double dzi_u = dc * gt[u] * it[u] * (1.0 - it[u]);
        const double cp = c_prev ? c_prev[u] : 0.0;
        const double dzf_u = dc * cp * ft[u] * (1.0 - ft[u]);
        dzi[u] = dzi_u;
        dzf[u] = dzf_u;
        dzg[u] = dzg_u;
        dzo[u] = dzo_u;

        gpi[u] += dzi_u * cp;
        gpf[u] += dzf_u * cp;
        gpo[u] += dzo_u * ct[u];
        gbi[u] += dzi_u;
        gbf[u] += dzf_u;
        gbc[u] += dzg_u;
        gbo[u] += dzo_u;
        dc_next[u] = dc * ft[u] + dzi_u * pi[u] + dzf_u * pf[u];
      }

      const double* x = x_at(t);
      for (int u = 0; u < d; ++u) {
        const std::size_t row = static_cast<std::size_t>(u) * D;
        for (int j = 0; j < D; ++j) {
          gWi[row + j] += dzi[u] * x[j];
          gWf[row + j] += dzf[u] * x[j];
          gWc[row + j] += dzg[u] * x[j];
          gWo[row + j] += dzo[u] * x[j];
        }
      }
      if (h_prev) {
        for (int u = 0; u < d; ++u) {
          const std::size_t row = static_cast<std::size_t>(u) * d;
          for (int j = 0; j < d; ++j) {
            gRi[row + j] += dzi[u] * h_prev[j];
            gRf[row + j] += dzf[u] * h_prev[j];
            gRc[row + j] += dzg[u] * h_prev[j];
            gRo[row + j] += dzo[u] * h_prev[j];
          }
        }
      }

      std::fill(dh_rec.begin(), dh_rec.end(), 0.0);
      if (t > 0) {
        for (int u = 0; u < d; ++u) {
          const std::size_t row = static_cast<std::size_t>(u) * d;
          for (int j = 0; j < d; ++j) {
            dh_rec[j] += Ri[row + j] * dzi[u] + Rf[row + j] * dzf[u] +
                         Rc[row + j] * dzg[u] + Ro[row + j] * dzo[u];
          }
        }
      }
      double* dx_t = dx.data() + static_cast<std::size_t>(t) * D;
      for (int u = 0; u < d; ++u) {
        const std::size_t row = static_cast<std::size_t>(u) * D;
        for (int j = 0; j < D; ++j) {
          dx_t[j] += Wi[row + j] * dzi[u] + Wf[row + j] * dzf[u] +
                     Wc[row + j] * dzg[u] + Wo[row + j] * dzo[u];
        }
      }
    }

    if (l > 0) dh_ext = std::move(dx);  // feeds the layer below
  }

  return loss;
}

}  // namespace

void RnnConfig::validate() const {
  if (cell_dimension < 1 || mini_batch_size < 1 || max_epochs < 1 ||
      epoch_size < 1 || num_hidden_layers < 1 || input_window < 1 ||
      output_window < 1 || fourier_pairs < 1)
    throw std::invalid_argument("RnnConfig: counts must be >= 1");
  if (init_stddev <= 0.0 || noise_stddev <= 0.0)
    throw std::invalid_argument("RnnConfig: stddevs must be positive");
  if (l2_weight < 0.0)
    throw std::invalid_argument("RnnConfig: l2_weight must be >= 0");
}

int rnn_input_window(SeasonalityMode mode, int horizon) {
  if (mode == SeasonalityMode::seasonal_lag_window) return 53;
  return static_cast<int>(std::ceil(1.25 * horizon));
}

PreprocessedSeries rnn_preprocess(const std::vector<double>& series) {
  if (series.empty()) throw std::invalid_argument("rnn_preprocess: empty series");
  PreprocessedSeries out;
  out.mean = mean_of(series);
  if (out.mean <= 0.0)
    throw std::invalid_argument("rnn_preprocess: series mean must be positive");
  out.values.reserve(series.size());
  for (double y : series)
    out.values.push_back(std::log(std::max(y / out.mean, 1e-6)));
  return out;
}

namespace {

std::vector<double> window_covariates(const RnnConfig& cfg, int first_position) {
  if (cfg.seasonality_mode != SeasonalityMode::fourier_covariates) return {};
  const FourierSpec spec(cfg.period, cfg.fourier_pairs);
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(cfg.input_window) * 2 * cfg.fourier_pairs);
  for (int t = 0; t < cfg.input_window; ++t) {
    const long pos = std::max(0, first_position + t);
    const auto row = fourier_row(spec, pos);
    out.insert(out.end(), row.begin(), row.end());
  }
  return out;
}

WindowedInstance padded_instance(const PreprocessedSeries& s, int series_index,
                                 const RnnConfig& cfg, bool with_target) {
  const int W = cfg.input_window;
  const int H = cfg.output_window;
  const auto n = static_cast<int>(s.values.size());
  const int body = with_target ? n - H : n;

  WindowedInstance inst;
  inst.series_index = series_index;
  inst.padded = true;
  inst.input.assign(W, s.values.front());
  const int copy = std::min(body, W);
  for (int j = 0; j < copy; ++j)
    inst.input[W - copy + j] = s.values[body - copy + j];
  inst.covariates = window_covariates(cfg, body - W);
  if (with_target) {
    if (body < 0)
      throw std::invalid_argument("series shorter than the output window");
    inst.target.assign(s.values.end() - H, s.values.end());
  }
  return inst;
}

}  // namespace

std::vector<WindowedInstance> make_windows(
    const std::vector<PreprocessedSeries>& series, const RnnConfig& config) {
  config.validate();
  const int W = config.input_window;
  const int H = config.output_window;
  std::vector<WindowedInstance> out;
  for (std::size_t s = 0; s < series.size(); ++s) {
    const auto n = static_cast<int>(series[s].values.size());
    if (n < W + H) {
      out.push_back(padded_instance(series[s], static_cast<int>(s), config,
                                    /*with_target=*/true));
      continue;
    }
    for (int start = 0; start + W + H <= n; ++start) {
      WindowedInstance inst;
      inst.series_index = static_cast<int>(s);
      inst.input.assign(series[s].values.begin() + start,
                        series[s].values.begin() + start + W);
      inst.target.assign(series[s].values.begin() + start + W,
                         series[s].values.begin() + start + W + H);
      inst.covariates = window_covariates(config, start);
      out.push_back(std::move(inst));
    }
  }
  return out;
}

WindowedInstance final_window(const PreprocessedSeries& series, int series_index,
                              const RnnConfig& config) {
  const int W = config.input_window;
  const auto n = static_cast<int>(series.values.size());
  if (n < W) {
    return padded_instance(series, series_index, config, /*with_target=*/false);
  }
  WindowedInstance inst;
  inst.series_index = series_index;
  inst.input.assign(series.values.end() - W, series.values.end());
  inst.covariates = window_covariates(config, n - W);
  return inst;
}

LstmStack lstm_init(const RnnConfig& config, std::uint64_t seed) {
  config.validate();
  LstmStack stack;
  stack.config = config;
  const StackShape shape = shape_of(config);
  stack.params.assign(shape.total, 0.0);

  Rng rng(mix_seed(seed, 0x1517));
  for (const auto& ls : shape.layers) {
    for (int gate = 0; gate < 4; ++gate)
      for (std::size_t j = 0; j < ls.w_block(); ++j)
        stack.params[ls.w(gate) + j] = rng.normal(0.0, config.init_stddev);
    for (int gate = 0; gate < 4; ++gate)
      for (std::size_t j = 0; j < ls.r_block(); ++j)
        stack.params[ls.r(gate) + j] = rng.normal(0.0, config.init_stddev);
    for (int which = 0; which < 3; ++which)
      for (int u = 0; u < ls.cell; ++u)
        stack.params[ls.peep(which) + u] = rng.normal(0.0, config.init_stddev);
    for (int u = 0; u < ls.cell; ++u) stack.params[ls.bias(1) + u] = 1.0;
  }
  for (std::size_t j = shape.proj_w; j < shape.proj_b; ++j)
    stack.params[j] = rng.normal(0.0, config.init_stddev);
  return stack;
}

std::vector<ParamBlock> lstm_parameter_layout(const RnnConfig& config) {
  const StackShape shape = shape_of(config);
  std::vector<ParamBlock> blocks;
  const char* gates = "ifco";
  for (std::size_t l = 0; l < shape.layers.size(); ++l) {
    const LayerShape& ls = shape.layers[l];
    const std::string prefix = "l" + std::to_string(l) + ".";
    for (int g = 0; g < 4; ++g)
      blocks.push_back({prefix + "W" + gates[g], ls.w(g), ls.cell, ls.input});
    for (int g = 0; g < 4; ++g)
      blocks.push_back({prefix + "R" + gates[g], ls.r(g), ls.cell, ls.cell});
    blocks.push_back({prefix + "pi", ls.peep(0), ls.cell, 1});
    blocks.push_back({prefix + "pf", ls.peep(1), ls.cell, 1});
    blocks.push_back({prefix + "po", ls.peep(2), ls.cell, 1});
    for (int g = 0; g < 4; ++g)
      blocks.push_back({prefix + "b" + gates[g], ls.bias(g), ls.cell, 1});
  }
  blocks.push_back({"proj.W", shape.proj_w, shape.output, shape.top_cell});
  blocks.push_back({"proj.b", shape.proj_b, shape.output, 1});
  return blocks;
}

std::vector<double> lstm_forward(const LstmStack& stack,
                                 const WindowedInstance& instance) {
  const StackShape shape = shape_of(stack.config);
  if (static_cast<int>(instance.input.size()) != stack.config.input_window)
    throw std::invalid_argument("lstm_forward: window length mismatch");
  std::vector<LayerCache> caches(shape.layers.size());
  std::vector<double> out;
  forward_pass(stack.config, shape, stack.params, instance, &caches, &out);
  return out;
}

double lstm_loss(const LstmStack& stack,
                 const std::vector<const WindowedInstance*>& batch) {
  if (batch.empty()) throw std::invalid_argument("lstm_loss: empty batch");
  const StackShape shape = shape_of(stack.config);
  std::vector<double> losses(batch.size());
  par::parallel_for(batch.size(), [&](std::size_t b) {
    std::vector<LayerCache> caches(shape.layers.size());
    std::vector<double> pred;
    forward_pass(stack.config, shape, stack.params, *batch[b], &caches, &pred);
    double l = 0.0;
    for (std::size_t j = 0; j < pred.size(); ++j) {
      const double e = pred[j] - batch[b]->target[j];
      l += e * e;
    }
    losses[b] = l / static_cast<double>(pred.size());
  });
  double total = 0.0;
  for (double l : losses) total += l;
  total /= static_cast<double>(batch.size());
  double sq = 0.0;
  for (double p : stack.params) sq += p * p;
  return total + stack.config.l2_weight * sq;
}

std::vector<double> lstm_gradient(const LstmStack& stack,
                                  const std::vector<const WindowedInstance*>& batch,
                                  double* loss_out) {
  if (batch.empty()) throw std::invalid_argument("lstm_gradient: empty batch");
  const StackShape shape = shape_of(stack.config);
  const double batch_scale = 1.0 / static_cast<double>(batch.size());

  // Per-instance buffers, reduced in index order so the result does not
  // depend on the worker count.
  std::vector<std::vector<double>> grads(batch.size());
  std::vector<double> losses(batch.size());
  par::parallel_for(batch.size(), [&](std::size_t b) {
    grads[b].assign(shape.total, 0.0);
    losses[b] = backward_pass(stack.config, shape, stack.params, *batch[b],
                              batch_scale, &grads[b]);
  });

  std::vector<double> grad(shape.total, 0.0);
  for (const auto& g : grads)
    for (std::size_t j = 0; j < grad.size(); ++j) grad[j] += g[j];

  double loss = 0.0;
  for (double l : losses) loss += l;
  loss *= batch_scale;
  double sq = 0.0;
  for (std::size_t j = 0; j < grad.size(); ++j) {
    grad[j] += 2.0 * stack.config.l2_weight * stack.params[j];
    sq += stack.params[j] * stack.params[j];
  }
  if (loss_out) *loss_out = loss + stack.config.l2_weight * sq;
  return grad;
}

namespace {

struct CocobState {
  std::vector<double> max_grad;  // L
  std::vector<double> abs_sum;   // G
  std::vector<double> reward;    // R
  std::vector<double> grad_sum;  // theta
  std::vector<double> initial;   // w1
  double alpha = 100.0;

  explicit CocobState(const std::vector<double>& w, double a)
      : max_grad(w.size(), 1e-8),
        abs_sum(w.size(), 0.0),
        reward(w.size(), 0.0),
        grad_sum(w.size(), 0.0),
        initial(w),
        alpha(a) {}

  void step(std::vector<double>& w, const std::vector<double>& g) {
    for (std::size_t j = 0; j < w.size(); ++j) {
      const double gj = g[j];
      max_grad[j] = std::max(max_grad[j], std::fabs(gj));
      abs_sum[j] += std::fabs(gj);
      reward[j] = std::max(reward[j] - (w[j] - initial[j]) * gj, 0.0);
      grad_sum[j] += gj;
      const double denom =
          max_grad[j] * std::max(abs_sum[j] + max_grad[j], alpha * max_grad[j]);
      w[j] = initial[j] - grad_sum[j] / denom * (max_grad[j] + reward[j]);
    }
  }
};

struct AdamState {
  std::vector<double> m, v;
  double beta1 = 0.9, beta2 = 0.999, lr = 1e-3, eps = 1e-8;
  long t = 0;

  explicit AdamState(std::size_t n) : m(n, 0.0), v(n, 0.0) {}

  void step(std::vector<double>& w, const std::vector<double>& g) {
    ++t;
    const double bc1 = 1.0 - std::pow(beta1, t);
    const double bc2 = 1.0 - std::pow(beta2, t);
    for (std::size_t j = 0; j < w.size(); ++j) {
      m[j] = beta1 * m[j] + (1.0 - beta1) * g[j];
      v[j] = beta2 * v[j] + (1.0 - beta2) * g[j] * g[j];
      w[j] -= lr * (m[j] / bc1) / (std::sqrt(v[j] / bc2) + eps);
    }
  }
};

}  // namespace

TrainResult lstm_train(const std::vector<PreprocessedSeries>& series,
                       const RnnConfig& config, std::uint64_t seed) {
  config.validate();
  auto windows = make_windows(series, config);
  if (windows.empty()) throw std::invalid_argument("lstm_train: no windows");

  TrainResult result;
  result.stack = lstm_init(config, seed);
  LstmStack& stack = result.stack;

  // Fixed evaluation subset for the descent diagnostic.
  std::vector<const WindowedInstance*> eval_batch;
  for (std::size_t i = 0; i < windows.size() && i < 2000; ++i)
    eval_batch.push_back(&windows[i]);
  result.initial_loss = lstm_loss(stack, eval_batch);

  Rng rng(mix_seed(seed, 0xBA7C4));
  CocobState cocob(stack.params, config.cocob_alpha);
  AdamState adam(stack.params.size());

  const auto n_windows = windows.size();
  std::vector<WindowedInstance> noisy(config.mini_batch_size);
  std::vector<const WindowedInstance*> batch(config.mini_batch_size);

  for (int epoch = 0; epoch < config.max_epochs; ++epoch) {
    for (int step = 0; step < config.epoch_size; ++step) {
      // Sequential sampling and noise draws keep runs reproducible for any
      // worker count.
      for (int b = 0; b < config.mini_batch_size; ++b) {
        const auto idx = static_cast<std::size_t>(
            rng.uniform_int(0, static_cast<int>(n_windows) - 1));
        noisy[b] = windows[idx];
        for (double& v : noisy[b].input)
          v += rng.normal(0.0, config.noise_stddev);
        batch[b] = &noisy[b];
      }
      double loss = 0.0;
      const auto grad = lstm_gradient(stack, batch, &loss);
      if (!std::isfinite(loss))
        throw std::runtime_error("lstm_train: non-finite loss, aborting");
      if (config.optimizer == RnnOptimizer::cocob)
        cocob.step(stack.params, grad);
      else
        adam.step(stack.params, grad);
    }
  }

  result.final_loss = lstm_loss(stack, eval_batch);
  return result;
}

std::vector<std::vector<double>> rnn_forecast(
    const LstmStack& stack, const std::vector<PreprocessedSeries>& series) {
  std::vector<std::vector<double>> out(series.size());
  par::parallel_for(series.size(), [&](std::size_t s) {
    const auto window = final_window(series[s], static_cast<int>(s), stack.config);
    auto pred = lstm_forward(stack, window);
    for (double& v : pred) v = std::max(series[s].mean * std::exp(v), 0.0);
    out[s] = std::move(pred);
  });
  return out;
}

std::vector<std::vector<double>> rnn_fit_forecast(
    const std::vector<std::vector<double>>& series_values,
    const RnnConfig& config, std::uint64_t seed) {
  std::vector<PreprocessedSeries> prepared;
  prepared.reserve(series_values.size());
  for (const auto& v : series_values) prepared.push_back(rnn_preprocess(v));
  const auto trained = lstm_train(prepared, config, seed);
  return rnn_forecast(trained.stack, prepared);
}

RnnTuneResult rnn_tune(const WeeklyDataset& dataset, int budget,
                       std::uint64_t seed, SeasonalityMode mode,
                       SmapeVariant variant) {
  if (budget < 1) throw std::invalid_argument("rnn_tune: budget must be >= 1");

  std::vector<std::vector<double>> training;
  std::vector<std::vector<double>> validation;
  for (const auto& s : dataset.series) {
    auto split = split_last_h(s, dataset.horizon);
    training.push_back(std::move(split.training));
    validation.push_back(std::move(split.validation));
  }
  std::vector<PreprocessedSeries> prepared;
  prepared.reserve(training.size());
  for (const auto& t : training) prepared.push_back(rnn_preprocess(t));

  Rng rng(mix_seed(seed, 0x7E57));
  RnnTuneResult result;
  result.candidate_smape.reserve(budget);

  for (int trial = 0; trial < budget; ++trial) {
    RnnConfig cfg;
    cfg.cell_dimension = rng.uniform_int(16, 64);
    cfg.mini_batch_size = rng.uniform_int(8, 64);
    cfg.max_epochs = rng.uniform_int(5, 30);
    cfg.epoch_size = rng.uniform_int(2, 10);
    cfg.num_hidden_layers = rng.uniform_int(1, 2);
    cfg.l2_weight = rng.log_uniform(1e-5, 1e-2);
    cfg.init_stddev = rng.log_uniform(1e-4, 0.5);
    cfg.noise_stddev = rng.log_uniform(1e-4, 0.1);
    cfg.seasonality_mode = mode;
    cfg.output_window = dataset.horizon;
    cfg.input_window = rnn_input_window(mode, dataset.horizon);
    cfg.period = dataset.seasonal_period_real;

    double score = std::numeric_limits<double>::infinity();
    try {
      const auto trained = lstm_train(prepared, cfg, mix_seed(seed, 1000 + trial));
      const auto forecasts = rnn_forecast(trained.stack, prepared);
      std::vector<double> per_series(forecasts.size());
      for (std::size_t s = 0; s < forecasts.size(); ++s)
        per_series[s] = smape(forecasts[s], validation[s], variant);
      score = mean_of(per_series);
    } catch (const std::exception&) {
      // Leave the candidate at +inf.
    }
    result.candidate_smape.push_back(score);
    if (trial == 0 || score < result.validation_smape) {
      result.validation_smape = score;
      result.config = cfg;
    }
  }
  return result;
}

void save_rnn_checkpoint(const std::string& path, const LstmStack& stack) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
  const auto& c = stack.config;
  out << "wfc-rnn-checkpoint v1\n";
  out << "cell_dimension " << c.cell_dimension << "\n";
  out << "mini_batch_size " << c.mini_batch_size << "\n";
  out << "max_epochs " << c.max_epochs << "\n";
  out << "epoch_size " << c.epoch_size << "\n";
  out << "num_hidden_layers " << c.num_hidden_layers << "\n";
  out << "l2_weight " << c.l2_weight << "\n";
  out << "init_stddev " << c.init_stddev << "\n";
  out << "noise_stddev " << c.noise_stddev << "\n";
  out << "input_window " << c.input_window << "\n";
  out << "output_window " << c.output_window << "\n";
  out << "seasonality_mode "
      << (c.seasonality_mode == SeasonalityMode::fourier_covariates ? "fourier"
                                                                    : "lag")
      << "\n";
  out << "fourier_pairs " << c.fourier_pairs << "\n";
  out << "period " << c.period << "\n";
  out << "optimizer "
      << (c.optimizer == RnnOptimizer::cocob ? "cocob" : "adam") << "\n";
  out << "cocob_alpha " << c.cocob_alpha << "\n";
  out << "params " << stack.params.size() << "\n";
  char buf[64];
  for (double p : stack.params) {
    std::snprintf(buf, sizeof buf, "%.17g", p);
    out << buf << "\n";
  }
}

LstmStack load_rnn_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
  std::string magic;
  std::getline(in, magic);
  if (magic != "wfc-rnn-checkpoint v1")
    throw std::runtime_error("unrecognized checkpoint format: " + path);

  LstmStack stack;
  RnnConfig& c = stack.config;
  std::string key;
  std::size_t n_params = 0;
  while (in >> key) {
    if (key == "cell_dimension") in >> c.cell_dimension;
    else if (key == "mini_batch_size") in >> c.mini_batch_size;
    else if (key == "max_epochs") in >> c.max_epochs;
    else if (key == "epoch_size") in >> c.epoch_size;
    else if (key == "num_hidden_layers") in >> c.num_hidden_layers;
    else if (key == "l2_weight") in >> c.l2_weight;
    else if (key == "init_stddev") in >> c.init_stddev;
    else if (key == "noise_stddev") in >> c.noise_stddev;
    else if (key == "input_window") in >> c.input_window;
    else if (key == "output_window") in >> c.output_window;
    else if (key == "seasonality_mode") {
      std::string mode;
      in >> mode;
      c.seasonality_mode = mode == "fourier" ? SeasonalityMode::fourier_covariates
                                             : SeasonalityMode::seasonal_lag_window;
    } else if (key == "fourier_pairs") in >> c.fourier_pairs;
    else if (key == "period") in >> c.period;
    else if (key == "optimizer") {
      std::string opt;
      in >> opt;
      c.optimizer = opt == "adam" ? RnnOptimizer::adam : RnnOptimizer::cocob;
    } else if (key == "cocob_alpha") in >> c.cocob_alpha;
    else if (key == "params") {
      in >> n_params;
      break;
    } else {
      throw std::runtime_error("unknown checkpoint key: " + key);
    }
  }
  stack.params.resize(n_params);
  for (std::size_t j = 0; j < n_params; ++j) in >> stack.params[j];
  if (!in) throw std::runtime_error("truncated checkpoint: " + path);
  const StackShape shape = shape_of(c);
  if (shape.total != n_params)
    throw std::runtime_error("checkpoint parameter count mismatch");
  return stack;
}

}  // namespace wfc
