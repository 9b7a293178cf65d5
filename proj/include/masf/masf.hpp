#pragma once

#include <cmath>
#include <optional>
#include <string>

#include "masf/field.hpp"
#include "masf/schedule.hpp"
#include "masf/wavelet.hpp"

namespace masf {

enum class WeightMode { constant, linear, quadratic };

enum class MasfStage {
  data_space_only,           // weighted EMA directly on the x0 estimate
  frequency,                 // per-subband EMA, unit frequency weights
  frequency_plus_weighting,  // per-subband EMA with the linear beta ramp
};

inline const char* to_string(WeightMode m) {
  switch (m) {
    case WeightMode::constant: return "constant";
    case WeightMode::linear: return "linear";
    case WeightMode::quadratic: return "quadratic";
  }
  return "?";
}

inline const char* to_string(MasfStage s) {
  switch (s) {
    case MasfStage::data_space_only: return "data_space_only";
    case MasfStage::frequency: return "frequency";
    case MasfStage::frequency_plus_weighting: return "frequency_plus_weighting";
  }
  return "?";
}

struct MasfConfig {
  double gamma = 0.5;
  WeightMode weight_mode = WeightMode::linear;
  double beta_ll_start = 1.03;
  double beta_ll_end = 1.0;
  double beta_hf_start = 1.0;
  double beta_hf_end = 1.13;
  MasfStage stage = MasfStage::frequency_plus_weighting;

  void validate() const {
    if (!(gamma >= 0.0 && gamma <= 1.0)) throw ParameterError("masf: gamma must lie in [0, 1]");
    for (double b : {beta_ll_start, beta_ll_end, beta_hf_start, beta_hf_end}) {
      if (!(b > 0.0) || !std::isfinite(b)) throw ParameterError("masf: beta endpoints must be positive");
    }
  }
};

// Moving averages carried across the steps of one trajectory.
struct MasfState {
  std::optional<SubbandSet> bands;  // frequency stages
  std::optional<Field> data;        // data_space_only

  bool initialized() const { return bands.has_value() || data.has_value(); }
};

struct BetaPair {
  double ll;
  double hf;  // shared by lh, hl, hh
};

// Spatial weight w: ones, |x_cur - x_bar|, or |x_cur - x_bar|^2. Not clamped.
inline Field adaptive_weight(const Field& x_cur, const Field& x_bar, WeightMode mode) {
  switch (mode) {
    case WeightMode::constant:
      require_same_shape(x_cur, x_bar, "adaptive_weight");
      return Field(x_cur.shape(), 1.0);
    case WeightMode::linear:
      return abs_diff(x_cur, x_bar);
    case WeightMode::quadratic:
      return zip_with(x_cur, x_bar, [](double a, double b) { return (a - b) * (a - b); }, "adaptive_weight");
  }
  throw ParameterError("unknown weight mode");
}

// Clamp w to [0, 1/gamma] so that gamma * w stays a convex coefficient.
inline Field clamp_weight(const Field& w, double gamma) {
  if (gamma <= 0.0) return w;
  const double hi = 1.0 / gamma;
  return w.map([hi](double v) { return std::clamp(v, 0.0, hi); });
}

// (1 - gamma w) o x_cur + gamma w o x_bar
inline Field ema_update(const Field& x_cur, const Field& x_bar, double gamma, const Field& w) {
  require_same_shape(x_cur, x_bar, "ema_update");
  require_same_shape(x_cur, w, "ema_update");
  auto cv = x_cur.values();
  auto bv = x_bar.values();
  auto wv = w.values();
  std::vector<double> out(cv.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double k = gamma * wv[i];
    if (!(k >= 0.0 && k <= 1.0)) throw std::logic_error("ema_update: coefficient gamma*w outside [0, 1]");
    out[i] = (1.0 - k) * cv[i] + k * bv[i];
  }
  return Field(x_cur.shape(), std::move(out));
}

inline BetaPair beta_at_progress(double p, const MasfConfig& cfg) {
  return {cfg.beta_ll_start + p * (cfg.beta_ll_end - cfg.beta_ll_start),
          cfg.beta_hf_start + p * (cfg.beta_hf_end - cfg.beta_hf_start)};
}

// Frequency weights at grid timestep t; progress runs 0 -> 1 over the grid.
inline BetaPair beta_of(int t, const TimestepGrid& grid, const MasfConfig& cfg) {
  return beta_at_progress(grid.progress(grid.index_of(t)), cfg);
}

namespace detail {

inline Field ema_step(const Field& cur, const Field& bar, const MasfConfig& cfg) {
  const Field w = clamp_weight(adaptive_weight(cur, bar, cfg.weight_mode), cfg.gamma);
  return ema_update(cur, bar, cfg.gamma, w);
}

}  // namespace detail

// Refine one x0 estimate and advance the moving average.
//
// The state tracks the unscaled averaged subbands; beta only enters the
// returned reconstruction. The output is formed as x0_est + IDWT(beta * bar - s),
// which equals IDWT(beta * bar) by linearity and is bit-exact x0_est whenever
// the correction vanishes (gamma = 0, beta = 1).
inline Field refine(const Field& x0_est, int t, const TimestepGrid& grid, MasfState& state, const MasfConfig& cfg) {
  cfg.validate();
  const std::size_t step = grid.index_of(t);

  if (cfg.stage == MasfStage::data_space_only) {
    if (state.data) require_same_shape(x0_est, *state.data, "refine");
    const Field& prev = state.data ? *state.data : x0_est;
    Field next = detail::ema_step(x0_est, prev, cfg);
    state.data = next;
    return next;
  }

  const SubbandSet cur = dwt(x0_est);
  if (state.bands && state.bands->shape() != cur.shape()) {
    throw DimensionError("refine: state shape " + state.bands->shape().str() + " vs " + cur.shape().str());
  }
  const SubbandSet& prev = state.bands ? *state.bands : cur;
  SubbandSet next = cur.transform([&](Subband f, const Field& band) { return detail::ema_step(band, prev[f], cfg); });

  const BetaPair beta = cfg.stage == MasfStage::frequency_plus_weighting
                            ? beta_at_progress(grid.progress(step), cfg)
                            : BetaPair{1.0, 1.0};
  const SubbandSet correction = next.transform([&](Subband f, const Field& band) {
    const double b = f == Subband::ll ? beta.ll : beta.hf;
    return zip_with(band, cur[f], [b](double avg, double s) { return b * avg - s; }, "refine");
  });
  state.bands = std::move(next);
  return zip_with(x0_est, idwt(correction), [](double x, double c) { return c == 0.0 ? x : x + c; }, "refine");
}

// Owns the state for one trajectory.
class MasfRefiner {
 public:
  MasfRefiner(MasfConfig cfg, TimestepGrid grid) : cfg_(cfg), grid_(std::move(grid)) { cfg_.validate(); }

  Field operator()(const Field& x0_est, int t) { return refine(x0_est, t, grid_, state_, cfg_); }

  const MasfState& state() const { return state_; }
  const MasfConfig& config() const { return cfg_; }

 private:
  MasfConfig cfg_;
  TimestepGrid grid_;
  MasfState state_;
};

}  // namespace masf
