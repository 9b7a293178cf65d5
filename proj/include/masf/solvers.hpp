#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "masf/denoiser.hpp"
#include "masf/field.hpp"
#include "masf/masf.hpp"
#include "masf/schedule.hpp"

namespace masf {

enum class SolverKind { ddpm, ddim };

inline const char* to_string(SolverKind k) { return k == SolverKind::ddpm ? "ddpm" : "ddim"; }

struct SolverConfig {
  SolverKind kind = SolverKind::ddim;
  double eta = 0.0;  // DDIM only; 1 reproduces the ancestral sampler's variance
  std::uint64_t rng_seed = 0;
};

struct StepRecord {
  int t;
  int t_prev;
  Field x_t;
  Field x0_est;
  Field x0_refined;  // equals x0_est when MASF is off
};

struct SampleResult {
  Field sample;
  std::vector<StepRecord> records;
};

// x0 = (x_t - sqrt(1 - ab) eps) / sqrt(ab)
inline Field x0_from_eps(const Field& x_t, const Field& eps, int t, const NoiseSchedule& sched) {
  const double ab = sched.alpha_bar(t);
  if (!(ab > 0.0)) throw ScheduleError("x0_from_eps: alpha_bar must be positive at t=" + std::to_string(t));
  const double a = std::sqrt(ab);
  const double s = std::sqrt(1.0 - ab);
  return zip_with(x_t, eps, [a, s](double x, double e) { return (x - s * e) / a; }, "x0_from_eps");
}

// eps = (x_t - sqrt(ab) x0) / sqrt(1 - ab)
inline Field eps_from_x0(const Field& x_t, const Field& x0, int t, const NoiseSchedule& sched) {
  const double ab = sched.alpha_bar(t);
  if (ab >= 1.0) throw DegenerateTimestepError("eps_from_x0: alpha_bar == 1 at t=" + std::to_string(t));
  const double a = std::sqrt(ab);
  const double s = std::sqrt(1.0 - ab);
  return zip_with(x_t, x0, [a, s](double x, double m) { return (x - a * m) / s; }, "eps_from_x0");
}

// Per-step noise scale for a DDIM jump t -> t_prev. eta = 1 gives the ancestral
// (DDPM posterior) standard deviation.
inline double ddim_sigma(int t, int t_prev, const NoiseSchedule& sched, double eta) {
  const double ab = sched.alpha_bar(t);
  const double ab_prev = sched.alpha_bar(t_prev);
  return eta * std::sqrt((1.0 - ab_prev) / (1.0 - ab)) * std::sqrt(1.0 - ab / ab_prev);
}

namespace detail {

inline void check_step(int t, int t_prev, const NoiseSchedule& sched, const char* who) {
  if (!(t > t_prev && t_prev >= 0 && t <= sched.T())) {
    throw ParameterError(std::string(who) + ": need T >= t > t_prev >= 0, got t=" + std::to_string(t) +
                         " t_prev=" + std::to_string(t_prev));
  }
  if (sched.alpha_bar(t) >= 1.0) throw DegenerateTimestepError(std::string(who) + ": alpha_bar == 1");
}

}  // namespace detail

inline Field ddim_step(const Field& x_t, const Field& x0_ref, int t, int t_prev, const NoiseSchedule& sched,
                       double eta, const Field& noise) {
  detail::check_step(t, t_prev, sched, "ddim_step");
  if (eta < 0.0) throw ParameterError("ddim_step: eta must be >= 0");
  require_same_shape(x_t, x0_ref, "ddim_step");
  require_same_shape(x_t, noise, "ddim_step");
  if (t_prev == 0) return x0_ref;

  const double ab = sched.alpha_bar(t);
  const double ab_prev = sched.alpha_bar(t_prev);
  const double sigma = ddim_sigma(t, t_prev, sched, eta);
  double dir2 = 1.0 - ab_prev - sigma * sigma;
  if (dir2 < 0.0) {
    if (dir2 < -1e-12) throw ParameterError("ddim_step: eta too large for this step");
    dir2 = 0.0;
  }
  const double c_x0 = std::sqrt(ab_prev);
  const double c_dir = std::sqrt(dir2);
  const double a = std::sqrt(ab);
  const double s = std::sqrt(1.0 - ab);
  std::vector<double> out(x_t.size());
  auto xv = x_t.values();
  auto mv = x0_ref.values();
  auto nv = noise.values();
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double eps = (xv[i] - a * mv[i]) / s;
    out[i] = c_x0 * mv[i] + c_dir * eps + sigma * nv[i];
  }
  return Field(x_t.shape(), std::move(out));
}

// Ancestral step t -> t_prev. For non-adjacent steps alpha is the ratio
// alpha_bar_t / alpha_bar_{t_prev} of the respaced chain.
inline Field ddpm_step(const Field& x_t, const Field& x0_ref, int t, int t_prev, const NoiseSchedule& sched,
                       const Field& noise) {
  detail::check_step(t, t_prev, sched, "ddpm_step");
  require_same_shape(x_t, noise, "ddpm_step");
  const double ab = sched.alpha_bar(t);
  const double ab_prev = sched.alpha_bar(t_prev);
  const double alpha = ab / ab_prev;
  if (alpha >= 1.0) throw DegenerateTimestepError("ddpm_step: alpha == 1");
  const Field eps = eps_from_x0(x_t, x0_ref, t, sched);
  const double k = (1.0 - alpha) / std::sqrt(1.0 - ab);
  const double inv = 1.0 / std::sqrt(alpha);
  const double sigma = t_prev == 0 ? 0.0 : std::sqrt((1.0 - ab_prev) / (1.0 - ab) * (1.0 - alpha));
  std::vector<double> out(x_t.size());
  auto xv = x_t.values();
  auto ev = eps.values();
  auto nv = noise.values();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = (xv[i] - k * ev[i]) * inv + sigma * nv[i];
  return Field(x_t.shape(), std::move(out));
}

inline Field ddpm_step(const Field& x_t, const Field& x0_ref, int t, const NoiseSchedule& sched, const Field& noise) {
  return ddpm_step(x_t, x0_ref, t, t - 1, sched, noise);
}

// Update x_t -> x_{t_prev} given the (possibly refined) x0 prediction. Other
// solvers plug in here.
using Stepper =
    std::function<Field(const Field& x_t, const Field& x0_ref, int t, int t_prev, const NoiseSchedule&, const Field& noise)>;

inline Stepper make_stepper(const SolverConfig& cfg) {
  if (cfg.kind == SolverKind::ddpm) {
    return [](const Field& x, const Field& x0, int t, int tp, const NoiseSchedule& s, const Field& n) {
      return ddpm_step(x, x0, t, tp, s, n);
    };
  }
  if (cfg.eta < 0.0) throw ParameterError("eta must be >= 0");
  const double eta = cfg.eta;
  return [eta](const Field& x, const Field& x0, int t, int tp, const NoiseSchedule& s, const Field& n) {
    return ddim_step(x, x0, t, tp, s, eta, n);
  };
}

inline Field standard_normal_field(const Shape& shape, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> v(shape.size());
  for (double& x : v) x = normal(rng);
  return Field(shape, std::move(v));
}

template <NoisePredictor Oracle>
SampleResult sample_with(const Oracle& oracle, const NoiseSchedule& sched, const TimestepGrid& grid,
                         const Stepper& step, std::uint64_t rng_seed, const std::optional<MasfConfig>& masf_cfg,
                         const Field& x_T) {
  if (masf_cfg) {
    masf_cfg->validate();
    if (masf_cfg->stage != MasfStage::data_space_only && (x_T.height() % 2 != 0 || x_T.width() % 2 != 0)) {
      throw DimensionError("sample: frequency-domain MASF needs even height and width, got " + x_T.shape().str());
    }
  }
  std::mt19937_64 rng(rng_seed);
  MasfState state;
  std::vector<StepRecord> records;
  records.reserve(grid.nfe());
  Field x = x_T;
  for (std::size_t i = 0; i < grid.nfe(); ++i) {
    const int t = grid[i];
    const int t_prev = grid.prev(i);
    const Field eps = oracle.predict_noise(x, t, sched);
    Field x0 = x0_from_eps(x, eps, t, sched);
    Field x0_ref = masf_cfg ? refine(x0, t, grid, state, *masf_cfg) : x0;
    // one draw per step keeps the noise stream independent of eta and MASF
    const Field noise = standard_normal_field(x.shape(), rng);
    Field next = step(x, x0_ref, t, t_prev, sched, noise);
    records.push_back(StepRecord{t, t_prev, std::move(x), std::move(x0), std::move(x0_ref)});
    x = std::move(next);
  }
  return SampleResult{std::move(x), std::move(records)};
}

template <NoisePredictor Oracle>
SampleResult sample(const Oracle& oracle, const NoiseSchedule& sched, const TimestepGrid& grid,
                    const SolverConfig& solver, const std::optional<MasfConfig>& masf_cfg, const Field& x_T) {
  return sample_with(oracle, sched, grid, make_stepper(solver), solver.rng_seed, masf_cfg, x_T);
}

}  // namespace masf
