#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include "masf/field.hpp"

namespace masf {

enum class ScheduleKind { linear, cosine, custom };

inline const char* to_string(ScheduleKind k) {
  switch (k) {
    case ScheduleKind::linear: return "linear";
    case ScheduleKind::cosine: return "cosine";
    case ScheduleKind::custom: return "custom";
  }
  return "?";
}

// Discrete variance-preserving schedule over timesteps 1..T. Index 0 is the
// clean-data endpoint with alpha = alpha_bar = 1.
class NoiseSchedule {
 public:
  static constexpr double kLinearBetaStart = 1e-4;
  static constexpr double kLinearBetaEnd = 0.02;
  static constexpr double kCosineOffset = 0.008;
  static constexpr double kMinAlpha = 0.001;

  static NoiseSchedule build(ScheduleKind kind, int T) {
    if (T < 1) throw ParameterError("schedule needs T >= 1, got " + std::to_string(T));
    if (kind == ScheduleKind::custom) throw ParameterError("custom schedules are built with from_alphas");
    std::vector<double> alpha(static_cast<std::size_t>(T) + 1, 1.0);
    if (kind == ScheduleKind::linear) {
      for (int t = 1; t <= T; ++t) {
        const double frac = T == 1 ? 0.0 : static_cast<double>(t - 1) / (T - 1);
        alpha[t] = 1.0 - (kLinearBetaStart + frac * (kLinearBetaEnd - kLinearBetaStart));
      }
    } else {
      const double s = kCosineOffset;
      auto f = [&](int t) {
        const double c = std::cos((static_cast<double>(t) / T + s) / (1.0 + s) * std::numbers::pi / 2.0);
        return c * c;
      };
      for (int t = 1; t <= T; ++t) alpha[t] = std::max(f(t) / f(t - 1), kMinAlpha);
    }
    return NoiseSchedule(kind, std::move(alpha));
  }

  // Explicit per-step alphas for t = 1..T, each in (0, 1].
  static NoiseSchedule from_alphas(const std::vector<double>& alphas) {
    if (alphas.empty()) throw ParameterError("schedule needs T >= 1");
    std::vector<double> alpha{1.0};
    for (double a : alphas) {
      if (!(a > 0.0 && a <= 1.0)) throw ParameterError("schedule alphas must lie in (0, 1]");
      alpha.push_back(a);
    }
    return NoiseSchedule(ScheduleKind::custom, std::move(alpha));
  }

  ScheduleKind kind() const { return kind_; }
  int T() const { return static_cast<int>(alpha_.size()) - 1; }

  double alpha(int t) const { return alpha_[checked(t)]; }
  double alpha_bar(int t) const { return alpha_bar_[checked(t)]; }
  double beta(int t) const { return 1.0 - alpha(t); }
  // Noise level sqrt(1 - alpha_bar_t).
  double sigma(int t) const { return std::sqrt(1.0 - alpha_bar(t)); }

 private:
  NoiseSchedule(ScheduleKind kind, std::vector<double> alpha) : kind_(kind), alpha_(std::move(alpha)) {
    alpha_bar_.resize(alpha_.size());
    alpha_bar_[0] = 1.0;
    for (std::size_t t = 1; t < alpha_.size(); ++t) alpha_bar_[t] = alpha_bar_[t - 1] * alpha_[t];
  }

  std::size_t checked(int t) const {
    if (t < 0 || t > T()) {
      throw ParameterError("timestep " + std::to_string(t) + " outside [0, " + std::to_string(T()) + "]");
    }
    return static_cast<std::size_t>(t);
  }

  ScheduleKind kind_;
  std::vector<double> alpha_;
  std::vector<double> alpha_bar_;
};

inline NoiseSchedule build_schedule(ScheduleKind kind, int T) { return NoiseSchedule::build(kind, T); }

// x_t = sqrt(alpha_bar_t) x0 + sqrt(1 - alpha_bar_t) eps
inline Field forward_diffuse(const Field& x0, int t, const Field& eps, const NoiseSchedule& sched) {
  if (t < 1 || t > sched.T()) {
    throw ParameterError("forward_diffuse: timestep " + std::to_string(t) + " outside [1, T]");
  }
  const double ab = sched.alpha_bar(t);
  return axpby(std::sqrt(ab), x0, std::sqrt(1.0 - ab), eps);
}

// Strictly decreasing sampling timesteps. The step after the last entry is t = 0.
class TimestepGrid {
 public:
  explicit TimestepGrid(std::vector<int> steps) : steps_(std::move(steps)) {
    if (steps_.empty()) throw ParameterError("timestep grid is empty");
    for (std::size_t i = 0; i < steps_.size(); ++i) {
      if (steps_[i] < 1) throw ParameterError("timestep grid entries must be >= 1");
      if (i > 0 && steps_[i] >= steps_[i - 1]) throw ParameterError("timestep grid must be strictly decreasing");
    }
  }

  const std::vector<int>& steps() const { return steps_; }
  std::size_t nfe() const { return steps_.size(); }
  int operator[](std::size_t i) const { return steps_[i]; }

  // Target timestep of the update taken at grid position i.
  int prev(std::size_t i) const { return i + 1 < steps_.size() ? steps_[i + 1] : 0; }

  std::size_t index_of(int t) const {
    for (std::size_t i = 0; i < steps_.size(); ++i) {
      if (steps_[i] == t) return i;
    }
    throw ParameterError("timestep " + std::to_string(t) + " is not on the grid");
  }

  // Sampling progress in [0, 1]: 0 at the first (noisiest) step, 1 at the last.
  double progress(std::size_t i) const {
    if (steps_.size() == 1) return 1.0;
    return static_cast<double>(i) / static_cast<double>(steps_.size() - 1);
  }

 private:
  std::vector<int> steps_;
};

// nfe indices evenly spread over [1, T], descending from T to 1 (nfe = 1 gives {T}).
inline TimestepGrid make_grid(const NoiseSchedule& sched, int nfe) {
  const int T = sched.T();
  if (nfe < 1 || nfe > T) {
    throw ParameterError("nfe " + std::to_string(nfe) + " outside [1, " + std::to_string(T) + "]");
  }
  if (nfe == 1) return TimestepGrid({T});
  std::vector<int> steps(static_cast<std::size_t>(nfe));
  const long long span = T - 1;
  const long long den = nfe - 1;
  for (long long k = 0; k < nfe; ++k) {
    const long long j = den - k;
    // round(span * j / den) in exact integer arithmetic
    steps[static_cast<std::size_t>(k)] = 1 + static_cast<int>((2 * span * j + den) / (2 * den));
  }
  return TimestepGrid(std::move(steps));
}

}  // namespace masf
