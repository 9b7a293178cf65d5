#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <limits>
#include <string>
#include <vector>

#include "masf/field.hpp"
#include "masf/schedule.hpp"

namespace masf {

// Anything that predicts the added noise eps_hat(x_t, t). Implementations must be
// deterministic and return a field shaped like x_t.
template <class D>
concept NoisePredictor = requires(const D& d, const Field& x, int t, const NoiseSchedule& s) {
  { d.predict_noise(x, t, s) } -> std::convertible_to<Field>;
};

namespace detail {

// alpha_bar_t for a denoiser evaluation; rejects t = 0 and anything with alpha_bar == 1.
inline double denoising_alpha_bar(int t, const NoiseSchedule& sched) {
  if (t < 1 || t > sched.T()) throw ParameterError("denoiser: timestep " + std::to_string(t) + " outside [1, T]");
  const double ab = sched.alpha_bar(t);
  if (ab >= 1.0) throw DegenerateTimestepError("denoiser: alpha_bar == 1 at t=" + std::to_string(t));
  return ab;
}

// Inverts x0 = (x_t - sqrt(1-ab) eps) / sqrt(ab) for eps.
inline Field noise_from_mean(const Field& x_t, const Field& x0, double ab) {
  const double a = std::sqrt(ab);
  const double s = std::sqrt(1.0 - ab);
  return zip_with(x_t, x0, [a, s](double x, double m) { return (x - a * m) / s; }, "noise_from_mean");
}

}  // namespace detail

// x0 ~ N(mean, variance * I). The posterior mean is available in closed form.
class GaussianOracle {
 public:
  GaussianOracle(Field mean, double variance) : mean_(std::move(mean)), variance_(variance) {
    if (!(variance_ > 0.0) || !std::isfinite(variance_)) throw ParameterError("GaussianOracle: variance must be > 0");
  }

  const Field& mean() const { return mean_; }
  double variance() const { return variance_; }

  Field posterior_mean(const Field& x_t, int t, const NoiseSchedule& sched) const {
    require_same_shape(x_t, mean_, "GaussianOracle");
    const double ab = detail::denoising_alpha_bar(t, sched);
    const double s2 = variance_;
    const double denom = ab * s2 + (1.0 - ab);
    const double kx = std::sqrt(ab) * s2 / denom;
    const double km = (1.0 - ab) / denom;
    return axpby(kx, x_t, km, mean_);
  }

  Field predict_noise(const Field& x_t, int t, const NoiseSchedule& sched) const {
    return detail::noise_from_mean(x_t, posterior_mean(x_t, t, sched), sched.alpha_bar(t));
  }

 private:
  Field mean_;
  double variance_;
};

// Uniform empirical distribution over a finite point set.
class DatasetOracle {
 public:
  explicit DatasetOracle(std::vector<Field> points) : points_(std::move(points)) {
    if (points_.empty()) throw ParameterError("DatasetOracle: empty point set");
    for (const Field& p : points_) require_same_shape(points_.front(), p, "DatasetOracle");
  }

  const std::vector<Field>& points() const { return points_; }
  const Shape& shape() const { return points_.front().shape(); }

  // softmax_i( -||x_t - sqrt(ab) y_i||^2 / (2 (1 - ab)) ), max-subtracted.
  std::vector<double> posterior_weights(const Field& x_t, int t, const NoiseSchedule& sched) const {
    require_same_shape(x_t, points_.front(), "DatasetOracle");
    const double ab = detail::denoising_alpha_bar(t, sched);
    const double a = std::sqrt(ab);
    const double inv = 1.0 / (2.0 * (1.0 - ab));
    std::vector<double> logw(points_.size());
    auto xv = x_t.values();
    for (std::size_t i = 0; i < points_.size(); ++i) {
      auto yv = points_[i].values();
      double d2 = 0.0;
      for (std::size_t k = 0; k < xv.size(); ++k) {
        const double r = xv[k] - a * yv[k];
        d2 += r * r;
      }
      logw[i] = -d2 * inv;
    }
    const double mx = *std::max_element(logw.begin(), logw.end());
    double z = 0.0;
    for (double& l : logw) {
      l = std::exp(l - mx);
      z += l;
    }
    for (double& l : logw) l /= z;
    return logw;
  }

  Field posterior_mean(const Field& x_t, int t, const NoiseSchedule& sched) const {
    const std::vector<double> w = posterior_weights(x_t, t, sched);
    std::vector<double> acc(x_t.size(), 0.0);
    for (std::size_t i = 0; i < points_.size(); ++i) {
      auto yv = points_[i].values();
      for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += w[i] * yv[k];
    }
    return Field(x_t.shape(), std::move(acc));
  }

  Field predict_noise(const Field& x_t, int t, const NoiseSchedule& sched) const {
    return detail::noise_from_mean(x_t, posterior_mean(x_t, t, sched), sched.alpha_bar(t));
  }

 private:
  std::vector<Field> points_;
};

inline Field gaussian_eps(const Field& x_t, int t, const NoiseSchedule& sched, const GaussianOracle& oracle) {
  return oracle.predict_noise(x_t, t, sched);
}

inline Field dataset_eps(const Field& x_t, int t, const NoiseSchedule& sched, const DatasetOracle& oracle) {
  return oracle.predict_noise(x_t, t, sched);
}

static_assert(NoisePredictor<GaussianOracle>);
static_assert(NoisePredictor<DatasetOracle>);

}  // namespace masf
