#pragma once

#include <array>
#include <cmath>
#include <span>
#include <vector>

#include "masf/field.hpp"
#include "masf/solvers.hpp"
#include "masf/wavelet.hpp"

namespace masf {

// Per-step l2 norm of each Haar subband of the raw x0 estimate, indexed by Subband.
inline std::array<std::vector<double>, 4> subband_norms(std::span<const StepRecord> records) {
  if (records.empty()) throw ParameterError("subband_norms: no records");
  std::array<std::vector<double>, 4> out;
  for (const StepRecord& r : records) {
    const SubbandSet s = dwt(r.x0_est);
    for (Subband f : kSubbands) out[static_cast<std::size_t>(f)].push_back(l2_norm(s[f]));
  }
  return out;
}

// ||x0^(k) - x0^(k-1)||_2 for each step k; the first entry is 0.
inline std::vector<double> tv_increments(std::span<const StepRecord> records, bool use_refined) {
  std::vector<double> inc(records.size(), 0.0);
  for (std::size_t k = 1; k < records.size(); ++k) {
    const Field& a = use_refined ? records[k].x0_refined : records[k].x0_est;
    const Field& b = use_refined ? records[k - 1].x0_refined : records[k - 1].x0_est;
    inc[k] = l2_distance(a, b);
  }
  return inc;
}

inline double trajectory_tv(std::span<const StepRecord> records, bool use_refined) {
  if (records.size() < 2) throw ParameterError("trajectory_tv: need at least two records");
  double tv = 0.0;
  for (double d : tv_increments(records, use_refined)) tv += d;
  return tv;
}

// Value of one cell (flat index) across the trajectory.
inline std::vector<double> cell_trace(std::span<const StepRecord> records, std::size_t cell, bool use_refined) {
  std::vector<double> out;
  out.reserve(records.size());
  for (const StepRecord& r : records) {
    const Field& f = use_refined ? r.x0_refined : r.x0_est;
    if (cell >= f.size()) throw DimensionError("cell_trace: cell index out of range");
    out.push_back(f[cell]);
  }
  return out;
}

struct TrajectoryStats {
  std::array<std::vector<double>, 4> subband_norms;
  double tv_raw = 0.0;
  double tv_refined = 0.0;
  std::vector<std::vector<double>> cell_traces;  // one per requested cell, raw estimates
};

inline TrajectoryStats trajectory_stats(std::span<const StepRecord> records, std::span<const std::size_t> cells = {}) {
  TrajectoryStats st;
  st.subband_norms = subband_norms(records);
  if (records.size() >= 2) {
    st.tv_raw = trajectory_tv(records, false);
    st.tv_refined = trajectory_tv(records, true);
  }
  for (std::size_t c : cells) st.cell_traces.push_back(cell_trace(records, c, false));
  return st;
}

// Mean over cells of the 1D W2^2 between the per-cell Gaussian fit of the
// samples (mean, population variance) and N(mu, s2).
inline double gaussian_w2(std::span<const Field> samples, const Field& mu, double s2) {
  if (samples.size() < 2) throw ParameterError("gaussian_w2: need at least two samples");
  if (!(s2 >= 0.0)) throw ParameterError("gaussian_w2: variance must be >= 0");
  for (const Field& f : samples) require_same_shape(f, mu, "gaussian_w2");
  const double n = static_cast<double>(samples.size());
  const double s = std::sqrt(s2);
  double total = 0.0;
  for (std::size_t c = 0; c < mu.size(); ++c) {
    double mean = 0.0;
    for (const Field& f : samples) mean += f[c];
    mean /= n;
    double var = 0.0;
    for (const Field& f : samples) var += (f[c] - mean) * (f[c] - mean);
    var /= n;
    const double dm = mean - mu[c];
    const double ds = std::sqrt(var) - s;
    total += dm * dm + ds * ds;
  }
  return total / static_cast<double>(mu.size());
}

}  // namespace masf
