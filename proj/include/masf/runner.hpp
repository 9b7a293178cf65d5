#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <ostream>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "json.hpp"

#include "masf/config.hpp"
#include "masf/denoiser.hpp"
#include "masf/io.hpp"
#include "masf/metrics.hpp"
#include "masf/solvers.hpp"
#include "masf/version.hpp"

namespace masf {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

inline constexpr const char* kManifestName = "manifest.json";
inline constexpr const char* kMetricsName = "metrics.json";

// splitmix64 over (seed, trajectory, stream): trajectories never share a stream,
// and adding samples leaves earlier trajectories untouched.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t trajectory, std::uint64_t stream) {
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(mix(mix(seed) ^ trajectory) ^ (stream * 0x632be59bd9b4e019ULL));
}

inline double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

inline double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

using Oracle = std::variant<GaussianOracle, DatasetOracle>;

// Config with oracle files loaded and the field shape fixed.
struct ResolvedRun {
  RunConfig config;
  Oracle oracle;
  Shape shape;
};

inline ResolvedRun resolve(RunConfig cfg) {
  validate_config(cfg);
  auto oracle = [&]() -> Oracle {
    if (cfg.oracle == OracleKind::dataset) {
      return DatasetOracle(io::load_fields(cfg.oracle_file));
    }
    if (!cfg.oracle_mu_file.empty()) return GaussianOracle(io::load_field(cfg.oracle_mu_file), cfg.oracle_s2);
    const Shape s{static_cast<std::size_t>(cfg.height), static_cast<std::size_t>(cfg.width),
                  static_cast<std::size_t>(cfg.channels)};
    return GaussianOracle(Field(s, cfg.oracle_mu), cfg.oracle_s2);
  }();
  const Shape shape = std::visit(
      [](const auto& o) {
        if constexpr (std::is_same_v<std::decay_t<decltype(o)>, GaussianOracle>) {
          return o.mean().shape();
        } else {
          return o.shape();
        }
      },
      oracle);
  cfg.height = static_cast<int>(shape.height);
  cfg.width = static_cast<int>(shape.width);
  cfg.channels = static_cast<int>(shape.channels);
  validate_config(cfg);
  return ResolvedRun{std::move(cfg), std::move(oracle), shape};
}

struct TrajectoryOutcome {
  Field sample;
  double tv_raw = 0.0;
  double tv_refined = 0.0;
};

inline std::string trajectory_stem(std::size_t i) {
  std::ostringstream os;
  os << std::setw(5) << std::setfill('0') << i;
  return os.str();
}

inline void write_trajectory_csv(const fs::path& path, std::span<const StepRecord> records) {
  io::CsvWriter csv(path);
  csv.row({"step", "t", "t_prev", "norm_ll", "norm_lh", "norm_hl", "norm_hh", "tv_raw_increment",
           "tv_refined_increment"});
  const auto norms = subband_norms(records);
  const auto raw = tv_increments(records, false);
  const auto ref = tv_increments(records, true);
  for (std::size_t k = 0; k < records.size(); ++k) {
    csv.row({std::to_string(k), std::to_string(records[k].t), std::to_string(records[k].t_prev),
             io::format_double(norms[0][k]), io::format_double(norms[1][k]), io::format_double(norms[2][k]),
             io::format_double(norms[3][k]), io::format_double(raw[k]), io::format_double(ref[k])});
  }
}

inline TrajectoryOutcome run_trajectory(const ResolvedRun& run, const NoiseSchedule& sched, const TimestepGrid& grid,
                                        std::size_t index) {
  const RunConfig& c = run.config;
  std::mt19937_64 init_rng(derive_seed(c.seed, index, 0));
  const Field x_T = standard_normal_field(run.shape, init_rng);
  const SolverConfig solver{c.solver, c.eta, derive_seed(c.seed, index, 1)};
  SampleResult res = std::visit(
      [&](const auto& oracle) { return sample(oracle, sched, grid, solver, c.masf_or_none(), x_T); }, run.oracle);
  TrajectoryOutcome out{res.sample};
  if (res.records.size() >= 2) {
    out.tv_raw = trajectory_tv(res.records, false);
    out.tv_refined = trajectory_tv(res.records, true);
  }
  const fs::path dir(c.output_dir);
  const std::string stem = trajectory_stem(index);
  write_trajectory_csv(dir / ("trajectory_" + stem + ".csv"), res.records);
  io::save_field(dir / ("sample_" + stem + ".field"), res.sample);
  io::save_preview(dir / ("sample_" + stem), res.sample);
  return out;
}

struct RunSummary {
  fs::path manifest;
  std::vector<double> tv_raw;
  std::vector<double> tv_refined;
  std::optional<double> w2;
};

// Validates, samples every trajectory on a worker pool, then writes metrics and
// the manifest. A config that fails validation leaves nothing on disk.
inline RunSummary run(const RunConfig& config) {
  const ResolvedRun resolved = resolve(config);
  const RunConfig& c = resolved.config;
  const NoiseSchedule sched = build_schedule(c.schedule, c.T);
  const TimestepGrid grid = make_grid(sched, c.nfe);

  const fs::path dir(c.output_dir);
  fs::create_directories(dir);

  const std::size_t n = static_cast<std::size_t>(c.num_samples);
  std::vector<std::optional<TrajectoryOutcome>> outcomes(n);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  unsigned workers = c.threads > 0 ? static_cast<unsigned>(c.threads) : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            outcomes[i] = run_trajectory(resolved, sched, grid, i);
          } catch (...) {
            std::lock_guard lock(failure_mu);
            if (!failure) failure = std::current_exception();
            next = n;
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);

  RunSummary summary;
  std::vector<Field> samples;
  for (auto& o : outcomes) {
    summary.tv_raw.push_back(o->tv_raw);
    summary.tv_refined.push_back(o->tv_refined);
    samples.push_back(std::move(o->sample));
  }
  if (const auto* g = std::get_if<GaussianOracle>(&resolved.oracle); g && samples.size() >= 2) {
    summary.w2 = gaussian_w2(samples, g->mean(), g->variance());
  }

  Json metrics;
  metrics["num_samples"] = n;
  metrics["shape"] = {resolved.shape.height, resolved.shape.width, resolved.shape.channels};
  Json s;
  s["tv_raw_mean"] = mean(summary.tv_raw);
  s["tv_raw_median"] = median(summary.tv_raw);
  s["tv_refined_mean"] = mean(summary.tv_refined);
  s["tv_refined_median"] = median(summary.tv_refined);
  if (summary.w2) s["w2"] = *summary.w2;
  metrics["summary"] = s;
  metrics["tv_raw"] = summary.tv_raw;
  metrics["tv_refined"] = summary.tv_refined;
  {
    std::ofstream os(dir / kMetricsName, std::ios::binary);
    os << metrics.dump(2) << "\n";
    if (!os) throw std::runtime_error("cannot write metrics");
  }

  Json manifest;
  manifest["format"] = "masf-run-manifest";
  manifest["version"] = kVersion;
  Json cfg_json = Json::object();
  for (const auto& [k, v] : config_items(c)) cfg_json[k] = v;
  manifest["config"] = cfg_json;
  Json artifacts;
  artifacts["metrics"] = kMetricsName;
  Json traj = Json::array(), fields = Json::array(), previews = Json::array();
  for (std::size_t i = 0; i < n; ++i) {
    const std::string stem = trajectory_stem(i);
    traj.push_back("trajectory_" + stem + ".csv");
    fields.push_back("sample_" + stem + ".field");
    previews.push_back("sample_" + stem + (resolved.shape.channels == 3 ? ".ppm" : ".pgm"));
  }
  artifacts["trajectories"] = traj;
  artifacts["samples"] = fields;
  artifacts["previews"] = previews;
  manifest["artifacts"] = artifacts;
  summary.manifest = dir / kManifestName;
  {
    std::ofstream os(summary.manifest, std::ios::binary);
    os << manifest.dump(2) << "\n";
    if (!os) throw std::runtime_error("cannot write manifest");
  }
  return summary;
}

inline Json load_json(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  try {
    return Json::parse(is);
  } catch (const Json::parse_error& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

// Config recorded in a manifest.
inline RunConfig config_from_manifest(const fs::path& manifest_path) {
  const Json m = load_json(manifest_path);
  if (!m.contains("config") || !m["config"].is_object()) throw FormatError("manifest has no config object");
  RunConfig cfg;
  for (const auto& [k, v] : m["config"].items()) {
    if (!v.is_string()) throw FormatError("manifest config values must be strings (key '" + k + "')");
    set_config_value(cfg, k, v.get<std::string>());
  }
  return cfg;
}

struct CompareEntry {
  std::string metric;
  std::optional<double> a;
  std::optional<double> b;

  bool comparable() const { return a && b; }
  double delta() const { return *b - *a; }
};

inline constexpr std::array<const char*, 5> kComparedMetrics = {"tv_raw_mean", "tv_raw_median", "tv_refined_mean",
                                                                "tv_refined_median", "w2"};

// Per-metric deltas (b - a). Shape mismatch between the runs is an error;
// a metric missing from either side is reported as not comparable.
inline std::vector<CompareEntry> compare(const fs::path& manifest_a, const fs::path& manifest_b) {
  auto load_metrics = [](const fs::path& manifest_path) {
    const Json m = load_json(manifest_path);
    if (!m.contains("artifacts") || !m["artifacts"].contains("metrics")) {
      throw FormatError(manifest_path.string() + ": manifest lists no metrics artifact");
    }
    return load_json(manifest_path.parent_path() / m["artifacts"]["metrics"].get<std::string>());
  };
  const Json ma = load_metrics(manifest_a);
  const Json mb = load_metrics(manifest_b);
  if (ma.value("shape", Json()) != mb.value("shape", Json())) {
    throw FormatError("runs are not comparable: field shapes differ (" + ma.value("shape", Json()).dump() + " vs " +
                      mb.value("shape", Json()).dump() + ")");
  }
  auto get = [](const Json& m, const char* key) -> std::optional<double> {
    if (m.contains("summary") && m["summary"].contains(key) && m["summary"][key].is_number()) {
      return m["summary"][key].get<double>();
    }
    return std::nullopt;
  };
  std::vector<CompareEntry> out;
  for (const char* key : kComparedMetrics) out.push_back({key, get(ma, key), get(mb, key)});
  return out;
}

inline void print_compare(std::ostream& os, const std::vector<CompareEntry>& entries) {
  for (const CompareEntry& e : entries) {
    os << e.metric << ": ";
    if (!e.comparable()) {
      os << "not comparable (missing in " << (!e.a && !e.b ? "both runs" : !e.a ? "run A" : "run B") << ")\n";
      continue;
    }
    os << "a=" << io::format_double(*e.a) << " b=" << io::format_double(*e.b) << " delta=" << (e.delta() >= 0.0 ? "+" : "")
       << io::format_double(e.delta()) << "\n";
  }
}

}  // namespace masf
