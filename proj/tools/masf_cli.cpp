// Command-line harness: batch sampling runs, run comparison, synthetic datasets.
//
//   masf_cli run --config run.cfg [--gamma 0.3 ...]
//   masf_cli run --manifest out/manifest.json --output_dir rerun
//   masf_cli compare a/manifest.json b/manifest.json
//   masf_cli make-dataset --points 10 --height 8 --width 8 --out data.field

#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <string>

#include "CLI11.hpp"
#include "masf/runner.hpp"

namespace {

int cmd_run(const std::string& config_path, const std::string& manifest_path,
            const std::map<std::string, std::string>& overrides, bool dry_run) {
  masf::RunConfig cfg;
  if (!manifest_path.empty()) cfg = masf::config_from_manifest(manifest_path);
  if (!config_path.empty()) {
    std::ifstream is(config_path);
    if (!is) throw std::runtime_error("cannot open config " + config_path);
    masf::apply_config_text(cfg, is);
  }
  for (const auto& [k, v] : overrides) masf::set_config_value(cfg, k, v);

  if (dry_run) {
    const masf::ResolvedRun r = masf::resolve(cfg);
    std::cout << masf::render_config(r.config);
    return 0;
  }
  const masf::RunSummary s = masf::run(cfg);
  std::cout << "wrote " << s.manifest.string() << "\n"
            << "tv_raw_median " << masf::io::format_double(masf::median(s.tv_raw)) << "\n"
            << "tv_refined_median " << masf::io::format_double(masf::median(s.tv_refined)) << "\n";
  if (s.w2) std::cout << "w2 " << masf::io::format_double(*s.w2) << "\n";
  return 0;
}

int cmd_make_dataset(int points, int h, int w, int c, double range, std::uint64_t seed, const std::string& out) {
  if (points < 1 || h < 1 || w < 1 || c < 1 || !(range > 0.0)) throw masf::ParameterError("make-dataset: bad arguments");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-range, range);
  const masf::Shape shape{static_cast<std::size_t>(h), static_cast<std::size_t>(w), static_cast<std::size_t>(c)};
  std::vector<masf::Field> fields;
  for (int i = 0; i < points; ++i) {
    std::vector<double> v(shape.size());
    for (double& x : v) x = u(rng);
    fields.emplace_back(shape, std::move(v));
  }
  masf::io::save_fields(out, fields);
  std::cout << "wrote " << points << " points of shape " << shape.str() << " to " << out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Moving-average frequency-domain sampling harness"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Sample a batch of trajectories and write artifacts");
  std::string config_path, manifest_path;
  bool dry_run = false;
  run->add_option("--config", config_path, "Key-value config file")->check(CLI::ExistingFile);
  run->add_option("--manifest", manifest_path, "Re-run the config recorded in a manifest")->check(CLI::ExistingFile);
  run->add_flag("--dry-run", dry_run, "Validate and print the resolved config without sampling");
  std::map<std::string, std::string> raw_overrides;
  for (const std::string& key : masf::config_keys()) {
    run->add_option("--" + key, raw_overrides[key], "Override config key '" + key + "'");
  }

  auto* cmp = app.add_subcommand("compare", "Print metric deltas between two runs");
  std::string manifest_a, manifest_b;
  cmp->add_option("manifest_a", manifest_a)->required()->check(CLI::ExistingFile);
  cmp->add_option("manifest_b", manifest_b)->required()->check(CLI::ExistingFile);

  auto* mk = app.add_subcommand("make-dataset", "Write random points in [-range, range] as a dataset file");
  int points = 10, h = 8, w = 8, c = 1;
  double range = 1.0;
  std::uint64_t seed = 0;
  std::string out;
  mk->add_option("--points", points);
  mk->add_option("--height", h);
  mk->add_option("--width", w);
  mk->add_option("--channels", c);
  mk->add_option("--range", range);
  mk->add_option("--seed", seed);
  mk->add_option("--out", out)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      std::map<std::string, std::string> overrides;
      for (const std::string& key : masf::config_keys()) {
        if (run->count("--" + key) > 0) overrides[key] = raw_overrides[key];
      }
      return cmd_run(config_path, manifest_path, overrides, dry_run);
    }
    if (*cmp) {
      masf::print_compare(std::cout, masf::compare(manifest_a, manifest_b));
      return 0;
    }
    if (*mk) return cmd_make_dataset(points, h, w, c, range, seed, out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
