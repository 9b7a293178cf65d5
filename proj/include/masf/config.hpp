#pragma once

#include <charconv>
#include <climits>
#include <cmath>
#include <cstdint>
#include <functional>
#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "masf/errors.hpp"
#include "masf/masf.hpp"
#include "masf/schedule.hpp"
#include "masf/solvers.hpp"

namespace masf {

enum class OracleKind { gaussian, dataset };

inline const char* to_string(OracleKind k) { return k == OracleKind::gaussian ? "gaussian" : "dataset"; }

// Everything needed to reproduce a batch of trajectories. Keys in the text
// format are the member names.
struct RunConfig {
  ScheduleKind schedule = ScheduleKind::linear;
  int T = 1000;
  int nfe = 25;
  SolverKind solver = SolverKind::ddim;
  double eta = 0.0;

  OracleKind oracle = OracleKind::gaussian;
  double oracle_mu = 0.0;      // scalar mean, used when oracle_mu_file is empty
  std::string oracle_mu_file;  // field file with the Gaussian mean
  double oracle_s2 = 1.0;
  std::string oracle_file;     // dataset points, concatenated field records

  int height = 8;  // ignored when the shape comes from an oracle file
  int width = 8;
  int channels = 1;

  bool masf_enabled = true;
  MasfConfig masf;

  int num_samples = 16;
  std::uint64_t seed = 0;
  std::string output_dir = "masf_out";
  int threads = 0;  // 0 = hardware concurrency; does not affect results

  std::optional<MasfConfig> masf_or_none() const { return masf_enabled ? std::optional<MasfConfig>(masf) : std::nullopt; }
};

namespace detail {

template <class E>
E parse_enum(const std::string& key, const std::string& v, std::initializer_list<std::pair<const char*, E>> options) {
  for (const auto& [name, e] : options) {
    if (v == name) return e;
  }
  std::string allowed;
  for (const auto& [name, e] : options) allowed += (allowed.empty() ? "" : "|") + std::string(name);
  throw FormatError("config: " + key + " must be one of " + allowed + ", got '" + v + "'");
}

inline double parse_double(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double d = 0.0;
  try {
    d = std::stod(v, &used);
  } catch (const std::exception&) {
    throw FormatError("config: " + key + " expects a number, got '" + v + "'");
  }
  if (used != v.size() || !std::isfinite(d)) throw FormatError("config: " + key + " expects a finite number, got '" + v + "'");
  return d;
}

inline long long parse_int(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  long long i = 0;
  try {
    i = std::stoll(v, &used);
  } catch (const std::exception&) {
    throw FormatError("config: " + key + " expects an integer, got '" + v + "'");
  }
  if (used != v.size()) throw FormatError("config: " + key + " expects an integer, got '" + v + "'");
  return i;
}

inline std::string num(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

struct KeyHandler {
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

inline std::string masf_mode_string(const RunConfig& c) { return c.masf_enabled ? to_string(c.masf.stage) : "off"; }

inline const std::vector<std::pair<std::string, KeyHandler>>& key_table() {
  using C = RunConfig;
  auto int_key = [](int C::*m) {
    return KeyHandler{[m](C& c, const std::string& v) {
                        const long long i = parse_int("int", v);
                        if (i < INT32_MIN || i > INT32_MAX) throw FormatError("config: integer out of range: " + v);
                        c.*m = static_cast<int>(i);
                      },
                      [m](const C& c) { return std::to_string(c.*m); }};
  };
  auto dbl_key = [](double C::*m) {
    return KeyHandler{[m](C& c, const std::string& v) { c.*m = parse_double("number", v); },
                      [m](const C& c) { return num(c.*m); }};
  };
  auto str_key = [](std::string C::*m) {
    return KeyHandler{[m](C& c, const std::string& v) { c.*m = v; }, [m](const C& c) { return c.*m; }};
  };
  auto beta_key = [](double MasfConfig::*m) {
    return KeyHandler{[m](C& c, const std::string& v) { c.masf.*m = parse_double("beta", v); },
                      [m](const C& c) { return num(c.masf.*m); }};
  };
  static const std::vector<std::pair<std::string, KeyHandler>> table = {
      {"schedule",
       {[](C& c, const std::string& v) {
          c.schedule = parse_enum<ScheduleKind>("schedule", v, {{"linear", ScheduleKind::linear}, {"cosine", ScheduleKind::cosine}});
        },
        [](const C& c) { return std::string(to_string(c.schedule)); }}},
      {"T", int_key(&C::T)},
      {"nfe", int_key(&C::nfe)},
      {"solver",
       {[](C& c, const std::string& v) {
          c.solver = parse_enum<SolverKind>("solver", v, {{"ddpm", SolverKind::ddpm}, {"ddim", SolverKind::ddim}});
        },
        [](const C& c) { return std::string(to_string(c.solver)); }}},
      {"eta", dbl_key(&C::eta)},
      {"oracle",
       {[](C& c, const std::string& v) {
          c.oracle = parse_enum<OracleKind>("oracle", v, {{"gaussian", OracleKind::gaussian}, {"dataset", OracleKind::dataset}});
        },
        [](const C& c) { return std::string(to_string(c.oracle)); }}},
      {"oracle_mu", dbl_key(&C::oracle_mu)},
      {"oracle_mu_file", str_key(&C::oracle_mu_file)},
      {"oracle_s2", dbl_key(&C::oracle_s2)},
      {"oracle_file", str_key(&C::oracle_file)},
      {"height", int_key(&C::height)},
      {"width", int_key(&C::width)},
      {"channels", int_key(&C::channels)},
      {"masf",
       {[](C& c, const std::string& v) {
          if (v == "off") {
            c.masf_enabled = false;
            return;
          }
          c.masf_enabled = true;
          c.masf.stage = parse_enum<MasfStage>("masf", v,
                                               {{"data_space_only", MasfStage::data_space_only},
                                                {"frequency", MasfStage::frequency},
                                                {"frequency_plus_weighting", MasfStage::frequency_plus_weighting}});
        },
        [](const C& c) { return masf_mode_string(c); }}},
      {"gamma",
       {[](C& c, const std::string& v) { c.masf.gamma = parse_double("gamma", v); },
        [](const C& c) { return num(c.masf.gamma); }}},
      {"weight_mode",
       {[](C& c, const std::string& v) {
          c.masf.weight_mode = parse_enum<WeightMode>(
              "weight_mode", v,
              {{"constant", WeightMode::constant}, {"linear", WeightMode::linear}, {"quadratic", WeightMode::quadratic}});
        },
        [](const C& c) { return std::string(to_string(c.masf.weight_mode)); }}},
      {"beta_ll_start", beta_key(&MasfConfig::beta_ll_start)},
      {"beta_ll_end", beta_key(&MasfConfig::beta_ll_end)},
      {"beta_hf_start", beta_key(&MasfConfig::beta_hf_start)},
      {"beta_hf_end", beta_key(&MasfConfig::beta_hf_end)},
      {"num_samples", int_key(&C::num_samples)},
      {"seed",
       {[](C& c, const std::string& v) {
          const long long s = parse_int("seed", v);
          if (s < 0) throw FormatError("config: seed must be non-negative");
          c.seed = static_cast<std::uint64_t>(s);
        },
        [](const C& c) { return std::to_string(c.seed); }}},
      {"output_dir", str_key(&C::output_dir)},
      {"threads", int_key(&C::threads)},
  };
  return table;
}

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace detail

inline std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& [k, h] : detail::key_table()) keys.push_back(k);
  return keys;
}

inline void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value) {
  for (const auto& [k, h] : detail::key_table()) {
    if (k == key) {
      try {
        h.set(cfg, value);
      } catch (const FormatError& e) {
        throw FormatError(std::string(e.what()) + " (key '" + key + "')");
      }
      return;
    }
  }
  throw FormatError("config: unknown key '" + key + "'");
}

// Ordered key/value view; parse_config of its rendering reproduces the config.
inline std::vector<std::pair<std::string, std::string>> config_items(const RunConfig& cfg) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& [k, h] : detail::key_table()) out.emplace_back(k, h.get(cfg));
  return out;
}

// "key = value" per line; '#' starts a comment.
inline void apply_config_text(RunConfig& cfg, std::istream& is) {
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw FormatError("config line " + std::to_string(lineno) + ": expected key = value");
    set_config_value(cfg, detail::trim(line.substr(0, eq)), detail::trim(line.substr(eq + 1)));
  }
}

inline RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  std::istringstream is(text);
  apply_config_text(cfg, is);
  return cfg;
}

inline std::string render_config(const RunConfig& cfg) {
  std::string out;
  for (const auto& [k, v] : config_items(cfg)) out += k + " = " + v + "\n";
  return out;
}

// Range checks that need no file access.
inline void validate_config(const RunConfig& c) {
  auto fail = [](const std::string& m) { throw ParameterError("config: " + m); };
  if (c.T < 1) fail("T must be >= 1");
  if (c.nfe < 1 || c.nfe > c.T) fail("nfe must lie in [1, T]");
  if (c.eta < 0.0) fail("eta must be >= 0");
  if (c.solver == SolverKind::ddpm && c.eta != 0.0) fail("eta only applies to the ddim solver");
  if (!(c.oracle_s2 > 0.0)) fail("oracle_s2 must be > 0");
  if (c.oracle == OracleKind::dataset && c.oracle_file.empty()) fail("dataset oracle needs oracle_file");
  if (c.height < 1 || c.width < 1 || c.channels < 1) fail("height, width and channels must be positive");
  if (c.height % 2 != 0 || c.width % 2 != 0) fail("height and width must be even (subband diagnostics)");
  if (c.num_samples < 1) fail("num_samples must be >= 1");
  if (c.output_dir.empty()) fail("output_dir must be set");
  if (c.threads < 0) fail("threads must be >= 0");
  c.masf.validate();
}

}  // namespace masf
