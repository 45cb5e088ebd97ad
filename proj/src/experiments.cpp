#include "cachebc/experiments.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "cachebc/bounds.hpp"
#include "cachebc/piggyback.hpp"
#include "cachebc/superposition.hpp"

#ifndef CACHEBC_PRESET_DIR
#define CACHEBC_PRESET_DIR "presets"
#endif

namespace cachebc {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_number(const std::string& field, const std::string& text) {
  const std::string t = trim(text);
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (t.empty() || end != t.c_str() + t.size() || !std::isfinite(v)) {
    throw ConfigError(field, "expected a number, got '" + text + "'");
  }
  return v;
}

int parse_int(const std::string& field, const std::string& text) {
  const double v = parse_number(field, text);
  if (v != std::floor(v) || std::fabs(v) > 1e6) throw ConfigError(field, "expected an integer, got '" + text + "'");
  return static_cast<int>(v);
}

std::vector<double> parse_list(const std::string& field, const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_number(field, item));
  if (out.empty()) throw ConfigError(field, "empty list");
  return out;
}

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.11e", v);
  return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (n_files < 1 || n_files > kMaxExhaustive) throw ConfigError("n_files", "must lie in [1, 16]");
  if (n_users < 1 || n_users > kMaxExhaustive) throw ConfigError("n_users", "must lie in [1, 16]");
  if (level_rates.has_value() == alpha.has_value()) {
    throw ConfigError("level_rates", "give exactly one of level_rates and alpha");
  }
  if (level_rates) {
    if (static_cast<int>(level_rates->size()) != n_files) throw ConfigError("level_rates", "needs n_files entries");
    for (double r : *level_rates) {
      if (r < 0.0) throw ConfigError("level_rates", "rates must be non-negative");
    }
    if (sweep == SweepVariable::Alpha) throw ConfigError("sweep", "alpha sweeps need an alpha rate spec");
  }
  if (alpha) {
    if (static_cast<int>(alpha->size()) != n_files) throw ConfigError("alpha", "needs n_files entries");
    for (double a : *alpha) {
      if (a < 0.0 || a > 1.0) throw ConfigError("alpha", "entries must lie in [0, 1]");
    }
    if (!(total_rate > 0.0)) throw ConfigError("total_rate", "must be positive");
  }
  if (gains_sq.has_value() == inv_gain.has_value()) {
    throw ConfigError("gains_sq", "give exactly one of gains_sq and inv_gain_a/inv_gain_b");
  }
  if (gains_sq && static_cast<int>(gains_sq->size()) != n_users) throw ConfigError("gains_sq", "needs n_users entries");
  try {
    (void)channel();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(gains_sq ? "gains_sq" : "inv_gain_b", e.what());
  }
  if (!(sweep_step > 0.0)) throw ConfigError("sweep_step", "must be positive");
  if (sweep_stop < sweep_start) throw ConfigError("sweep_stop", "must not be below sweep_start");
  if (sweep == SweepVariable::Cache && sweep_start < 0.0) throw ConfigError("sweep_start", "cache sizes are non-negative");
  if (sweep == SweepVariable::Alpha) {
    if (alpha_index < 1 || alpha_index > n_files) throw ConfigError("sweep_alpha_index", "must name a level in [1, N]");
    if (alpha_complement < 1 || alpha_complement > n_files || alpha_complement == alpha_index) {
      throw ConfigError("sweep_alpha_complement", "must name a level in [1, N] other than the swept one");
    }
    if (sweep_start < 0.0 || sweep_stop > 1.0) throw ConfigError("sweep_stop", "alpha sweeps stay inside [0, 1]");
    if (!(cache >= 0.0)) throw ConfigError("cache", "must be non-negative");
  }
  for (double v : sweep_values()) {
    try {
      (void)library_at(v);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(alpha ? "alpha" : "level_rates", e.what());
    }
  }
}

std::vector<double> ExperimentConfig::sweep_values() const {
  const auto steps = static_cast<long>(std::floor((sweep_stop - sweep_start) / sweep_step + 1e-9));
  std::vector<double> out;
  for (long i = 0; i <= steps; ++i) out.push_back(sweep_start + static_cast<double>(i) * sweep_step);
  return out;
}

ChannelConfig ExperimentConfig::channel() const {
  if (gains_sq) return ChannelConfig(*gains_sq);
  return ChannelConfig::from_inverse_profile(n_users, inv_gain->first, inv_gain->second);
}

CorrelatedLibrary ExperimentConfig::library_at(double sweep_value) const {
  if (level_rates) return CorrelatedLibrary(*level_rates);
  std::vector<double> a = *alpha;
  if (sweep == SweepVariable::Alpha) {
    const auto idx = static_cast<std::size_t>(alpha_index - 1);
    const auto comp = static_cast<std::size_t>(alpha_complement - 1);
    a[idx] = sweep_value;
    double rest = 0.0;
    for (std::size_t l = 0; l < a.size(); ++l) {
      if (l != idx && l != comp) rest += a[l];
    }
    a[comp] = std::max(0.0, 1.0 - sweep_value - rest);
  }
  return alpha_to_rates(AlphaProfile(a), total_rate);
}

double ExperimentConfig::cache_at(double sweep_value) const {
  return sweep == SweepVariable::Cache ? sweep_value : cache;
}

ExperimentConfig parse_config(std::istream& in, const std::string& name) {
  ExperimentConfig cfg;
  cfg.name = name;
  std::map<std::string, std::string> kv;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(line_no), "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    if (kv.count(key)) throw ConfigError(key, "given twice");
    kv[key] = trim(line.substr(eq + 1));
  }

  auto take = [&](const std::string& key) -> std::optional<std::string> {
    auto it = kv.find(key);
    if (it == kv.end()) return std::nullopt;
    std::string v = it->second;
    kv.erase(it);
    return v;
  };
  auto require = [&](const std::string& key) {
    auto v = take(key);
    if (!v) throw ConfigError(key, "missing");
    return *v;
  };

  if (auto v = take("name")) cfg.name = *v;
  cfg.n_files = parse_int("n_files", require("n_files"));
  cfg.n_users = parse_int("n_users", require("n_users"));
  if (auto v = take("level_rates")) cfg.level_rates = parse_list("level_rates", *v);
  if (auto v = take("alpha")) cfg.alpha = parse_list("alpha", *v);
  if (auto v = take("total_rate")) cfg.total_rate = parse_number("total_rate", *v);
  if (auto v = take("gains_sq")) cfg.gains_sq = parse_list("gains_sq", *v);
  {
    auto a = take("inv_gain_a");
    auto b = take("inv_gain_b");
    if (a.has_value() != b.has_value()) throw ConfigError(a ? "inv_gain_b" : "inv_gain_a", "missing");
    if (a) cfg.inv_gain = {parse_number("inv_gain_a", *a), parse_number("inv_gain_b", *b)};
  }
  const std::string sweep = require("sweep");
  if (sweep == "cache" || sweep == "M") {
    cfg.sweep = SweepVariable::Cache;
  } else if (sweep == "alpha") {
    cfg.sweep = SweepVariable::Alpha;
    cfg.alpha_index = parse_int("sweep_alpha_index", require("sweep_alpha_index"));
    cfg.alpha_complement = parse_int("sweep_alpha_complement", require("sweep_alpha_complement"));
    cfg.cache = parse_number("cache", require("cache"));
    // An alpha sweep may omit the base profile; it defaults to all zeros.
    if (!cfg.alpha && !cfg.level_rates) cfg.alpha = std::vector<double>(static_cast<std::size_t>(cfg.n_files), 0.0);
  } else {
    throw ConfigError("sweep", "expected 'cache' or 'alpha', got '" + sweep + "'");
  }
  if (auto v = take("cache")) cfg.cache = parse_number("cache", *v);
  cfg.sweep_start = parse_number("sweep_start", require("sweep_start"));
  cfg.sweep_stop = parse_number("sweep_stop", require("sweep_stop"));
  cfg.sweep_step = parse_number("sweep_step", require("sweep_step"));
  if (auto v = take("schemes")) {
    cfg.run_lb = cfg.run_ub = cfg.run_pb = cfg.run_ign = false;
    std::stringstream ss(*v);
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (item == "lb") cfg.run_lb = true;
      else if (item == "ub") cfg.run_ub = true;
      else if (item == "pb") cfg.run_pb = true;
      else if (item == "ign") cfg.run_ign = true;
      else throw ConfigError("schemes", "unknown scheme '" + item + "'");
    }
  }
  if (auto v = take("grid_resolution")) {
    cfg.optimizer.grid_resolution = parse_int("grid_resolution", *v);
    if (cfg.optimizer.grid_resolution < 1) throw ConfigError("grid_resolution", "must be at least 1");
  }
  if (auto v = take("refine_tolerance")) {
    cfg.optimizer.refine_tolerance = parse_number("refine_tolerance", *v);
    if (!(cfg.optimizer.refine_tolerance > 0.0)) throw ConfigError("refine_tolerance", "must be positive");
  }
  if (!kv.empty()) throw ConfigError(kv.begin()->first, "unknown key");
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open " + path);
  std::string name = path;
  if (auto slash = name.find_last_of('/'); slash != std::string::npos) name = name.substr(slash + 1);
  if (auto dot = name.rfind(".cfg"); dot != std::string::npos) name = name.substr(0, dot);
  return parse_config(in, name);
}

std::string preset_directory() {
  if (const char* env = std::getenv("CACHEBC_PRESET_DIR")) return env;
  return CACHEBC_PRESET_DIR;
}

ExperimentConfig load_preset(const std::string& name) {
  for (char c : name) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-')) {
      throw ConfigError("preset", "invalid preset name '" + name + "'");
    }
  }
  std::ifstream probe(preset_directory() + "/" + name + ".cfg");
  if (!probe) throw ConfigError("preset", "no preset named '" + name + "'");
  return load_config(preset_directory() + "/" + name + ".cfg");
}

std::vector<CurvePoint> run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const ChannelConfig ch = cfg.channel();
  std::vector<CurvePoint> points;
  std::vector<CacheAllocation> warm;
  for (double v : cfg.sweep_values()) {
    const CorrelatedLibrary lib = cfg.library_at(v);
    const double m = cfg.cache_at(v);
    CurvePoint p;
    p.sweep = v;
    if (cfg.run_lb) p.p_lb = lower_bound_power(lib, ch, m);
    if (cfg.run_ub) {
      OptimizerResult best = optimize_pi(lib, ch, m, cfg.optimizer, warm);
      p.p_ub = best.power;
      p.pi_star = best.pi.pi;
      warm = {best.pi};
    }
    if (cfg.run_ign) p.p_ign = optimize_pi(correlation_ignorant_projection(lib), ch, m, cfg.optimizer).power;
    if (cfg.run_pb && piggyback_applicable(lib, ch.n_users(), m)) {
      p.p_pb = piggyback_power(lib, ch, m);
      p.meets_lb = meets_lower_bound(lib, ch, m);
    }
    points.push_back(std::move(p));
  }
  return points;
}

std::string format_csv(const std::vector<CurvePoint>& points) {
  std::string out = "sweep,P_LB,P_UB,P_PB,P_IGN,meets_LB,pi_star\n";
  for (const CurvePoint& p : points) {
    out += format_number(p.sweep) + ',' + format_number(p.p_lb) + ',' + format_number(p.p_ub) + ',';
    if (p.p_pb) out += format_number(*p.p_pb);
    out += ',' + format_number(p.p_ign) + ',';
    if (p.meets_lb) out += *p.meets_lb ? "1" : "0";
    out += ',';
    for (std::size_t i = 0; i < p.pi_star.size(); ++i) {
      if (i) out += ';';
      out += format_number(p.pi_star[i]);
    }
    out += '\n';
  }
  return out;
}

void emit_csv(const std::vector<CurvePoint>& points, const std::string& path) {
  if (points.empty()) throw std::invalid_argument("emit_csv: no points");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("emit_csv: cannot open " + path);
  out << format_csv(points);
  out.flush();
  if (!out) throw std::runtime_error("emit_csv: write failed for " + path);
}

std::vector<CurvePoint> parse_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "sweep,P_LB,P_UB,P_PB,P_IGN,meets_LB,pi_star") {
    throw std::runtime_error("parse_csv: unexpected header");
  }
  std::vector<CurvePoint> points;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != 7) throw std::runtime_error("parse_csv: expected 7 cells in '" + line + "'");
    CurvePoint p;
    p.sweep = parse_number("sweep", cells[0]);
    p.p_lb = parse_number("P_LB", cells[1]);
    p.p_ub = parse_number("P_UB", cells[2]);
    if (!cells[3].empty()) p.p_pb = parse_number("P_PB", cells[3]);
    p.p_ign = parse_number("P_IGN", cells[4]);
    if (!cells[5].empty()) p.meets_lb = cells[5] == "1";
    std::stringstream ss(cells[6]);
    std::string item;
    while (std::getline(ss, item, ';')) p.pi_star.push_back(parse_number("pi_star", item));
    points.push_back(std::move(p));
  }
  return points;
}

std::vector<CurvePoint> read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_csv: cannot open " + path);
  return parse_csv(in);
}

int verify_command(const ExperimentConfig& cfg, std::ostream& out, const Fault& fault) {
  cfg.validate();
  const auto values = cfg.sweep_values();
  const double v = values[values.size() / 2];
  const CorrelatedLibrary lib = cfg.library_at(v);
  const ChannelConfig ch = cfg.channel();
  const int k_users = ch.n_users();
  bool ok = true;

  const auto t_grid = verification_t_grid(lib.n_files(), k_users);
  const VerificationReport sp = verify_superposition(lib, k_users, t_grid, fault);
  out << "superposition oracle: " << sp.summary() << '\n';
  ok = ok && sp.passed;

  const auto m_grid = verification_cache_grid(lib, k_users);
  const VerificationReport pb = verify_piggyback(lib, k_users, m_grid, fault);
  out << "piggyback oracle: " << pb.summary() << '\n';
  ok = ok && pb.passed;

  // Constructive rates never exceed the closed form on the integer grid.
  double worst_gap = 0.0;
  bool bounded = true;
  for (std::size_t j = 0; j + 1 < t_grid.size(); ++j) {
    std::vector<double> t;
    for (const Rational& x : t_grid[j]) t.push_back(to_double(x));
    const double closed = upper_bound_power_for_t(lib, ch, t);
    const double built = achievable_power_constructive(lib, ch, placement_from_t(lib, k_users, t_grid[j])).power;
    if (built > closed + 1e-9) bounded = false;
    worst_gap = std::max(worst_gap, closed - built);
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "superposition constructive <= closed form: %s (largest gap %.3e)\n",
                bounded ? "PASS" : "FAIL", worst_gap);
  out << buf;
  ok = ok && bounded;

  double pb_err = 0.0;
  for (double m : m_grid) {
    pb_err = std::max(pb_err, std::fabs(piggyback_power(lib, ch, m) - piggyback_power_constructive(lib, ch, m)));
  }
  std::snprintf(buf, sizeof buf, "piggyback closed form = constructive: %s (max error %.3e)\n",
                pb_err <= 1e-9 ? "PASS" : "FAIL", pb_err);
  out << buf;
  ok = ok && pb_err <= 1e-9;
  return ok ? 0 : 1;
}

}  // namespace cachebc
