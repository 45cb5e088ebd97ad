#pragma once

// Config-driven sweeps that evaluate the lower bound, the superposition
// scheme (correlation-aware and correlation-ignorant) and the piggyback
// scheme, plus CSV output and a verification entry point.
//
// Config files are flat `key = value` text; '#' starts a comment.
//
//   n_files, n_users          integers
//   level_rates               comma-separated R_1..R_N         } exactly one
//   alpha, total_rate         comma-separated alpha_1..alpha_N } rate spec
//   gains_sq                  comma-separated h_1^2..h_K^2     } exactly one
//   inv_gain_a, inv_gain_b    1/h_k^2 = a - b (k-1)            } channel spec
//   sweep                     "cache" or "alpha"
//   cache                     fixed M (alpha sweeps only)
//   sweep_alpha_index         l whose alpha_l is swept (alpha sweeps)
//   sweep_alpha_complement    l that absorbs 1 - sum of the others (alpha sweeps)
//   sweep_start, sweep_stop, sweep_step
//   schemes                   subset of "lb,ub,pb,ign" (default: all)
//   grid_resolution, refine_tolerance   optimizer settings

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cachebc/core_model.hpp"
#include "cachebc/oracle.hpp"
#include "cachebc/optimizer.hpp"

namespace cachebc {

/// Invalid configuration; `field()` names the offending key.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::runtime_error(field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

enum class SweepVariable { Cache, Alpha };

struct ExperimentConfig {
  std::string name;
  int n_files = 0;
  int n_users = 0;
  std::optional<std::vector<double>> level_rates;
  std::optional<std::vector<double>> alpha;
  double total_rate = 1.0;
  std::optional<std::vector<double>> gains_sq;
  std::optional<std::pair<double, double>> inv_gain;  ///< (a, b)
  SweepVariable sweep = SweepVariable::Cache;
  double cache = 0.0;
  int alpha_index = 0;       ///< 1-based level
  int alpha_complement = 1;  ///< 1-based level
  double sweep_start = 0.0;
  double sweep_stop = 0.0;
  double sweep_step = 0.0;
  bool run_lb = true;
  bool run_ub = true;
  bool run_pb = true;
  bool run_ign = true;
  OptimizerSettings optimizer;

  /// Throws ConfigError.
  void validate() const;
  std::vector<double> sweep_values() const;
  ChannelConfig channel() const;
  /// Library and cache size at one sweep value.
  CorrelatedLibrary library_at(double sweep_value) const;
  double cache_at(double sweep_value) const;
};

ExperimentConfig parse_config(std::istream& in, const std::string& name = "config");
ExperimentConfig load_config(const std::string& path);
/// Looks up `<preset dir>/<name>.cfg`.
ExperimentConfig load_preset(const std::string& name);
std::string preset_directory();

struct CurvePoint {
  double sweep = 0.0;
  double p_lb = 0.0;
  double p_ub = 0.0;
  std::optional<double> p_pb;
  double p_ign = 0.0;
  std::optional<bool> meets_lb;
  std::vector<double> pi_star;
};

std::vector<CurvePoint> run_experiment(const ExperimentConfig& cfg);

std::string format_csv(const std::vector<CurvePoint>& points);
/// Throws std::runtime_error naming the path on I/O failure.
void emit_csv(const std::vector<CurvePoint>& points, const std::string& path);
std::vector<CurvePoint> parse_csv(std::istream& in);
std::vector<CurvePoint> read_csv(const std::string& path);

/// Oracle runs for both schemes and closed-form/constructive cross-checks on
/// the config's instance (library taken at the middle sweep point). Writes a
/// report to `out`; returns 0 on full pass and 1 otherwise.
int verify_command(const ExperimentConfig& cfg, std::ostream& out, const Fault& fault = {});

}  // namespace cachebc
