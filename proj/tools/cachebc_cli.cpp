// cachebc: sweep runner and verifier.
//
//   cachebc --preset fig5 --out fig5.csv
//   cachebc --config my.cfg --verify
//
// Exit codes: 0 success, 1 verification counterexample, 2 configuration error.

#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "cachebc/experiments.hpp"

namespace {

cachebc::Fault parse_fault(const std::string& spec) {
  int a = 0;
  int b = 0;
  if (std::sscanf(spec.c_str(), "drop-cache:%d", &a) == 1) return cachebc::Fault::drop_cache(a - 1);
  if (std::sscanf(spec.c_str(), "drop-message:%d:%d", &a, &b) == 2) return cachebc::Fault::drop_message(a - 1, b);
  throw cachebc::ConfigError("inject-fault", "expected drop-cache:<user> or drop-message:<layer>:<index>");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Memory-power trade-off sweeps for cache-aided correlated content delivery"};
  std::string config_path;
  std::string preset;
  std::string out_path;
  std::string fault_spec;
  bool verify = false;
  auto* config_opt = app.add_option("--config", config_path, "key = value experiment file");
  auto* preset_opt = app.add_option("--preset", preset, "name of a bundled preset (fig3, fig4, fig5, fig6, ...)");
  config_opt->excludes(preset_opt);
  app.add_option("--out", out_path, "CSV destination (default: stdout)");
  app.add_flag("--verify", verify, "run the decodability oracle and cross-checks instead of the sweep");
  app.add_option("--inject-fault", fault_spec)->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  if (config_path.empty() && preset.empty()) {
    std::cerr << "error: one of --config or --preset is required\n";
    return 2;
  }

  cachebc::ExperimentConfig cfg;
  cachebc::Fault fault;
  try {
    cfg = preset.empty() ? cachebc::load_config(config_path) : cachebc::load_preset(preset);
    if (!fault_spec.empty()) fault = parse_fault(fault_spec);
  } catch (const cachebc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  }

  try {
    if (verify) return cachebc::verify_command(cfg, std::cout, fault);
    const auto points = cachebc::run_experiment(cfg);
    if (out_path.empty()) {
      std::cout << cachebc::format_csv(points);
    } else {
      cachebc::emit_csv(points, out_path);
    }
  } catch (const cachebc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
