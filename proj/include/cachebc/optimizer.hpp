#pragma once

// Cache-allocation search for the superposition scheme's closed form.

#include <vector>

#include "cachebc/superposition.hpp"

namespace cachebc {

struct OptimizerSettings {
  int grid_resolution = 20;        ///< simplex grid step 1/grid_resolution
  double refine_tolerance = 1e-10; ///< stop when a refinement pass gains less than this
  double min_step = 1e-9;          ///< smallest transfer tried by coordinate descent
  LeaderCap leader_cap = LeaderCap::Packed;
};

struct OptimizerResult {
  CacheAllocation pi;
  double power = 0.0;
  /// Best power after the grid phase and after every accepted refinement move.
  std::vector<double> trace;
};

/// Minimizes P_UB(M, pi) over allocations with sum(pi) = 1. Sublibraries with
/// R_l = 0 always receive pi_l = 0. `warm_starts` are extra candidate
/// allocations evaluated alongside the grid.
OptimizerResult optimize_pi(const CorrelatedLibrary& lib, const ChannelConfig& ch, double cache,
                            const OptimizerSettings& settings = {},
                            const std::vector<CacheAllocation>& warm_starts = {});

}  // namespace cachebc
