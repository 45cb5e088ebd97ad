#pragma once

// Memory-power lower bound for schemes with uncoded cache placement.

#include <vector>

#include "cachebc/core_model.hpp"

namespace cachebc {

/// rho~_k = max{ sum_{l=0}^{N-k} C(N-k, l) R_{l+1} - M, 0 } for k = 1..min(N, K).
std::vector<double> rho_tilde(const CorrelatedLibrary& lib, int n_users, double cache);

/// Minimum superposition power for (rho~_1, .., rho~_min(N,K), 0, .., 0).
double lower_bound_power(const CorrelatedLibrary& lib, const ChannelConfig& ch, double cache);

}  // namespace cachebc
