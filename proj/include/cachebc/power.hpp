#pragma once

// Minimum-power superposition coding over the degraded Gaussian broadcast
// channel: user k decodes layers 1..k by successive cancellation, treating
// layers k+1..K as noise.

#include <span>
#include <vector>

#include "cachebc/core_model.hpp"

namespace cachebc {

/// Per-user message rates rho_k (bits per channel use), weakest user first.
using RateVector = std::vector<double>;

struct PowerResult {
  std::vector<double> per_level;  ///< P_k, the power of the k-th superposition layer
  double total = 0.0;
};

/// C(x) = 1/2 log2(1 + x).
double gaussian_capacity(double snr);

/// Tight per-layer powers, strongest layer first:
///   P_k = (2^{2 rho_k} - 1) (1/h_k^2 + sum_{j>k} P_j).
/// Their sum equals sum_k ((2^{2 rho_k} - 1)/h_k^2) prod_{j<k} 2^{2 rho_j}.
PowerResult min_superposition_power(std::span<const double> rates, const ChannelConfig& ch);

/// True iff rho_k <= C(h_k^2 P_k / (1 + h_k^2 sum_{j>k} P_j)) + slack for every k.
bool rate_feasible(std::span<const double> rates, std::span<const double> per_level_power,
                   const ChannelConfig& ch, double slack = 1e-9);

}  // namespace cachebc
