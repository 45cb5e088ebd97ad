#pragma once

// Joint cache-channel coding with coded placement ("piggyback" coding).
//
// Every subfile of the sublibraries that feed a cache is split into a C-part
// of rate M and a U-part of rate R_l - M. User k caches the XOR of all C-parts
// of level N-k+1. Delivery builds one superposition level per distinct
// request; a level whose leader is user i itself carries that user's cache
// content as the codebook row, which stronger users decode for free.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cachebc/core_model.hpp"
#include "cachebc/power.hpp"

namespace cachebc {

/// M <= min{R_l : max(N-K, 1) <= l <= N}.
bool piggyback_applicable(const CorrelatedLibrary& lib, int n_users, double cache);

/// First commonness level whose subfiles are split into C/U parts.
int first_split_level(int n_files, int n_users);

/// Z_k as the list of subfiles whose C-parts are XORed together. Users past
/// min(N, K) get an empty cache.
struct CodedCache {
  int level = 0;  ///< N-k+1, or 0 when unused
  std::vector<SubsetMask> c_parts;
};

std::vector<CodedCache> coded_place(const CorrelatedLibrary& lib, int n_users, double cache);

enum class ColumnPart : std::uint8_t { Whole, UPart };

struct ColumnItem {
  SubsetMask subfile = 0;
  ColumnPart part = ColumnPart::Whole;
};

struct LevelMessage {
  int index = 0;   ///< i, 0-based
  int leader = 0;  ///< k_i, 0-based
  /// C-parts XORed into the row message (Z_{k_i}); empty when k_i != i.
  std::vector<SubsetMask> row;
  std::vector<ColumnItem> column;
  double row_rate = 0.0;
  double column_rate = 0.0;

  bool has_row() const { return leader == index; }
};

/// One level per distinct request, ordered by leader. Level i serves the
/// subfiles of W_{d_{k_i}} that avoid every earlier leader's file; the
/// designated subfile at level N-i+1 goes out as its U-part when the row
/// carries Z_i.
std::vector<LevelMessage> build_level_messages(const CorrelatedLibrary& lib, const DemandVector& d, double cache);

/// Tight per-level powers, strongest level first:
///   P_i = max{ f(|V^c_i|, h_{k_i}), f(|V^c_i| + |V^r_i|, h_{k_i+1}) },
///   f(rho, h) = (2^{2 rho} - 1)(1/h^2 + sum_{j>i} P_j),
/// with the second term dropped when k_i = K. per_level has one entry per level.
PowerResult level_power_conditions(std::span<const LevelMessage> levels, const ChannelConfig& ch);

/// Closed-form recursion over k = min(N,K)..1 using rho~_k. Throws if not applicable.
PowerResult piggyback_power_levels(const CorrelatedLibrary& lib, const ChannelConfig& ch, double cache);
double piggyback_power(const CorrelatedLibrary& lib, const ChannelConfig& ch, double cache);

/// Constructive power on the worst-case demand (1, 2, .., min(N,K), ..).
double piggyback_power_constructive(const CorrelatedLibrary& lib, const ChannelConfig& ch, double cache);

/// True iff the user-k term of the recursion dominates at every level.
bool meets_lower_bound(const CorrelatedLibrary& lib, const ChannelConfig& ch, double cache);

}  // namespace cachebc
