#pragma once

// Cache-aided superposition coding with uncoded placement.
//
// Placement treats every sublibrary independently: subfiles of L_l are split
// by memory sharing between the integer points floor(t_l) and floor(t_l)+1
// into "A" and "B" portions, and each portion into parts labelled by the user
// subsets that cache them. Delivery groups the requested subfiles of each
// sublibrary into single-demand problems (GROUP), serves each with XOR
// messages targeted at the weakest user of every transmission set
// (SINGLE-DEMAND), and ships the per-user totals by superposition coding.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cachebc/core_model.hpp"
#include "cachebc/power.hpp"

namespace cachebc {

/// pi_l: fraction of the cache given to sublibrary L_l.
struct CacheAllocation {
  std::vector<double> pi;

  /// Throws unless every pi_l is in [0,1] and the sum is at most 1.
  void validate(int n_files) const;
};

enum class PartClass : std::uint8_t { A, B };

struct SublibraryPlacement {
  int level = 0;
  double rate = 0.0;  ///< R_l
  Rational t{0};      ///< t_l in [0, K]
  int t_a = 0;        ///< floor(t_l); the B portion uses t_a + 1
  /// Rate of one part, as a fraction of R_l: (t_b - t)/C(K, t_a) and (t - t_a)/C(K, t_b).
  /// A zero share means the portion is not materialized.
  Rational share_a{0};
  Rational share_b{0};

  int t_b() const { return t_a + 1; }
  bool has_a() const { return !is_zero(share_a); }
  bool has_b() const { return !is_zero(share_b); }
  int part_size_of(PartClass c) const { return c == PartClass::A ? t_a : t_b(); }
  const Rational& share_of(PartClass c) const { return c == PartClass::A ? share_a : share_b; }
};

struct PlacementSpec {
  int n_files = 0;
  int n_users = 0;
  std::vector<SublibraryPlacement> levels;  ///< index level-1

  const SublibraryPlacement& level(int l) const { return levels.at(static_cast<std::size_t>(l - 1)); }
};

/// t_l = K pi_l M / (C(N, l) R_l), clamped to [0, K]; empty sublibraries get t_l = 0.
std::vector<double> cache_parameters(const CorrelatedLibrary& lib, int n_users, double cache,
                                     const CacheAllocation& pi);
PlacementSpec cache_split(const CorrelatedLibrary& lib, int n_users, double cache, const CacheAllocation& pi);
/// Placement from explicit per-sublibrary t values (index level-1).
PlacementSpec placement_from_t(const CorrelatedLibrary& lib, int n_users, std::span<const Rational> t);

/// W̄^{A|B}_{S, holders}: the part of subfile S cached by exactly the users in `holders`.
struct PartToken {
  SubsetMask subfile = 0;
  PartClass cls = PartClass::A;
  SubsetMask holders = 0;

  friend bool operator==(const PartToken&, const PartToken&) = default;
  friend auto operator<=>(const PartToken&, const PartToken&) = default;
};
std::string to_string(const PartToken& p);

/// All parts of one subfile under `spec`.
std::vector<PartToken> parts_of_subfile(const PlacementSpec& spec, SubsetMask subfile);

/// Per-user cache content; user k holds every part whose holder set contains k.
std::vector<std::vector<PartToken>> place(const PlacementSpec& spec);

/// One single-demand problem: user k requests assignments[k] (nullopt when the
/// user has nothing to receive in this group).
struct GroupDemand {
  std::vector<std::optional<SubfileId>> assignments;

  /// Users whose request differs from every weaker user's request.
  SubsetMask leaders() const;
  int distinct_subfiles() const;
};

/// GROUP: partitions W_r (subfiles of one level meeting the requested-file set
/// in exactly r files) into single-demand groups. Choices follow ascending
/// bitmask order, with backtracking so that every group serves each
/// requested file exactly once whenever such a packing exists.
std::vector<GroupDemand> group(std::span<const SubsetMask> requested, const DemandVector& d, int r);

struct XorMessage {
  int level = 0;
  PartClass cls = PartClass::A;
  std::vector<PartToken> parts;  ///< XOR of these equal-size parts
  Rational share{0};             ///< size as a fraction of R_level
};

/// SINGLE-DEMAND for one portion: for every user k and every t-subset U of the
/// stronger users with (U + k) containing a leader, user k is sent
/// XOR_{j in U+k} W̄_{S_j, (U+k) - j}.
std::vector<std::vector<XorMessage>> single_demand(PartClass cls, const GroupDemand& g, int t, int level,
                                                   const Rational& share);

struct GroupRecord {
  int level = 0;
  int r = 0;
  GroupDemand demand;
};

struct MessagePlan {
  std::vector<std::vector<XorMessage>> per_user;
  /// rate_share[k][l-1]: user k's message rate from L_l as a multiple of R_l (exact).
  std::vector<std::vector<Rational>> rate_share;
  RateVector rates;  ///< rho_k
  std::vector<GroupRecord> groups;
};

MessagePlan generate_messages(const CorrelatedLibrary& lib, const PlacementSpec& spec, const DemandVector& d);

/// Leader-count cap used by the closed form: the loose ceil(D/r) + 1,
/// or ceil(D/r) + [r does not divide D], the most distinct subfiles a packed group can hold.
enum class LeaderCap { Loose, Packed };
int leader_cap(LeaderCap rule, int distinct, int r);

/// gamma_{k,l,r} / R_l for user k (0-based) with the loose cap ceil(min(N,K)/r) + 1.
Rational gamma_closed_form(int user, int r, int n_users, int n_files, const Rational& t);
/// Same, floating point, with an explicit leader cap.
double gamma_closed_form(int user, int n_users, double t, int cap);

/// hat-rho_k: sum over levels and r of (#groups) * gamma. The group count is
/// C(N - D, l - r) C(D - 1, r - 1) with D = min(N, K).
RateVector closed_form_rates(const CorrelatedLibrary& lib, int n_users, std::span<const double> t,
                             LeaderCap rule = LeaderCap::Packed);

double upper_bound_power(const CorrelatedLibrary& lib, const ChannelConfig& ch, double cache,
                         const CacheAllocation& pi, LeaderCap rule = LeaderCap::Packed);
double upper_bound_power_for_t(const CorrelatedLibrary& lib, const ChannelConfig& ch, std::span<const double> t,
                               LeaderCap rule = LeaderCap::Packed);

/// Message share of user k in one single-demand group from the leader set
/// alone: C(K-1-k, t)/C(K, t) for leaders, (C(K-1-k, t) - C(K-1-k-e_k, t))/C(K, t)
/// otherwise, e_k being the number of leaders stronger than k. Returns the
/// number of XOR messages (not yet scaled by part share).
std::int64_t leader_message_count(int user, SubsetMask leaders, int t, int n_users);

struct ConstructiveResult {
  double power = 0.0;
  RateVector rates;               ///< rates of the maximizing demand
  std::optional<DemandVector> worst;
  std::size_t demands_evaluated = 0;
  double min_power = 0.0;         ///< smallest power seen across the evaluated demands
};

/// Worst-case power of the explicit construction over D_d (all of it when
/// |D_d| <= sweep_limit, otherwise the representative plus a strided sample).
ConstructiveResult achievable_power_constructive(const CorrelatedLibrary& lib, const ChannelConfig& ch,
                                                 const PlacementSpec& spec, std::size_t sweep_limit = 5000);
double achievable_power_constructive(const CorrelatedLibrary& lib, const ChannelConfig& ch, double cache,
                                     const CacheAllocation& pi);

}  // namespace cachebc
