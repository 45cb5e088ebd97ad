#pragma once

// Correlated library, channel, and demand combinatorics shared by every scheme.
//
// Indexing conventions used throughout the library:
//   * files and users are 0-based in code (file 0 is W_1, user 0 is the
//     weakest user); printed labels are 1-based;
//   * commonness levels are 1-based (level = |S|), so level_rate(1) is the
//     private-subfile rate;
//   * a subfile is identified by the bitmask of the files sharing it.

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "cachebc/combinatorics.hpp"

namespace cachebc {

/// W̄_S: the content shared exclusively by the files in S.
class SubfileId {
 public:
  explicit SubfileId(SubsetMask members);

  SubsetMask mask() const { return members_; }
  int level() const { return popcount(members_); }
  bool contains(int file) const { return (members_ >> file) & 1u; }
  /// "{1,3}" style label with 1-based file numbers.
  std::string to_string() const;

  friend bool operator==(const SubfileId&, const SubfileId&) = default;
  friend auto operator<=>(const SubfileId&, const SubfileId&) = default;

 private:
  SubsetMask members_;
};

/// N files decomposed into 2^N - 1 subfiles; every subfile of commonness
/// level l has rate R_l (bits per channel use).
class CorrelatedLibrary {
 public:
  explicit CorrelatedLibrary(std::vector<double> level_rates);

  int n_files() const { return static_cast<int>(rates_.size()); }
  /// R_l for l in [1..N].
  double level_rate(int level) const { return rates_.at(static_cast<std::size_t>(level - 1)); }
  std::span<const double> level_rates() const { return rates_; }
  /// Number of subfiles in sublibrary L_l, C(N, l).
  std::int64_t sublibrary_size(int level) const { return binomial(n_files(), level); }
  /// Subfiles of L_l in ascending bitmask order (N <= kMaxExhaustive).
  std::vector<SubfileId> sublibrary(int level) const;
  /// All 2^N - 1 subfiles in ascending bitmask order (N <= kMaxExhaustive).
  std::vector<SubfileId> subfiles() const;

 private:
  std::vector<double> rates_;
};

/// K users with squared gains sorted from weakest to strongest.
class ChannelConfig {
 public:
  explicit ChannelConfig(std::vector<double> gains_sq);

  /// 1/h_k^2 = a - b*(k-1) for k = 1..K.
  static ChannelConfig from_inverse_profile(int n_users, double a, double b);

  int n_users() const { return static_cast<int>(gains_sq_.size()); }
  double gain_sq(int user) const { return gains_sq_.at(static_cast<std::size_t>(user)); }
  std::span<const double> gains_sq() const { return gains_sq_; }

 private:
  std::vector<double> gains_sq_;
};

/// d = (d_1..d_K), stored as 0-based file indices.
class DemandVector {
 public:
  DemandVector(std::vector<int> demands, int n_files);

  int n_users() const { return static_cast<int>(demands_.size()); }
  int operator[](int user) const { return demands_[static_cast<std::size_t>(user)]; }
  std::span<const int> values() const { return demands_; }
  /// Bitmask of the distinct requested files.
  SubsetMask requested_files() const;
  /// "(1,2,3)" with 1-based file numbers.
  std::string to_string() const;

  friend bool operator==(const DemandVector&, const DemandVector&) = default;

 private:
  std::vector<int> demands_;
};

/// alpha_l: fraction of each file's length that lives in sublibrary L_l.
class AlphaProfile {
 public:
  explicit AlphaProfile(std::vector<double> fractions);

  int n_files() const { return static_cast<int>(fractions_.size()); }
  double operator[](int level) const { return fractions_.at(static_cast<std::size_t>(level - 1)); }
  std::span<const double> fractions() const { return fractions_; }

 private:
  std::vector<double> fractions_;
};

/// R = sum_l C(N-1, l-1) R_l, the common rate of every file.
double file_rate(const CorrelatedLibrary& lib);

/// R_l = alpha_l * R / C(N-1, l-1).
CorrelatedLibrary alpha_to_rates(const AlphaProfile& alpha, double total_rate);
AlphaProfile rates_to_alpha(const CorrelatedLibrary& lib);

/// N_e(d), the number of distinct requests.
int distinct_demand_count(const DemandVector& d);

/// |D_d| = C(N, N_e) N_e! N^(K - N_e) with N_e = min(N, K).
std::uint64_t worst_case_demand_count(int n_files, int n_users);

/// Visits every demand whose first min(N, K) users request distinct files,
/// in lexicographic order.
void for_each_worst_case_demand(int n_files, int n_users,
                                const std::function<void(const DemandVector&)>& visit);
std::vector<DemandVector> worst_case_demand_set(int n_files, int n_users);

/// Visits all N^K demand vectors in lexicographic order.
void for_each_demand(int n_files, int n_users,
                     const std::function<void(const DemandVector&)>& visit);

/// The demand (1, 2, .., N_e, 1, 1, ..): weakest users request distinct files.
DemandVector representative_worst_case_demand(int n_files, int n_users);

/// Same N and file rate, all mass moved to private subfiles.
CorrelatedLibrary correlation_ignorant_projection(const CorrelatedLibrary& lib);

}  // namespace cachebc
