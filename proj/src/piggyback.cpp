#include "cachebc/piggyback.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cachebc/bounds.hpp"

namespace cachebc {

namespace {

double layer_power(double rate, double gain_sq, double interference) {
  return std::expm1(2.0 * rate * std::log(2.0)) * (1.0 / gain_sq + interference);
}

void require_applicable(const CorrelatedLibrary& lib, int n_users, double cache, const char* who) {
  if (!piggyback_applicable(lib, n_users, cache)) {
    throw std::invalid_argument(std::string(who) + ": cache size exceeds the smallest split subfile rate");
  }
}

}  // namespace

bool piggyback_applicable(const CorrelatedLibrary& lib, int n_users, double cache) {
  if (!(cache >= 0.0)) return false;
  const int n = lib.n_files();
  for (int l = std::max(n - n_users, 1); l <= n; ++l) {
    if (cache > lib.level_rate(l)) return false;
  }
  return true;
}

int first_split_level(int n_files, int n_users) { return n_files - std::min(n_files, n_users) + 1; }

std::vector<CodedCache> coded_place(const CorrelatedLibrary& lib, int n_users, double cache) {
  require_applicable(lib, n_users, cache, "coded_place");
  const int n = lib.n_files();
  std::vector<CodedCache> caches(static_cast<std::size_t>(n_users));
  if (cache <= 0.0) return caches;
  for (int k = 0; k < std::min(n, n_users); ++k) {
    auto& z = caches[static_cast<std::size_t>(k)];
    z.level = n - k;
    z.c_parts = subsets_of_size(full_mask(n), z.level);
  }
  return caches;
}

std::vector<LevelMessage> build_level_messages(const CorrelatedLibrary& lib, const DemandVector& d, double cache) {
  const int n = lib.n_files();
  require_applicable(lib, d.n_users(), cache, "build_level_messages");

  std::vector<int> leaders;
  SubsetMask seen = 0;
  for (int k = 0; k < d.n_users(); ++k) {
    const SubsetMask f = SubsetMask{1} << d[k];
    if (seen & f) continue;
    seen |= f;
    leaders.push_back(k);
  }

  std::vector<LevelMessage> out;
  SubsetMask earlier = 0;  // files requested by previous leaders
  for (int i = 0; i < static_cast<int>(leaders.size()); ++i) {
    LevelMessage msg;
    msg.index = i;
    msg.leader = leaders[static_cast<std::size_t>(i)];
    const int file = d[msg.leader];
    const SubsetMask allowed = full_mask(n) & ~earlier;
    // The only subfile of D_i at level N-i is `allowed` itself.
    const SubsetMask designated = allowed;
    for (SubsetMask s = 1; s <= full_mask(n); ++s) {
      if (!is_subset(s, allowed) || !((s >> file) & 1u)) continue;
      const double rate = lib.level_rate(popcount(s));
      if (s == designated && msg.has_row()) {
        msg.column.push_back({s, ColumnPart::UPart});
        msg.column_rate += rate - cache;
      } else {
        msg.column.push_back({s, ColumnPart::Whole});
        msg.column_rate += rate;
      }
    }
    if (msg.has_row() && cache > 0.0) {
      msg.row = subsets_of_size(full_mask(n), n - i);
      msg.row_rate = cache;
    }
    out.push_back(std::move(msg));
    earlier |= SubsetMask{1} << file;
  }
  return out;
}

PowerResult level_power_conditions(std::span<const LevelMessage> levels, const ChannelConfig& ch) {
  PowerResult res;
  res.per_level.assign(levels.size(), 0.0);
  double above = 0.0;
  for (std::size_t i = levels.size(); i-- > 0;) {
    const LevelMessage& lv = levels[i];
    double p = layer_power(lv.column_rate, ch.gain_sq(lv.leader), above);
    if (lv.leader + 1 < ch.n_users()) {
      p = std::max(p, layer_power(lv.column_rate + lv.row_rate, ch.gain_sq(lv.leader + 1), above));
    }
    res.per_level[i] = p;
    above += p;
  }
  res.total = above;
  return res;
}

PowerResult piggyback_power_levels(const CorrelatedLibrary& lib, const ChannelConfig& ch, double cache) {
  require_applicable(lib, ch.n_users(), cache, "piggyback_power");
  const std::vector<double> rho = rho_tilde(lib, ch.n_users(), cache);
  PowerResult res;
  res.per_level.assign(static_cast<std::size_t>(ch.n_users()), 0.0);
  double above = 0.0;
  for (int k = static_cast<int>(rho.size()) - 1; k >= 0; --k) {
    const double r = rho[static_cast<std::size_t>(k)];
    double p = layer_power(r, ch.gain_sq(k), above);
    if (k + 1 < ch.n_users()) p = std::max(p, layer_power(r + cache, ch.gain_sq(k + 1), above));
    res.per_level[static_cast<std::size_t>(k)] = p;
    above += p;
  }
  res.total = above;
  return res;
}

double piggyback_power(const CorrelatedLibrary& lib, const ChannelConfig& ch, double cache) {
  return piggyback_power_levels(lib, ch, cache).total;
}

double piggyback_power_constructive(const CorrelatedLibrary& lib, const ChannelConfig& ch, double cache) {
  const auto levels = build_level_messages(lib, representative_worst_case_demand(lib.n_files(), ch.n_users()), cache);
  return level_power_conditions(levels, ch).total;
}

bool meets_lower_bound(const CorrelatedLibrary& lib, const ChannelConfig& ch, double cache) {
  require_applicable(lib, ch.n_users(), cache, "meets_lower_bound");
  const std::vector<double> rho = rho_tilde(lib, ch.n_users(), cache);
  double above = 0.0;
  bool ok = true;
  for (int k = static_cast<int>(rho.size()) - 1; k >= 0; --k) {
    const double r = rho[static_cast<std::size_t>(k)];
    const double own = layer_power(r, ch.gain_sq(k), above);
    double p = own;
    if (k + 1 < ch.n_users()) {
      const double relay = layer_power(r + cache, ch.gain_sq(k + 1), above);
      if (relay > own * (1.0 + 1e-12)) ok = false;
      p = std::max(own, relay);
    }
    above += p;
  }
  return ok;
}

}  // namespace cachebc
