#include "cachebc/superposition.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cachebc {

void CacheAllocation::validate(int n_files) const {
  if (static_cast<int>(pi.size()) != n_files) throw std::invalid_argument("CacheAllocation: length must equal N");
  double sum = 0.0;
  for (double p : pi) {
    if (!(p >= 0.0) || p > 1.0) throw std::invalid_argument("CacheAllocation: entries must lie in [0,1]");
    sum += p;
  }
  if (sum > 1.0 + 1e-12) throw std::invalid_argument("CacheAllocation: entries sum above 1");
}

std::vector<double> cache_parameters(const CorrelatedLibrary& lib, int n_users, double cache,
                                     const CacheAllocation& pi) {
  if (!(cache >= 0.0)) throw std::invalid_argument("cache_split: cache size must be non-negative");
  pi.validate(lib.n_files());
  std::vector<double> t;
  for (int l = 1; l <= lib.n_files(); ++l) {
    const double rate = lib.level_rate(l);
    if (rate <= 0.0) {
      t.push_back(0.0);
      continue;
    }
    const double raw = n_users * pi.pi[static_cast<std::size_t>(l - 1)] * cache / (lib.sublibrary_size(l) * rate);
    t.push_back(std::clamp(raw, 0.0, static_cast<double>(n_users)));
  }
  return t;
}

PlacementSpec placement_from_t(const CorrelatedLibrary& lib, int n_users, std::span<const Rational> t) {
  if (static_cast<int>(t.size()) != lib.n_files()) throw std::invalid_argument("placement: one t per sublibrary");
  if (n_users < 1 || n_users > kMaxExhaustive) throw std::invalid_argument("placement: K outside [1, 16]");
  PlacementSpec spec;
  spec.n_files = lib.n_files();
  spec.n_users = n_users;
  for (int l = 1; l <= lib.n_files(); ++l) {
    SublibraryPlacement s;
    s.level = l;
    s.rate = lib.level_rate(l);
    s.t = s.rate > 0.0 ? t[static_cast<std::size_t>(l - 1)] : Rational(0);
    if (s.t < 0 || s.t > n_users) throw std::invalid_argument("placement: t outside [0, K]");
    s.t_a = static_cast<int>(floor_of(s.t));
    s.share_a = (Rational(s.t_b()) - s.t) / binomial(n_users, s.t_a);
    const std::int64_t parts_b = binomial(n_users, s.t_b());
    s.share_b = parts_b > 0 ? (s.t - s.t_a) / parts_b : Rational(0);
    if (s.rate <= 0.0) s.share_a = s.share_b = 0;
    spec.levels.push_back(s);
  }
  return spec;
}

PlacementSpec cache_split(const CorrelatedLibrary& lib, int n_users, double cache, const CacheAllocation& pi) {
  std::vector<Rational> t;
  for (double x : cache_parameters(lib, n_users, cache, pi)) {
    Rational q = rationalize(x);
    if (q > n_users) q = n_users;
    t.push_back(q);
  }
  return placement_from_t(lib, n_users, t);
}

std::string to_string(const PartToken& p) {
  std::string s = "W";
  s += p.cls == PartClass::A ? "^A_" : "^B_";
  s += SubfileId(p.subfile).to_string();
  s += ",{";
  bool first = true;
  for (int k = 0; k < 32; ++k) {
    if (p.holders & (SubsetMask{1} << k)) {
      if (!first) s += ',';
      s += std::to_string(k + 1);
      first = false;
    }
  }
  s += '}';
  return s;
}

std::vector<PartToken> parts_of_subfile(const PlacementSpec& spec, SubsetMask subfile) {
  const auto& lv = spec.level(popcount(subfile));
  std::vector<PartToken> parts;
  for (PartClass c : {PartClass::A, PartClass::B}) {
    if (is_zero(lv.share_of(c))) continue;
    for (SubsetMask holders : subsets_of_size(full_mask(spec.n_users), lv.part_size_of(c))) {
      parts.push_back({subfile, c, holders});
    }
  }
  return parts;
}

std::vector<std::vector<PartToken>> place(const PlacementSpec& spec) {
  std::vector<std::vector<PartToken>> caches(static_cast<std::size_t>(spec.n_users));
  for (SubsetMask s = 1; s <= full_mask(spec.n_files); ++s) {
    for (const PartToken& p : parts_of_subfile(spec, s)) {
      for (int k = 0; k < spec.n_users; ++k) {
        if (p.holders & (SubsetMask{1} << k)) caches[static_cast<std::size_t>(k)].push_back(p);
      }
    }
  }
  return caches;
}

SubsetMask GroupDemand::leaders() const {
  SubsetMask out = 0;
  for (std::size_t k = 0; k < assignments.size(); ++k) {
    if (!assignments[k]) continue;
    bool seen = false;
    for (std::size_t j = 0; j < k; ++j) seen = seen || assignments[j] == assignments[k];
    if (!seen) out |= SubsetMask{1} << k;
  }
  return out;
}

int GroupDemand::distinct_subfiles() const { return popcount(leaders()); }

namespace {

// Search state for GROUP. Files are the unit of assignment; users inherit the
// subfile assigned to the file they requested.
class GroupSearch {
 public:
  GroupSearch(std::span<const SubsetMask> pool, SubsetMask demanded, int r)
      : pool_(pool.begin(), pool.end()), used_(pool.size(), false), demanded_(demanded), r_(r),
        remaining_(pool.size()) {
    std::sort(pool_.begin(), pool_.end());
  }

  // Depth-first search over the pick choices. Returns true when every group
  // serves each demanded file exactly once.
  bool packed() {
    nodes_ = 0;
    aborted_ = false;
    groups_.clear();
    current_.assign(32, 0);
    return step(demanded_, 0, 0);
  }

  // Single pass with the first admissible pick; closes a group early when no
  // pick fits, leaving the unserved files empty in that group.
  void greedy() {
    groups_.clear();
    std::fill(used_.begin(), used_.end(), false);
    remaining_ = pool_.size();
    current_.assign(32, 0);
    SubsetMask carry_sub = 0, carry_files = 0;
    while (remaining_ > 0 || carry_files != 0) {
      SubsetMask f = demanded_;
      while (f != 0) {
        if (popcount(f) >= r_) {
          if (carry_files) {
            assign(carry_files, carry_sub);
            f &= ~carry_files;
            carry_files = carry_sub = 0;
            continue;
          }
          const int idx = first_candidate([&](SubsetMask s) { return is_subset(s & demanded_, f); });
          if (idx < 0) break;
          take(idx);
          const SubsetMask s = pool_[static_cast<std::size_t>(idx)];
          assign(s & demanded_, s);
          f &= ~s;
        } else {
          const int idx = first_candidate([&](SubsetMask s) { return is_subset(f, s & demanded_); });
          if (idx < 0) break;
          take(idx);
          const SubsetMask s = pool_[static_cast<std::size_t>(idx)];
          assign(f, s);
          carry_sub = s;
          carry_files = (s & demanded_) & ~f;
          f = 0;
        }
      }
      groups_.push_back(current_);
      current_.assign(32, 0);
    }
  }

  bool aborted() const { return aborted_; }
  const std::vector<std::vector<SubsetMask>>& groups() const { return groups_; }

 private:
  static constexpr long kNodeBudget = 200000;

  void assign(SubsetMask files, SubsetMask s) {
    for (int f = 0; f < 32; ++f) {
      if (files & (SubsetMask{1} << f)) current_[static_cast<std::size_t>(f)] = s;
    }
  }
  void take(int idx) {
    used_[static_cast<std::size_t>(idx)] = true;
    --remaining_;
  }
  void give_back(int idx) {
    used_[static_cast<std::size_t>(idx)] = false;
    ++remaining_;
  }

  template <class Pred>
  int first_candidate(Pred ok) const {
    for (std::size_t i = 0; i < pool_.size(); ++i) {
      if (!used_[i] && ok(pool_[i])) return static_cast<int>(i);
    }
    return -1;
  }

  // Candidates with distinct footprints on the demanded files; subfiles that
  // differ only outside the demanded files are interchangeable here.
  template <class Pred>
  std::vector<int> candidates(Pred ok) const {
    std::vector<int> out;
    std::vector<SubsetMask> seen;
    for (std::size_t i = 0; i < pool_.size(); ++i) {
      if (used_[i] || !ok(pool_[i])) continue;
      const SubsetMask footprint = pool_[i] & demanded_;
      if (std::find(seen.begin(), seen.end(), footprint) != seen.end()) continue;
      seen.push_back(footprint);
      out.push_back(static_cast<int>(i));
    }
    return out;
  }

  bool step(SubsetMask f, SubsetMask carry_sub, SubsetMask carry_files) {
    if (++nodes_ > kNodeBudget) {
      aborted_ = true;
      return false;
    }
    if (f == 0) {
      groups_.push_back(current_);
      if (remaining_ == 0 && carry_files == 0) return true;
      const auto saved = current_;
      current_.assign(32, 0);
      if (step(demanded_, carry_sub, carry_files)) return true;
      current_ = saved;
      groups_.pop_back();
      return false;
    }
    if (popcount(f) >= r_) {
      if (carry_files) {
        const auto saved = current_;
        assign(carry_files, carry_sub);
        if (step(f & ~carry_files, 0, 0)) return true;
        current_ = saved;
        return false;
      }
      for (int idx : candidates([&](SubsetMask s) { return is_subset(s & demanded_, f); })) {
        const SubsetMask s = pool_[static_cast<std::size_t>(idx)];
        const auto saved = current_;
        take(idx);
        assign(s & demanded_, s);
        if (step(f & ~s, 0, 0)) return true;
        give_back(idx);
        current_ = saved;
        if (aborted_) return false;
      }
      return false;
    }
    // Fewer open files than r: the pick also covers files already served in
    // this group; those receive it in the next group.
    for (int idx : candidates([&](SubsetMask s) { return is_subset(f, s & demanded_); })) {
      const SubsetMask s = pool_[static_cast<std::size_t>(idx)];
      const auto saved = current_;
      take(idx);
      assign(f, s);
      if (step(0, s, (s & demanded_) & ~f)) return true;
      give_back(idx);
      current_ = saved;
      if (aborted_) return false;
    }
    return false;
  }

  std::vector<SubsetMask> pool_;
  std::vector<bool> used_;
  SubsetMask demanded_;
  int r_;
  std::size_t remaining_;
  std::vector<SubsetMask> current_;
  std::vector<std::vector<SubsetMask>> groups_;
  long nodes_ = 0;
  bool aborted_ = false;
};

}  // namespace

std::vector<GroupDemand> group(std::span<const SubsetMask> requested, const DemandVector& d, int r) {
  const SubsetMask demanded = d.requested_files();
  if (r < 1 || r > popcount(demanded)) throw std::invalid_argument("group: r outside [1, |D|]");
  for (SubsetMask s : requested) {
    if (popcount(s & demanded) != r) throw std::invalid_argument("group: subfile does not meet D in r files");
  }
  GroupSearch search(requested, demanded, r);
  if (!search.packed()) search.greedy();

  std::vector<GroupDemand> out;
  for (const auto& by_file : search.groups()) {
    GroupDemand g;
    for (int k = 0; k < d.n_users(); ++k) {
      const SubsetMask s = by_file[static_cast<std::size_t>(d[k])];
      g.assignments.push_back(s ? std::optional<SubfileId>(SubfileId(s)) : std::nullopt);
    }
    out.push_back(std::move(g));
  }
  return out;
}

std::vector<std::vector<XorMessage>> single_demand(PartClass cls, const GroupDemand& g, int t, int level,
                                                   const Rational& share) {
  const int k_users = static_cast<int>(g.assignments.size());
  std::vector<std::vector<XorMessage>> out(static_cast<std::size_t>(k_users));
  if (t < 0 || t > k_users) return out;
  const SubsetMask leaders = g.leaders();
  for (int k = 0; k < k_users; ++k) {
    const SubsetMask stronger = full_mask(k_users) & ~full_mask(k + 1);
    for (SubsetMask u : subsets_of_size(stronger, t)) {
      const SubsetMask served = u | (SubsetMask{1} << k);
      if ((served & leaders) == 0) continue;
      XorMessage msg{level, cls, {}, share};
      for (int j = 0; j < k_users; ++j) {
        if (!(served & (SubsetMask{1} << j))) continue;
        const auto& want = g.assignments[static_cast<std::size_t>(j)];
        if (!want) continue;
        msg.parts.push_back({want->mask(), cls, served & ~(SubsetMask{1} << j)});
      }
      if (!msg.parts.empty()) out[static_cast<std::size_t>(k)].push_back(std::move(msg));
    }
  }
  return out;
}

MessagePlan generate_messages(const CorrelatedLibrary& lib, const PlacementSpec& spec, const DemandVector& d) {
  if (d.n_users() != spec.n_users) throw std::invalid_argument("generate_messages: demand length differs from K");
  if (lib.n_files() != spec.n_files) throw std::invalid_argument("generate_messages: placement built for another N");
  const int n = lib.n_files();
  const int k_users = spec.n_users;
  const SubsetMask demanded = d.requested_files();
  const int nd = popcount(demanded);

  MessagePlan plan;
  plan.per_user.resize(static_cast<std::size_t>(k_users));
  plan.rate_share.assign(static_cast<std::size_t>(k_users), std::vector<Rational>(static_cast<std::size_t>(n), 0));

  for (int l = 1; l <= n; ++l) {
    const auto& lv = spec.level(l);
    if (lv.rate <= 0.0) continue;
    const auto level_subfiles = subsets_of_size(full_mask(n), l);
    for (int r = std::max(l - n + nd, 1); r <= std::min(l, nd); ++r) {
      std::vector<SubsetMask> w_r;
      for (SubsetMask s : level_subfiles) {
        if (popcount(s & demanded) == r) w_r.push_back(s);
      }
      for (GroupDemand& g : group(w_r, d, r)) {
        for (PartClass c : {PartClass::A, PartClass::B}) {
          if (is_zero(lv.share_of(c))) continue;
          auto msgs = single_demand(c, g, lv.part_size_of(c), l, lv.share_of(c));
          for (int k = 0; k < k_users; ++k) {
            auto& mine = msgs[static_cast<std::size_t>(k)];
            plan.rate_share[static_cast<std::size_t>(k)][static_cast<std::size_t>(l - 1)] +=
                lv.share_of(c) * static_cast<std::int64_t>(mine.size());
            auto& dst = plan.per_user[static_cast<std::size_t>(k)];
            dst.insert(dst.end(), std::make_move_iterator(mine.begin()), std::make_move_iterator(mine.end()));
          }
        }
        plan.groups.push_back({l, r, std::move(g)});
      }
    }
  }
  for (int k = 0; k < k_users; ++k) {
    double rho = 0.0;
    for (int l = 1; l <= n; ++l) {
      rho += to_double(plan.rate_share[static_cast<std::size_t>(k)][static_cast<std::size_t>(l - 1)]) *
             lib.level_rate(l);
    }
    plan.rates.push_back(rho);
  }
  return plan;
}

int leader_cap(LeaderCap rule, int distinct, int r) {
  const int base = (distinct + r - 1) / r;
  if (rule == LeaderCap::Loose) return base + 1;
  return base + (distinct % r != 0 ? 1 : 0);
}

Rational gamma_closed_form(int user, int r, int n_users, int n_files, const Rational& t) {
  const int k = user + 1;
  if (k > leader_cap(LeaderCap::Loose, std::min(n_files, n_users), r)) return 0;
  const auto t_a = static_cast<int>(floor_of(t));
  Rational g = Rational(binomial(n_users - k, t_a), binomial(n_users, t_a)) * (Rational(t_a + 1) - t);
  const std::int64_t den_b = binomial(n_users, t_a + 1);
  if (den_b > 0) g += Rational(binomial(n_users - k, t_a + 1), den_b) * (t - t_a);
  return g;
}

double gamma_closed_form(int user, int n_users, double t, int cap) {
  const int k = user + 1;
  if (k > cap) return 0.0;
  const int t_a = static_cast<int>(std::floor(t));
  double g = binomial_d(n_users - k, t_a) / binomial_d(n_users, t_a) * (t_a + 1 - t);
  const double den_b = binomial_d(n_users, t_a + 1);
  if (den_b > 0.0 && t > t_a) g += binomial_d(n_users - k, t_a + 1) / den_b * (t - t_a);
  return g;
}

RateVector closed_form_rates(const CorrelatedLibrary& lib, int n_users, std::span<const double> t,
                             LeaderCap rule) {
  const int n = lib.n_files();
  if (static_cast<int>(t.size()) != n) throw std::invalid_argument("closed_form_rates: one t per sublibrary");
  const int ne = std::min(n, n_users);
  RateVector rho(static_cast<std::size_t>(n_users), 0.0);
  for (int l = 1; l <= n; ++l) {
    const double rate = lib.level_rate(l);
    if (rate <= 0.0) continue;
    const double tl = t[static_cast<std::size_t>(l - 1)];
    for (int r = std::max(l - n + ne, 1); r <= std::min(l, ne); ++r) {
      const double groups = binomial_d(n - ne, l - r) * binomial_d(ne - 1, r - 1);
      if (groups == 0.0) continue;
      const int cap = leader_cap(rule, ne, r);
      for (int k = 0; k < n_users; ++k) {
        rho[static_cast<std::size_t>(k)] += groups * gamma_closed_form(k, n_users, tl, cap) * rate;
      }
    }
  }
  return rho;
}

double upper_bound_power_for_t(const CorrelatedLibrary& lib, const ChannelConfig& ch, std::span<const double> t,
                               LeaderCap rule) {
  return min_superposition_power(closed_form_rates(lib, ch.n_users(), t, rule), ch).total;
}

double upper_bound_power(const CorrelatedLibrary& lib, const ChannelConfig& ch, double cache,
                         const CacheAllocation& pi, LeaderCap rule) {
  return upper_bound_power_for_t(lib, ch, cache_parameters(lib, ch.n_users(), cache, pi), rule);
}

std::int64_t leader_message_count(int user, SubsetMask leaders, int t, int n_users) {
  const int k = user + 1;
  if (leaders & (SubsetMask{1} << user)) return binomial(n_users - k, t);
  const SubsetMask stronger = full_mask(n_users) & ~full_mask(user + 1);
  const int e = popcount(leaders & stronger);
  return binomial(n_users - k, t) - binomial(n_users - k - e, t);
}

ConstructiveResult achievable_power_constructive(const CorrelatedLibrary& lib, const ChannelConfig& ch,
                                                 const PlacementSpec& spec, std::size_t sweep_limit) {
  const int n = lib.n_files();
  const int k_users = ch.n_users();
  ConstructiveResult res;
  res.min_power = INFINITY;
  auto evaluate = [&](const DemandVector& d) {
    const MessagePlan plan = generate_messages(lib, spec, d);
    const double p = min_superposition_power(plan.rates, ch).total;
    ++res.demands_evaluated;
    res.min_power = std::min(res.min_power, p);
    if (!res.worst || p > res.power) {
      res.power = p;
      res.rates = plan.rates;
      res.worst = d;
    }
  };
  const std::uint64_t total = worst_case_demand_count(n, k_users);
  if (total <= sweep_limit) {
    for_each_worst_case_demand(n, k_users, evaluate);
  } else {
    evaluate(representative_worst_case_demand(n, k_users));
    if (total > 1000000) return res;
    const std::uint64_t stride = std::max<std::uint64_t>(1, total / 16);
    std::uint64_t index = 0;
    for_each_worst_case_demand(n, k_users, [&](const DemandVector& d) {
      if (index++ % stride == 0) evaluate(d);
    });
  }
  return res;
}

double achievable_power_constructive(const CorrelatedLibrary& lib, const ChannelConfig& ch, double cache,
                                     const CacheAllocation& pi) {
  return achievable_power_constructive(lib, ch, cache_split(lib, ch.n_users(), cache, pi)).power;
}

}  // namespace cachebc
