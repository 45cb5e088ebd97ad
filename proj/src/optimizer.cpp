#include "cachebc/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

namespace cachebc {

namespace {

// Closed-form P_UB with the per-level group weights folded in ahead of time.
class ClosedFormObjective {
 public:
  ClosedFormObjective(const CorrelatedLibrary& lib, const ChannelConfig& ch, double cache, LeaderCap rule)
      : lib_(lib), ch_(ch), cache_(cache) {
    const int n = lib.n_files();
    const int k_users = ch.n_users();
    const int ne = std::min(n, k_users);
    weight_.assign(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(k_users), 0.0));
    for (int l = 1; l <= n; ++l) {
      const double rate = lib.level_rate(l);
      if (rate <= 0.0) continue;
      for (int r = std::max(l - n + ne, 1); r <= std::min(l, ne); ++r) {
        const double groups = binomial_d(n - ne, l - r) * binomial_d(ne - 1, r - 1);
        const int cap = leader_cap(rule, ne, r);
        for (int k = 0; k < std::min(cap, k_users); ++k) {
          weight_[static_cast<std::size_t>(l - 1)][static_cast<std::size_t>(k)] += groups * rate;
        }
      }
    }
    rho_.resize(static_cast<std::size_t>(k_users));
  }

  double t_for(int level, double pi) const {
    const double rate = lib_.level_rate(level);
    if (rate <= 0.0 || cache_ <= 0.0) return 0.0;
    const double k_users = ch_.n_users();
    return std::clamp(k_users * pi * cache_ / (lib_.sublibrary_size(level) * rate), 0.0, k_users);
  }

  /// pi mass that moves t_l by one.
  double pi_per_unit_t(int level) const {
    return lib_.sublibrary_size(level) * lib_.level_rate(level) / (ch_.n_users() * cache_);
  }

  double operator()(const std::vector<double>& pi) {
    const int n = lib_.n_files();
    const int k_users = ch_.n_users();
    std::fill(rho_.begin(), rho_.end(), 0.0);
    for (int l = 1; l <= n; ++l) {
      const auto& w = weight_[static_cast<std::size_t>(l - 1)];
      if (w[0] == 0.0) continue;
      const double t = t_for(l, pi[static_cast<std::size_t>(l - 1)]);
      for (int k = 0; k < k_users; ++k) {
        if (w[static_cast<std::size_t>(k)] == 0.0) continue;
        rho_[static_cast<std::size_t>(k)] += w[static_cast<std::size_t>(k)] * gamma_closed_form(k, k_users, t, k_users);
      }
    }
    return min_superposition_power(rho_, ch_).total;
  }

 private:
  const CorrelatedLibrary& lib_;
  const ChannelConfig& ch_;
  double cache_;
  std::vector<std::vector<double>> weight_;
  std::vector<double> rho_;
};

// Visits every way of writing `total` as an ordered sum of `parts` non-negative integers.
void for_each_composition(int total, int parts, const std::function<void(const std::vector<int>&)>& visit) {
  std::vector<int> c(static_cast<std::size_t>(parts), 0);
  std::function<void(int, int)> rec = [&](int pos, int left) {
    if (pos == parts - 1) {
      c[static_cast<std::size_t>(pos)] = left;
      visit(c);
      return;
    }
    for (int v = left; v >= 0; --v) {
      c[static_cast<std::size_t>(pos)] = v;
      rec(pos + 1, left - v);
    }
  };
  rec(0, total);
}

}  // namespace

OptimizerResult optimize_pi(const CorrelatedLibrary& lib, const ChannelConfig& ch, double cache,
                            const OptimizerSettings& settings, const std::vector<CacheAllocation>& warm_starts) {
  const int n = lib.n_files();
  ClosedFormObjective objective(lib, ch, cache, settings.leader_cap);

  std::vector<int> active;
  for (int l = 1; l <= n; ++l) {
    if (lib.level_rate(l) > 0.0) active.push_back(l);
  }

  OptimizerResult best;
  best.pi.pi.assign(static_cast<std::size_t>(n), 0.0);
  if (active.empty()) {
    best.pi.pi[0] = 1.0;
    best.power = objective(best.pi.pi);
    best.trace.push_back(best.power);
    return best;
  }
  best.pi.pi[static_cast<std::size_t>(active.front() - 1)] = 1.0;
  best.power = objective(best.pi.pi);

  auto consider = [&](const std::vector<double>& pi) {
    const double p = objective(pi);
    if (p < best.power) {
      best.power = p;
      best.pi.pi = pi;
    }
  };

  if (cache > 0.0) {
    // Everything fits: saturate every sublibrary.
    double saturate_all = 0.0;
    for (int l : active) saturate_all += objective.pi_per_unit_t(l) * ch.n_users();
    if (saturate_all <= 1.0) {
      std::vector<double> pi(static_cast<std::size_t>(n), 0.0);
      for (int l : active) pi[static_cast<std::size_t>(l - 1)] = objective.pi_per_unit_t(l) * ch.n_users();
      best.pi.pi = pi;
      best.power = objective(pi);
      best.trace.push_back(best.power);
      return best;
    }

    // Coarse simplex grid over the active sublibraries; shrink it if the
    // number of grid points would explode.
    const int parts = static_cast<int>(active.size());
    int res = std::max(1, settings.grid_resolution);
    while (res > 1 && binomial_d(res + parts - 1, parts - 1) > 2e5) --res;
    std::vector<double> pi(static_cast<std::size_t>(n), 0.0);
    for_each_composition(res, parts, [&](const std::vector<int>& c) {
      for (int i = 0; i < parts; ++i) {
        pi[static_cast<std::size_t>(active[static_cast<std::size_t>(i)] - 1)] =
            static_cast<double>(c[static_cast<std::size_t>(i)]) / res;
      }
      consider(pi);
    });
    for (const CacheAllocation& w : warm_starts) {
      if (static_cast<int>(w.pi.size()) != n) continue;
      std::vector<double> cand(static_cast<std::size_t>(n), 0.0);
      double sum = 0.0;
      for (int l : active) sum += cand[static_cast<std::size_t>(l - 1)] = w.pi[static_cast<std::size_t>(l - 1)];
      if (sum <= 0.0) continue;
      // Rescale onto sum(pi) = 1; extra cache never raises the closed form.
      for (double& x : cand) x /= sum;
      consider(cand);
    }
    best.trace.push_back(best.power);

    // Coordinate descent: move mass between pairs of sublibraries, trying a
    // geometric step ladder plus the transfers that land either t on an
    // integer breakpoint.
    double step = 1.0 / res;
    while (step >= settings.min_step) {
      double pass_gain;
      do {
        pass_gain = 0.0;
        for (int a : active) {
          for (int b : active) {
            if (a == b) continue;
            auto& cur = best.pi.pi;
            const double pa = cur[static_cast<std::size_t>(a - 1)];
            const double pb = cur[static_cast<std::size_t>(b - 1)];
            if (pa <= 0.0) continue;
            std::vector<double> deltas{std::min(step, pa)};
            const double ua = objective.pi_per_unit_t(a);
            const double ub = objective.pi_per_unit_t(b);
            const double ta = pa / ua;
            const double tb = pb / ub;
            for (double j : {std::ceil(ta) - 1.0, std::floor(ta) - 1.0, std::floor(ta)}) {
              deltas.push_back(pa - j * ua);
            }
            for (double j : {std::floor(tb) + 1.0, std::ceil(tb), std::ceil(tb) + 1.0}) {
              deltas.push_back(j * ub - pb);
            }
            for (double delta : deltas) {
              if (!(delta > 0.0) || delta > pa) continue;
              std::vector<double> cand = cur;
              cand[static_cast<std::size_t>(a - 1)] = pa - delta;
              cand[static_cast<std::size_t>(b - 1)] = pb + delta;
              const double p = objective(cand);
              if (p < best.power) {
                pass_gain += best.power - p;
                best.power = p;
                best.pi.pi = cand;
                best.trace.push_back(p);
                break;
              }
            }
          }
        }
      } while (pass_gain >= settings.refine_tolerance);
      step *= 0.5;
    }
  } else {
    best.trace.push_back(best.power);
  }
  return best;
}

}  // namespace cachebc
