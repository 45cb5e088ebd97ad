#include "cachebc/bounds.hpp"

#include <algorithm>
#include <stdexcept>

#include "cachebc/power.hpp"

namespace cachebc {

std::vector<double> rho_tilde(const CorrelatedLibrary& lib, int n_users, double cache) {
  if (!(cache >= 0.0)) throw std::invalid_argument("rho_tilde: cache size must be non-negative");
  const int n = lib.n_files();
  const int ne = std::min(n, n_users);
  std::vector<double> out;
  for (int k = 1; k <= ne; ++k) {
    // Content of W_{d_k} not shared with the k-1 weaker users' files.
    double fresh = 0.0;
    for (int l = 0; l <= n - k; ++l) fresh += binomial_d(n - k, l) * lib.level_rate(l + 1);
    out.push_back(std::max(fresh - cache, 0.0));
  }
  return out;
}

double lower_bound_power(const CorrelatedLibrary& lib, const ChannelConfig& ch, double cache) {
  std::vector<double> rates = rho_tilde(lib, ch.n_users(), cache);
  rates.resize(static_cast<std::size_t>(ch.n_users()), 0.0);
  return min_superposition_power(rates, ch).total;
}

}  // namespace cachebc
