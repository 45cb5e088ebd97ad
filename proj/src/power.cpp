#include "cachebc/power.hpp"

#include <cmath>
#include <stdexcept>

namespace cachebc {

double gaussian_capacity(double snr) { return 0.5 * std::log2(1.0 + snr); }

PowerResult min_superposition_power(std::span<const double> rates, const ChannelConfig& ch) {
  const int k_users = ch.n_users();
  if (static_cast<int>(rates.size()) != k_users) {
    throw std::invalid_argument("min_superposition_power: rate vector length differs from user count");
  }
  PowerResult out;
  out.per_level.assign(rates.size(), 0.0);
  double above = 0.0;  // power of the layers stronger than k
  for (int k = k_users - 1; k >= 0; --k) {
    const double rho = rates[static_cast<std::size_t>(k)];
    if (rho < 0.0) throw std::invalid_argument("min_superposition_power: negative rate");
    const double p = std::expm1(2.0 * rho * std::log(2.0)) * (1.0 / ch.gain_sq(k) + above);
    out.per_level[static_cast<std::size_t>(k)] = p;
    above += p;
  }
  out.total = above;
  return out;
}

bool rate_feasible(std::span<const double> rates, std::span<const double> per_level_power,
                   const ChannelConfig& ch, double slack) {
  const int k_users = ch.n_users();
  if (static_cast<int>(rates.size()) != k_users || static_cast<int>(per_level_power.size()) != k_users) {
    throw std::invalid_argument("rate_feasible: length mismatch");
  }
  double above = 0.0;
  for (int k = k_users - 1; k >= 0; --k) {
    const double h2 = ch.gain_sq(k);
    const double p = per_level_power[static_cast<std::size_t>(k)];
    if (p < 0.0) return false;
    const double cap = gaussian_capacity(h2 * p / (1.0 + h2 * above));
    if (rates[static_cast<std::size_t>(k)] > cap + slack) return false;
    above += p;
  }
  return true;
}

}  // namespace cachebc
