#include "cachebc/combinatorics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cachebc {

std::int64_t binomial(int n, int k) {
  if (n < 0 || k < 0 || k > n) return 0;
  if (k > n - k) k = n - k;
  std::int64_t result = 1;
  for (int i = 1; i <= k; ++i) {
    result = result * (n - k + i) / i;
  }
  return result;
}

double binomial_d(int n, int k) { return static_cast<double>(binomial(n, k)); }

std::vector<SubsetMask> subsets_of_size(SubsetMask universe, int k) {
  std::vector<SubsetMask> out;
  if (k < 0 || k > popcount(universe)) return out;
  // Walk all submasks of `universe`; sizes are small enough for this to be cheap.
  std::vector<int> bits;
  for (int b = 0; b < 32; ++b) {
    if (universe & (SubsetMask{1} << b)) bits.push_back(b);
  }
  const int n = static_cast<int>(bits.size());
  for (std::uint64_t local = 0; local < (std::uint64_t{1} << n); ++local) {
    if (std::popcount(local) != k) continue;
    SubsetMask m = 0;
    for (int i = 0; i < n; ++i) {
      if (local & (std::uint64_t{1} << i)) m |= SubsetMask{1} << bits[i];
    }
    out.push_back(m);
  }
  std::sort(out.begin(), out.end());
  return out;
}

Rational rationalize(double x, std::int64_t max_den) {
  if (!std::isfinite(x)) throw std::invalid_argument("rationalize: non-finite value");
  const bool negative = x < 0;
  double v = std::fabs(x);
  // Convergents h/k of the continued fraction expansion.
  std::int64_t h_prev = 1, h = static_cast<std::int64_t>(std::floor(v));
  std::int64_t k_prev = 0, k = 1;
  double frac = v - std::floor(v);
  while (frac > 1e-15) {
    const double inv = 1.0 / frac;
    const auto a = static_cast<std::int64_t>(std::floor(inv));
    if (a > max_den) break;
    const std::int64_t k_next = a * k + k_prev;
    if (k_next > max_den) break;
    const std::int64_t h_next = a * h + h_prev;
    h_prev = h;
    h = h_next;
    k_prev = k;
    k = k_next;
    if (std::fabs(static_cast<double>(h) / static_cast<double>(k) - v) == 0.0) break;
    frac = inv - std::floor(inv);
  }
  Rational r(h, k);
  return negative ? -r : r;
}

}  // namespace cachebc
