#pragma once

#include <bit>
#include <cstdint>
#include <functional>
#include <vector>

#include <boost/rational.hpp>

namespace cachebc {

/// Exact rational used for part-size bookkeeping.
using Rational = boost::rational<std::int64_t>;

/// Subsets of files (or users) are bitmasks; bit i stands for element i+1.
using SubsetMask = std::uint32_t;

/// Exhaustive enumerations (subfiles, demand sweeps) are capped here.
inline constexpr int kMaxExhaustive = 16;

/// Binomial coefficient with C(n, k) = 0 whenever k < 0 or k > n (including n < 0).
std::int64_t binomial(int n, int k);
double binomial_d(int n, int k);

inline int popcount(SubsetMask m) { return std::popcount(m); }

inline SubsetMask full_mask(int n) { return n >= 32 ? ~SubsetMask{0} : (SubsetMask{1} << n) - 1; }

inline bool is_subset(SubsetMask inner, SubsetMask outer) { return (inner & ~outer) == 0; }

/// All size-`k` subsets of the `n`-element ground set described by `universe`,
/// in ascending bitmask order.
std::vector<SubsetMask> subsets_of_size(SubsetMask universe, int k);

/// Closest rational with denominator at most `max_den` (continued fractions).
Rational rationalize(double x, std::int64_t max_den = std::int64_t{1} << 20);

inline double to_double(const Rational& r) {
  return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

/// Equality against integer literals is avoided on purpose: in C++20 boost's
/// mixed rational/int operator== rewrites into itself and never returns.
inline bool is_zero(const Rational& r) { return r.numerator() == 0; }

/// floor for non-negative rationals.
inline std::int64_t floor_of(const Rational& r) { return r.numerator() / r.denominator(); }

}  // namespace cachebc
