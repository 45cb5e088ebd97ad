#include <doctest.h>

#include <cmath>

#include "cachebc/bounds.hpp"
#include "cachebc/optimizer.hpp"
#include "cachebc/superposition.hpp"

using namespace cachebc;

TEST_CASE("rho_tilde examples") {
  const auto two = rho_tilde(CorrelatedLibrary({0.5, 0.5}), 2, 0.0);
  REQUIRE(two.size() == 2);
  CHECK(two[0] == doctest::Approx(1.0));
  CHECK(two[1] == doctest::Approx(0.5));

  const double r = 0.3;
  const auto three = rho_tilde(CorrelatedLibrary({r, r, r}), 3, 0.0);
  CHECK(three[0] == doctest::Approx(4 * r));
  CHECK(three[1] == doctest::Approx(2 * r));
  CHECK(three[2] == doctest::Approx(r));

  const CorrelatedLibrary lib({0.2, 0.1, 0.05});
  for (double m : {file_rate(lib), file_rate(lib) + 1.0}) {
    for (double x : rho_tilde(lib, 3, m)) CHECK(x == 0.0);
  }
  CHECK(rho_tilde(lib, 5, 0.0).size() == 3);
  CHECK(rho_tilde(lib, 2, 0.0).size() == 2);
}

TEST_CASE("lower_bound_power examples") {
  CHECK(lower_bound_power(CorrelatedLibrary({0.5, 0.5}), ChannelConfig({1, 1}), 0.0) == doctest::Approx(7.0));
  CHECK(lower_bound_power(CorrelatedLibrary({0.5, 0.5}), ChannelConfig({1, 1}), 1.0) == 0.0);
  const auto common = alpha_to_rates(AlphaProfile({0, 0, 0, 0, 1}), 1.0);
  CHECK(lower_bound_power(common, ChannelConfig::from_inverse_profile(5, 2.0, 0.2), 0.5) ==
        doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("rho_tilde is non-increasing in k") {
  const CorrelatedLibrary lib({0.11, 0.05, 0.09, 0.02, 0.3});
  for (double m : {0.0, 0.1, 0.3}) {
    const auto rho = rho_tilde(lib, 5, m);
    for (std::size_t k = 1; k < rho.size(); ++k) CHECK(rho[k] <= rho[k - 1]);
  }
}

TEST_CASE("lower bound is non-increasing and convex in M") {
  const auto lib = alpha_to_rates(AlphaProfile({0.1, 0.3, 0.2, 0.4}), 1.0);
  const auto ch = ChannelConfig::from_inverse_profile(4, 2.0, 0.3);
  std::vector<double> p;
  for (int i = 0; i <= 100; ++i) p.push_back(lower_bound_power(lib, ch, 1.2 * i / 100.0));
  for (std::size_t i = 1; i < p.size(); ++i) CHECK(p[i] <= p[i - 1] + 1e-12);
  for (std::size_t i = 1; i + 1 < p.size(); ++i) CHECK(p[i + 1] - 2 * p[i] + p[i - 1] >= -1e-9);
}

TEST_CASE("private-only libraries reduce to the independent-file bound") {
  const CorrelatedLibrary lib({0.8, 0.0, 0.0});
  for (double m : {0.0, 0.3, 0.9}) {
    for (double x : rho_tilde(lib, 4, m)) CHECK(x == doctest::Approx(std::max(0.8 - m, 0.0)));
  }
}

TEST_CASE("lower bound never exceeds the superposition scheme") {
  const std::vector<std::vector<double>> pis{{1, 0, 0, 0}, {0.5, 0.5, 0, 0}, {0.25, 0.25, 0.25, 0.25}, {0, 0, 0.4, 0.6}};
  for (int n = 1; n <= 4; ++n) {
    for (int k = 1; k <= 4; ++k) {
      std::vector<double> rates;
      for (int l = 1; l <= n; ++l) rates.push_back(0.1 + 0.05 * ((l * 7) % 5));
      const CorrelatedLibrary lib(rates);
      const auto ch = ChannelConfig::from_inverse_profile(k, 1.5, 0.2);
      for (double m : {0.0, 0.05, 0.2, 0.5, 1.0}) {
        const double lb = lower_bound_power(lib, ch, m);
        for (const auto& raw : pis) {
          CacheAllocation pi{std::vector<double>(raw.begin(), raw.begin() + n)};
          double s = 0.0;
          for (double x : pi.pi) s += x;
          if (s <= 0.0) pi.pi[0] = 1.0;
          else for (double& x : pi.pi) x /= s;
          CHECK(lb <= upper_bound_power(lib, ch, m, pi) + 1e-9);
          CHECK(lb <= achievable_power_constructive(lib, ch, m, pi) + 1e-9);
        }
        CHECK(lb <= optimize_pi(lib, ch, m).power + 1e-9);
      }
    }
  }
}
