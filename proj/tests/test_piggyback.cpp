#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "cachebc/bounds.hpp"
#include "cachebc/piggyback.hpp"

using namespace cachebc;

namespace {

std::vector<std::string> column_labels(const LevelMessage& m) {
  std::vector<std::string> out;
  for (const auto& c : m.column) {
    out.push_back((c.part == ColumnPart::UPart ? "U" : "") + SubfileId(c.subfile).to_string());
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::string> sorted(std::vector<std::string> v) {
  std::sort(v.begin(), v.end());
  return v;
}

std::vector<SubsetMask> sorted_masks(std::vector<SubsetMask> v) {
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace

TEST_CASE("applicability") {
  const auto fig = alpha_to_rates(AlphaProfile({0.0625, 0.25, 0.375, 0.25, 0.0625}), 1.0);
  CHECK(piggyback_applicable(fig, 5, 0.0));
  CHECK(piggyback_applicable(fig, 5, 0.0625));
  CHECK_FALSE(piggyback_applicable(fig, 5, 0.07));
  const CorrelatedLibrary lib({0.01, 0.2, 0.3});
  CHECK(piggyback_applicable(lib, 1, 0.15));   // only L_2 and L_3 are split
  CHECK_FALSE(piggyback_applicable(lib, 2, 0.05));
  CHECK(first_split_level(3, 1) == 3);
  CHECK(first_split_level(3, 5) == 1);
  CHECK_THROWS(piggyback_power(lib, ChannelConfig({1, 2}), 0.05));
}

TEST_CASE("coded placement") {
  const CorrelatedLibrary lib({0.4, 0.3, 0.1});
  const auto z = coded_place(lib, 3, 0.1);
  REQUIRE(z.size() == 3);
  CHECK(z[0].level == 3);
  CHECK(z[0].c_parts == std::vector<SubsetMask>{0b111});
  CHECK(sorted_masks(z[1].c_parts) == std::vector<SubsetMask>{0b011, 0b101, 0b110});
  CHECK(sorted_masks(z[2].c_parts) == std::vector<SubsetMask>{0b001, 0b010, 0b100});

  const auto two = coded_place(CorrelatedLibrary({0.5, 0.5}), 2, 0.25);
  CHECK(two[0].c_parts == std::vector<SubsetMask>{0b11});
  CHECK(sorted_masks(two[1].c_parts) == std::vector<SubsetMask>{0b01, 0b10});

  for (const auto& c : coded_place(lib, 3, 0.0)) CHECK(c.c_parts.empty());

  const auto wide = coded_place(CorrelatedLibrary({0.4, 0.3}), 4, 0.1);
  CHECK(wide[2].c_parts.empty());
  CHECK(wide[3].c_parts.empty());
  CHECK_THROWS(coded_place(lib, 3, 0.2));
}

TEST_CASE("three-user level messages") {
  const double r1 = 0.4, r2 = 0.3, r3 = 0.1;
  const CorrelatedLibrary lib({r1, r2, r3});
  const auto levels = build_level_messages(lib, DemandVector({0, 1, 2}, 3), r3);
  REQUIRE(levels.size() == 3);

  // The designated L_3 subfile is fully cached at M = R_3, so its U-part has zero rate.
  CHECK(column_labels(levels[0]) == sorted({"{1}", "{1,2}", "{1,3}", "U{1,2,3}"}));
  CHECK(levels[0].row == std::vector<SubsetMask>{0b111});
  CHECK(column_labels(levels[1]) == sorted({"U{2,3}", "{2}"}));
  CHECK(sorted_masks(levels[1].row) == std::vector<SubsetMask>{0b011, 0b101, 0b110});
  CHECK(column_labels(levels[2]) == sorted({"U{3}"}));
  CHECK(sorted_masks(levels[2].row) == std::vector<SubsetMask>{0b001, 0b010, 0b100});

  CHECK(levels[0].column_rate == doctest::Approx(r1 + 2 * r2));
  CHECK(levels[1].column_rate == doctest::Approx(r1 + r2 - r3));
  CHECK(levels[2].column_rate == doctest::Approx(r1 - r3));
  for (const auto& l : levels) {
    CHECK(l.has_row());
    CHECK(l.row_rate == doctest::Approx(r3));
  }
}

TEST_CASE("a repeated weak demand leaves its level without a row") {
  const CorrelatedLibrary lib({0.4, 0.3, 0.1});
  const auto levels = build_level_messages(lib, DemandVector({0, 0, 1}, 3), 0.05);
  REQUIRE(levels.size() == 2);
  CHECK(levels[0].leader == 0);
  CHECK(levels[1].leader == 2);
  CHECK_FALSE(levels[1].has_row());
  CHECK(levels[1].row.empty());
  CHECK(levels[1].row_rate == 0.0);
  CHECK(column_labels(levels[1]) == sorted({"{2}", "{2,3}"}));
  CHECK(levels[1].column_rate == doctest::Approx(0.4 + 0.3));
}

TEST_CASE("one distinct demand gives a single level") {
  const CorrelatedLibrary lib({0.4, 0.3, 0.1});
  const auto levels = build_level_messages(lib, DemandVector({2, 2, 2}, 3), 0.05);
  REQUIRE(levels.size() == 1);
  CHECK(levels[0].has_row());
  CHECK(levels[0].row_rate == doctest::Approx(0.05));
  CHECK(levels[0].column_rate == doctest::Approx(file_rate(lib) - 0.05));
}

TEST_CASE("two-user recursion example") {
  const CorrelatedLibrary lib({0.5, 0.5});
  const ChannelConfig ch({1, 2});
  const auto res = piggyback_power_levels(lib, ch, 0.25);
  const double p2 = (std::sqrt(2.0) - 1) / 2;
  CHECK(res.per_level[1] == doctest::Approx(p2));
  CHECK(res.per_level[0] == doctest::Approx((std::pow(2.0, 1.5) - 1) * (1 + p2)));
  CHECK(res.total == doctest::Approx(2.4142).epsilon(1e-4));
  CHECK(piggyback_power_constructive(lib, ch, 0.25) == doctest::Approx(res.total).epsilon(1e-12));

  const auto levels = build_level_messages(lib, DemandVector({0, 1}, 2), 0.25);
  CHECK(level_power_conditions(levels, ch).total == doctest::Approx(res.total).epsilon(1e-12));
  CHECK(level_power_conditions(std::vector<LevelMessage>{}, ch).total == 0.0);
}

TEST_CASE("closed form matches the construction and the lower bound") {
  const std::vector<std::vector<double>> libs{{0.2, 0.1, 0.1}, {0.0625, 0.0625, 0.0625, 0.0625}, {0.5, 0.3}, {1.0}};
  for (const auto& rates : libs) {
    const CorrelatedLibrary lib(rates);
    const int n = lib.n_files();
    for (int k = 1; k <= 5; ++k) {
      for (double b : {0.1, 0.3}) {
        const auto ch = ChannelConfig::from_inverse_profile(k, 2.0, b / k);
        double top = 1e9;
        for (int l = std::max(n - k, 1); l <= n; ++l) top = std::min(top, lib.level_rate(l));
        double prev = 1e300;
        for (int i = 0; i <= 8; ++i) {
          const double m = top * i / 8.0;
          const double pb = piggyback_power(lib, ch, m);
          CHECK(pb == doctest::Approx(piggyback_power_constructive(lib, ch, m)).epsilon(1e-12));
          const double lb = lower_bound_power(lib, ch, m);
          CHECK(pb >= lb - 1e-9);
          if (meets_lower_bound(lib, ch, m)) CHECK(std::fabs(pb - lb) <= 1e-9);
          if (i == 0) {
            CHECK(pb == lb);
            CHECK(meets_lower_bound(lib, ch, m));
          }
          CHECK(pb <= prev + 1e-9);
          prev = pb;
        }
      }
    }
  }
  CHECK(piggyback_power(CorrelatedLibrary({1.0}), ChannelConfig({1.0}), 1.0) == 0.0);
}

TEST_CASE("fig5 gains stop meeting the lower bound near the top of the range") {
  const auto lib = alpha_to_rates(AlphaProfile({0.0625, 0.25, 0.375, 0.25, 0.0625}), 1.0);
  const auto fig5 = ChannelConfig::from_inverse_profile(5, 2.0, 0.2);
  CHECK(meets_lower_bound(lib, fig5, 0.01));
  CHECK_FALSE(meets_lower_bound(lib, fig5, 0.0625));
  CHECK(piggyback_power(lib, fig5, 0.0625) > lower_bound_power(lib, fig5, 0.0625) + 1e-6);
}
