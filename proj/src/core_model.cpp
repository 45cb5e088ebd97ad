#include "cachebc/core_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace cachebc {

namespace {

std::string join_one_based(std::span<const int> items, char open, char close) {
  std::string s(1, open);
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(items[i] + 1);
  }
  s += close;
  return s;
}

}  // namespace

SubfileId::SubfileId(SubsetMask members) : members_(members) {
  if (members == 0) throw std::invalid_argument("SubfileId: member set must be nonempty");
}

std::string SubfileId::to_string() const {
  std::vector<int> files;
  for (int i = 0; i < 32; ++i) {
    if (contains(i)) files.push_back(i);
  }
  return join_one_based(files, '{', '}');
}

CorrelatedLibrary::CorrelatedLibrary(std::vector<double> level_rates) : rates_(std::move(level_rates)) {
  if (rates_.empty()) throw std::invalid_argument("CorrelatedLibrary: need at least one file");
  for (double r : rates_) {
    if (!(r >= 0.0) || !std::isfinite(r)) {
      throw std::invalid_argument("CorrelatedLibrary: level rates must be finite and non-negative");
    }
  }
}

std::vector<SubfileId> CorrelatedLibrary::sublibrary(int level) const {
  if (n_files() > kMaxExhaustive) throw std::length_error("sublibrary: N exceeds exhaustive cap");
  std::vector<SubfileId> out;
  for (SubsetMask m : subsets_of_size(full_mask(n_files()), level)) out.emplace_back(m);
  return out;
}

std::vector<SubfileId> CorrelatedLibrary::subfiles() const {
  if (n_files() > kMaxExhaustive) throw std::length_error("subfiles: N exceeds exhaustive cap");
  std::vector<SubfileId> out;
  for (SubsetMask m = 1; m <= full_mask(n_files()); ++m) out.emplace_back(m);
  return out;
}

ChannelConfig::ChannelConfig(std::vector<double> gains_sq) : gains_sq_(std::move(gains_sq)) {
  if (gains_sq_.empty()) throw std::invalid_argument("ChannelConfig: need at least one user");
  for (double g : gains_sq_) {
    if (!(g > 0.0) || !std::isfinite(g)) {
      throw std::invalid_argument("ChannelConfig: squared gains must be positive");
    }
  }
  if (!std::is_sorted(gains_sq_.begin(), gains_sq_.end())) {
    throw std::invalid_argument("ChannelConfig: gains must be ordered weakest to strongest");
  }
}

ChannelConfig ChannelConfig::from_inverse_profile(int n_users, double a, double b) {
  std::vector<double> g;
  for (int k = 0; k < n_users; ++k) {
    const double inv = a - b * k;
    if (!(inv > 0.0)) throw std::invalid_argument("ChannelConfig: inverse gain profile not positive");
    g.push_back(1.0 / inv);
  }
  return ChannelConfig(std::move(g));
}

DemandVector::DemandVector(std::vector<int> demands, int n_files) : demands_(std::move(demands)) {
  if (demands_.empty()) throw std::invalid_argument("DemandVector: need at least one user");
  for (int d : demands_) {
    if (d < 0 || d >= n_files) throw std::out_of_range("DemandVector: demand outside file range");
  }
}

SubsetMask DemandVector::requested_files() const {
  SubsetMask m = 0;
  for (int d : demands_) m |= SubsetMask{1} << d;
  return m;
}

std::string DemandVector::to_string() const { return join_one_based(demands_, '(', ')'); }

AlphaProfile::AlphaProfile(std::vector<double> fractions) : fractions_(std::move(fractions)) {
  if (fractions_.empty()) throw std::invalid_argument("AlphaProfile: empty");
  double sum = 0.0;
  for (double a : fractions_) {
    if (!(a >= 0.0) || a > 1.0) throw std::invalid_argument("AlphaProfile: fractions must lie in [0,1]");
    sum += a;
  }
  if (std::fabs(sum - 1.0) > 1e-12) throw std::invalid_argument("AlphaProfile: fractions must sum to 1");
}

double file_rate(const CorrelatedLibrary& lib) {
  const int n = lib.n_files();
  double r = 0.0;
  for (int l = 1; l <= n; ++l) r += binomial_d(n - 1, l - 1) * lib.level_rate(l);
  return r;
}

CorrelatedLibrary alpha_to_rates(const AlphaProfile& alpha, double total_rate) {
  if (!(total_rate >= 0.0)) throw std::invalid_argument("alpha_to_rates: negative total rate");
  const int n = alpha.n_files();
  std::vector<double> rates;
  for (int l = 1; l <= n; ++l) rates.push_back(alpha[l] * total_rate / binomial_d(n - 1, l - 1));
  return CorrelatedLibrary(std::move(rates));
}

AlphaProfile rates_to_alpha(const CorrelatedLibrary& lib) {
  const int n = lib.n_files();
  const double total = file_rate(lib);
  if (!(total > 0.0)) throw std::invalid_argument("rates_to_alpha: file rate is zero");
  std::vector<double> a;
  for (int l = 1; l <= n; ++l) a.push_back(binomial_d(n - 1, l - 1) * lib.level_rate(l) / total);
  // Renormalize so rounding never trips the AlphaProfile sum check.
  const double s = std::accumulate(a.begin(), a.end(), 0.0);
  for (double& x : a) x /= s;
  return AlphaProfile(std::move(a));
}

int distinct_demand_count(const DemandVector& d) { return popcount(d.requested_files()); }

std::uint64_t worst_case_demand_count(int n_files, int n_users) {
  const int ne = std::min(n_files, n_users);
  std::uint64_t count = static_cast<std::uint64_t>(binomial(n_files, ne));
  for (int i = 2; i <= ne; ++i) count *= static_cast<std::uint64_t>(i);
  for (int i = 0; i < n_users - ne; ++i) count *= static_cast<std::uint64_t>(n_files);
  return count;
}

void for_each_worst_case_demand(int n_files, int n_users,
                                const std::function<void(const DemandVector&)>& visit) {
  if (n_files < 1 || n_users < 1) throw std::invalid_argument("worst-case demands: N, K must be >= 1");
  if (n_files > kMaxExhaustive || n_users > kMaxExhaustive) {
    throw std::length_error("worst-case demands: N or K exceeds exhaustive cap");
  }
  const int ne = std::min(n_files, n_users);
  std::vector<int> d(static_cast<std::size_t>(n_users), 0);
  SubsetMask used = 0;
  // Prefix: ordered distinct files; tail: anything.
  std::function<void(int)> fill = [&](int pos) {
    if (pos == n_users) {
      visit(DemandVector(d, n_files));
      return;
    }
    for (int f = 0; f < n_files; ++f) {
      if (pos < ne) {
        if (used & (SubsetMask{1} << f)) continue;
        used |= SubsetMask{1} << f;
        d[static_cast<std::size_t>(pos)] = f;
        fill(pos + 1);
        used &= ~(SubsetMask{1} << f);
      } else {
        d[static_cast<std::size_t>(pos)] = f;
        fill(pos + 1);
      }
    }
  };
  fill(0);
}

std::vector<DemandVector> worst_case_demand_set(int n_files, int n_users) {
  std::vector<DemandVector> out;
  for_each_worst_case_demand(n_files, n_users, [&](const DemandVector& d) { out.push_back(d); });
  return out;
}

void for_each_demand(int n_files, int n_users, const std::function<void(const DemandVector&)>& visit) {
  if (n_files < 1 || n_users < 1) throw std::invalid_argument("demands: N, K must be >= 1");
  if (n_files > kMaxExhaustive || n_users > kMaxExhaustive) {
    throw std::length_error("demands: N or K exceeds exhaustive cap");
  }
  std::vector<int> d(static_cast<std::size_t>(n_users), 0);
  while (true) {
    visit(DemandVector(d, n_files));
    int pos = n_users - 1;
    while (pos >= 0 && d[static_cast<std::size_t>(pos)] == n_files - 1) {
      d[static_cast<std::size_t>(pos)] = 0;
      --pos;
    }
    if (pos < 0) return;
    ++d[static_cast<std::size_t>(pos)];
  }
}

DemandVector representative_worst_case_demand(int n_files, int n_users) {
  const int ne = std::min(n_files, n_users);
  std::vector<int> d;
  for (int k = 0; k < n_users; ++k) d.push_back(k < ne ? k : 0);
  return DemandVector(std::move(d), n_files);
}

CorrelatedLibrary correlation_ignorant_projection(const CorrelatedLibrary& lib) {
  std::vector<double> rates(static_cast<std::size_t>(lib.n_files()), 0.0);
  rates[0] = file_rate(lib);
  return CorrelatedLibrary(std::move(rates));
}

}  // namespace cachebc
