#include "cachebc/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <map>
#include <random>

#include "cachebc/piggyback.hpp"

namespace cachebc {

int TokenSpace::add(std::string label, Rational size) {
  sizes_.push_back(size);
  labels_.push_back(std::move(label));
  return static_cast<int>(sizes_.size()) - 1;
}

namespace {

// Rows over GF(2) as packed 64-bit words, kept in echelon form by pivot column.
class Gf2Basis {
 public:
  explicit Gf2Basis(int columns)
      : words_((static_cast<std::size_t>(columns) + 63) / 64), pivots_(static_cast<std::size_t>(columns)) {}

  void insert(std::vector<std::uint64_t> row) {
    if (int p = reduce(row); p >= 0) pivots_[static_cast<std::size_t>(p)] = std::move(row);
  }

  bool spans(int column) const {
    std::vector<std::uint64_t> row(words_, 0);
    row[static_cast<std::size_t>(column) / 64] |= std::uint64_t{1} << (column % 64);
    return reduce(row) < 0;
  }

  std::vector<std::uint64_t> row_of(const Equation& eq) const {
    std::vector<std::uint64_t> row(words_, 0);
    for (int c : eq) row[static_cast<std::size_t>(c) / 64] ^= std::uint64_t{1} << (c % 64);
    return row;
  }

 private:
  // Returns the leading column left after elimination, or -1 for the zero row.
  int reduce(std::vector<std::uint64_t>& row) const {
    for (std::size_t w = 0; w < words_; ++w) {
      while (row[w] != 0) {
        const int p = static_cast<int>(w * 64) + std::countr_zero(row[w]);
        const auto& pivot = pivots_[static_cast<std::size_t>(p)];
        if (pivot.empty()) return p;
        for (std::size_t j = w; j < words_; ++j) row[j] ^= pivot[j];
      }
    }
    return -1;
  }

  std::size_t words_;
  std::vector<std::vector<std::uint64_t>> pivots_;
};

void check_sizes(const TokenSpace& tokens, const Equation& eq) {
  for (int c : eq) {
    if (c < 0 || c >= tokens.size()) throw std::out_of_range("oracle: token index out of range");
    if (tokens.token_size(c) != tokens.token_size(eq.front())) {
      throw TokenSizeMismatch("oracle: XOR of unequal tokens " + tokens.label(eq.front()) + " and " +
                              tokens.label(c));
    }
  }
}

std::string t_label(std::span<const Rational> t) {
  std::string s = "t=(";
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(t[i].numerator());
    if (t[i].denominator() != 1) s += '/' + std::to_string(t[i].denominator());
  }
  return s + ')';
}

// Runs every user of one instance; fills the report's counterexample on failure.
bool check_instance(const DeliveryInstance& inst, VerificationReport& report, Counterexample context) {
  ++report.instances;
  for (int k = 0; k < static_cast<int>(inst.targets.size()); ++k) {
    ++report.decode_checks;
    const auto known = inst.knowledge_of(k);
    if (auto missing = first_undecodable(inst.tokens, known, inst.targets[static_cast<std::size_t>(k)])) {
      report.passed = false;
      context.user = k;
      context.missing_token = inst.tokens.label(*missing);
      report.counterexample = std::move(context);
      return false;
    }
  }
  return true;
}

}  // namespace

std::optional<int> first_undecodable(const TokenSpace& tokens, std::span<const Equation> known,
                                     std::span<const int> targets) {
  Gf2Basis basis(tokens.size());
  for (const Equation& eq : known) {
    if (eq.empty()) continue;
    check_sizes(tokens, eq);
    basis.insert(basis.row_of(eq));
  }
  for (int t : targets) {
    if (!basis.spans(t)) return t;
  }
  return std::nullopt;
}

bool can_decode(const TokenSpace& tokens, std::span<const Equation> known, std::span<const int> targets) {
  return !first_undecodable(tokens, known, targets).has_value();
}

std::vector<Equation> DeliveryInstance::knowledge_of(int user) const {
  std::vector<Equation> out = cache.at(static_cast<std::size_t>(user));
  for (const auto& m : messages) {
    if (m.receivers & (SubsetMask{1} << user)) out.push_back(m.eq);
  }
  return out;
}

void apply_fault(DeliveryInstance& inst, const Fault& fault) {
  switch (fault.kind) {
    case Fault::Kind::None:
      return;
    case Fault::Kind::DropCache:
      if (fault.user >= 0 && fault.user < static_cast<int>(inst.cache.size())) {
        inst.cache[static_cast<std::size_t>(fault.user)].clear();
      }
      return;
    case Fault::Kind::DropMessage: {
      int seen = 0;
      for (auto it = inst.messages.begin(); it != inst.messages.end(); ++it) {
        if (it->layer != fault.user) continue;
        if (seen++ == fault.index) {
          inst.messages.erase(it);
          return;
        }
      }
      return;
    }
  }
}

DeliveryInstance superposition_instance(const CorrelatedLibrary& lib, const PlacementSpec& spec,
                                        const DemandVector& d) {
  const int n = lib.n_files();
  const int k_users = spec.n_users;
  DeliveryInstance inst;
  inst.cache.resize(static_cast<std::size_t>(k_users));
  inst.targets.resize(static_cast<std::size_t>(k_users));

  std::map<PartToken, int> index;
  for (SubsetMask s = 1; s <= full_mask(n); ++s) {
    const auto& lv = spec.level(popcount(s));
    if (lv.rate <= 0.0) continue;
    const Rational rate = rationalize(lv.rate);
    for (const PartToken& p : parts_of_subfile(spec, s)) {
      const int id = inst.tokens.add(to_string(p), lv.share_of(p.cls) * rate);
      index.emplace(p, id);
      for (int k = 0; k < k_users; ++k) {
        if (p.holders & (SubsetMask{1} << k)) inst.cache[static_cast<std::size_t>(k)].push_back({id});
        if ((s >> d[k]) & 1u) inst.targets[static_cast<std::size_t>(k)].push_back(id);
      }
    }
  }

  const MessagePlan plan = generate_messages(lib, spec, d);
  for (int k = 0; k < k_users; ++k) {
    for (const XorMessage& m : plan.per_user[static_cast<std::size_t>(k)]) {
      BroadcastMessage b;
      b.layer = k;
      b.receivers = full_mask(k_users) & ~full_mask(k);
      for (const PartToken& p : m.parts) b.eq.push_back(index.at(p));
      inst.messages.push_back(std::move(b));
    }
  }
  return inst;
}

DeliveryInstance piggyback_instance(const CorrelatedLibrary& lib, int n_users, double cache, const DemandVector& d) {
  const int n = lib.n_files();
  DeliveryInstance inst;
  inst.cache.resize(static_cast<std::size_t>(n_users));
  inst.targets.resize(static_cast<std::size_t>(n_users));

  const Rational m = rationalize(cache);
  const int split_from = first_split_level(n, n_users);
  struct SubfileTokens {
    int c = -1;
    int u = -1;
    int whole = -1;
  };
  std::vector<SubfileTokens> tok(static_cast<std::size_t>(full_mask(n)) + 1);
  for (SubsetMask s = 1; s <= full_mask(n); ++s) {
    const int level = popcount(s);
    const Rational rate = rationalize(lib.level_rate(level));
    if (is_zero(rate)) continue;
    auto& st = tok[s];
    const std::string name = "W_" + SubfileId(s).to_string();
    if (m > 0 && level >= split_from) {
      st.c = inst.tokens.add(name + "^C", m);
      if (rate > m) st.u = inst.tokens.add(name + "^U", rate - m);
    } else {
      st.whole = inst.tokens.add(name, rate);
    }
    for (int k = 0; k < n_users; ++k) {
      if (!((s >> d[k]) & 1u)) continue;
      for (int id : {st.c, st.u, st.whole}) {
        if (id >= 0) inst.targets[static_cast<std::size_t>(k)].push_back(id);
      }
    }
  }

  auto xor_of_c_parts = [&](const std::vector<SubsetMask>& parts) {
    Equation eq;
    for (SubsetMask s : parts) {
      if (tok[s].c >= 0) eq.push_back(tok[s].c);
    }
    return eq;
  };

  const auto caches = coded_place(lib, n_users, cache);
  for (int k = 0; k < n_users; ++k) {
    Equation z = xor_of_c_parts(caches[static_cast<std::size_t>(k)].c_parts);
    if (!z.empty()) inst.cache[static_cast<std::size_t>(k)].push_back(std::move(z));
  }

  for (const LevelMessage& lv : build_level_messages(lib, d, cache)) {
    const SubsetMask from_leader = full_mask(n_users) & ~full_mask(lv.leader);
    for (const ColumnItem& item : lv.column) {
      const auto& st = tok[item.subfile];
      std::vector<int> ids{st.u, st.whole};
      if (item.part == ColumnPart::Whole) ids.push_back(st.c);
      for (int id : ids) {
        if (id >= 0) inst.messages.push_back({{id}, lv.index, from_leader});
      }
    }
    Equation row = xor_of_c_parts(lv.row);
    if (!row.empty()) inst.messages.push_back({std::move(row), lv.index, from_leader & ~(SubsetMask{1} << lv.leader)});
  }
  return inst;
}

void VerificationReport::merge(const VerificationReport& other) {
  instances += other.instances;
  decode_checks += other.decode_checks;
  if (!other.passed && passed) {
    passed = false;
    counterexample = other.counterexample;
  }
}

std::string VerificationReport::summary() const {
  std::string s = passed ? "PASS" : "FAIL";
  s += " instances=" + std::to_string(instances) + " decode_checks=" + std::to_string(decode_checks);
  if (counterexample) {
    const auto& c = *counterexample;
    s += "\n  counterexample: scheme=" + c.scheme + " N=" + std::to_string(c.n_files) +
         " K=" + std::to_string(c.n_users) + " " + c.parameters + " d=" + c.demand +
         " user=" + std::to_string(c.user + 1) + " missing=" + c.missing_token;
  }
  return s;
}

void for_each_verification_demand(int n_files, int n_users, std::size_t exhaustive_limit,
                                  const std::function<void(const DemandVector&)>& visit) {
  double total = 1.0;
  for (int k = 0; k < n_users; ++k) total *= n_files;
  if (total <= static_cast<double>(exhaustive_limit)) {
    for_each_demand(n_files, n_users, visit);
    return;
  }
  visit(representative_worst_case_demand(n_files, n_users));
  std::mt19937 gen(20180101u);
  std::vector<int> v(static_cast<std::size_t>(n_users));
  for (std::size_t s = 1; s < exhaustive_limit; ++s) {
    for (int& x : v) x = static_cast<int>(gen() % static_cast<std::uint32_t>(n_files));
    visit(DemandVector(v, n_files));
  }
}

VerificationReport verify_superposition(const CorrelatedLibrary& lib, int n_users,
                                        std::span<const std::vector<Rational>> t_grid, const Fault& fault,
                                        std::size_t exhaustive_limit) {
  VerificationReport report;
  for (const auto& t : t_grid) {
    const PlacementSpec spec = placement_from_t(lib, n_users, t);
    bool ok = true;
    for_each_verification_demand(lib.n_files(), n_users, exhaustive_limit, [&](const DemandVector& d) {
      if (!ok) return;
      DeliveryInstance inst = superposition_instance(lib, spec, d);
      apply_fault(inst, fault);
      ok = check_instance(inst, report, {"superposition", lib.n_files(), n_users, t_label(t), d.to_string(), 0, {}});
    });
    if (!ok) break;
  }
  return report;
}

VerificationReport verify_piggyback(const CorrelatedLibrary& lib, int n_users, std::span<const double> cache_grid,
                                    const Fault& fault, std::size_t exhaustive_limit) {
  VerificationReport report;
  for (double m : cache_grid) {
    char label[48];
    std::snprintf(label, sizeof label, "M=%.6g", m);
    bool ok = true;
    for_each_verification_demand(lib.n_files(), n_users, exhaustive_limit, [&](const DemandVector& d) {
      if (!ok) return;
      DeliveryInstance inst = piggyback_instance(lib, n_users, m, d);
      apply_fault(inst, fault);
      ok = check_instance(inst, report, {"piggyback", lib.n_files(), n_users, label, d.to_string(), 0, {}});
    });
    if (!ok) break;
  }
  return report;
}

std::vector<std::vector<Rational>> verification_t_grid(int n_files, int n_users) {
  std::vector<std::vector<Rational>> grid;
  for (int j = 0; j <= n_users; ++j) {
    std::vector<Rational> t;
    for (int l = 1; l <= n_files; ++l) t.emplace_back((j + l) % (n_users + 1));
    grid.push_back(std::move(t));
  }
  std::vector<Rational> frac;
  for (int l = 1; l <= n_files; ++l) frac.push_back(Rational((l - 1) % n_users) + Rational(1, 3));
  grid.push_back(std::move(frac));
  return grid;
}

std::vector<double> verification_cache_grid(const CorrelatedLibrary& lib, int n_users) {
  const int n = lib.n_files();
  double top = INFINITY;
  for (int l = std::max(n - n_users, 1); l <= n; ++l) top = std::min(top, lib.level_rate(l));
  std::vector<double> grid;
  for (int i = 0; i < 5; ++i) grid.push_back(top * i / 4.0);
  return grid;
}

}  // namespace cachebc
