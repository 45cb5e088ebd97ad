#pragma once

// Token-level decodability checker. Schemes are translated into a token
// space, per-user cache equations and broadcast XOR messages; a user decodes
// its file iff every token of that file lies in the GF(2) span of what it
// knows. Nothing here looks at rate formulas.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "cachebc/core_model.hpp"
#include "cachebc/superposition.hpp"

namespace cachebc {

class TokenSpace {
 public:
  /// Adds a token and returns its index.
  int add(std::string label, Rational size);
  int size() const { return static_cast<int>(sizes_.size()); }
  const Rational& token_size(int index) const { return sizes_.at(static_cast<std::size_t>(index)); }
  const std::string& label(int index) const { return labels_.at(static_cast<std::size_t>(index)); }

 private:
  std::vector<Rational> sizes_;
  std::vector<std::string> labels_;
};

/// XOR of the listed tokens. A single entry means the token itself.
using Equation = std::vector<int>;

/// Thrown when an equation mixes tokens of different sizes.
struct TokenSizeMismatch : std::logic_error {
  using std::logic_error::logic_error;
};

/// GF(2) elimination over `known`; returns the first target outside the span,
/// or nullopt when every target is decodable.
std::optional<int> first_undecodable(const TokenSpace& tokens, std::span<const Equation> known,
                                     std::span<const int> targets);
bool can_decode(const TokenSpace& tokens, std::span<const Equation> known, std::span<const int> targets);

struct BroadcastMessage {
  Equation eq;
  int layer = 0;            ///< superposition layer carrying it
  SubsetMask receivers = 0; ///< users able to decode it
};

/// Placement plus delivery for one demand, in token form.
struct DeliveryInstance {
  TokenSpace tokens;
  std::vector<std::vector<Equation>> cache;  ///< per user
  std::vector<BroadcastMessage> messages;
  std::vector<std::vector<int>> targets;     ///< per user: all tokens of W_{d_k}

  std::vector<Equation> knowledge_of(int user) const;
};

/// Mutation hooks used to check that the oracle catches broken schemes.
struct Fault {
  enum class Kind { None, DropCache, DropMessage } kind = Kind::None;
  int user = 0;   ///< DropCache: whose cache is wiped; DropMessage: target layer
  int index = 0;  ///< DropMessage: which message of that layer (0-based)

  static Fault drop_cache(int user) { return {Kind::DropCache, user, 0}; }
  static Fault drop_message(int layer, int index) { return {Kind::DropMessage, layer, index}; }
};

void apply_fault(DeliveryInstance& inst, const Fault& fault);

/// Superposition scheme: user k decodes the messages of layers 1..k.
DeliveryInstance superposition_instance(const CorrelatedLibrary& lib, const PlacementSpec& spec,
                                        const DemandVector& d);
/// Piggyback scheme: level-i columns reach users k_i..K, rows reach k_i+1..K.
DeliveryInstance piggyback_instance(const CorrelatedLibrary& lib, int n_users, double cache, const DemandVector& d);

struct Counterexample {
  std::string scheme;
  int n_files = 0;
  int n_users = 0;
  std::string parameters;  ///< t vector or M
  std::string demand;
  int user = 0;            ///< 0-based
  std::string missing_token;
};

struct VerificationReport {
  bool passed = true;
  std::size_t instances = 0;  ///< (parameter, demand) pairs
  std::size_t decode_checks = 0;
  std::optional<Counterexample> counterexample;

  void merge(const VerificationReport& other);
  std::string summary() const;
};

/// Demands visited by verification: all of [N]^K when there are at most
/// `exhaustive_limit`, otherwise a strided sample that includes D_d's representative.
void for_each_verification_demand(int n_files, int n_users, std::size_t exhaustive_limit,
                                  const std::function<void(const DemandVector&)>& visit);

VerificationReport verify_superposition(const CorrelatedLibrary& lib, int n_users,
                                        std::span<const std::vector<Rational>> t_grid, const Fault& fault = {},
                                        std::size_t exhaustive_limit = 4096);
VerificationReport verify_piggyback(const CorrelatedLibrary& lib, int n_users, std::span<const double> cache_grid,
                                    const Fault& fault = {}, std::size_t exhaustive_limit = 4096);

/// The integer grid t_l = (j + l) mod (K+1), j = 0..K (every level meets every
/// integer), plus one fractional point t_l = ((l-1) mod K) + 1/3.
std::vector<std::vector<Rational>> verification_t_grid(int n_files, int n_users);
/// Five evenly spaced cache sizes on [0, M_max] for the piggyback scheme.
std::vector<double> verification_cache_grid(const CorrelatedLibrary& lib, int n_users);

}  // namespace cachebc
