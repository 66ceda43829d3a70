#pragma once

#include <optional>
#include <string>
#include <vector>

#include "colflow/rational.hpp"

namespace colflow {

/// Collateral object with an integral value (after decimal scaling).
struct Security {
  std::string id;
  BigInt value;
};

/// Loan exposure needing coverage; strictly positive.
struct Account {
  std::string id;
  BigInt exposure;
};

/// Eligibility of a security for an account, optionally with a claim limit
/// and a priority class (0 = no priority).
struct EligibilityEdge {
  int security = -1;
  int account = -1;
  std::optional<Rational> cap;
  int priority = 0;
};

/// The validated bipartite collateral graph. Immutable after construction;
/// all node references in edges are valid indices.
class Instance {
 public:
  Instance(std::vector<Security> securities, std::vector<Account> accounts,
           std::vector<EligibilityEdge> edges, BigInt scale);

  const std::vector<Security>& securities() const { return securities_; }
  const std::vector<Account>& accounts() const { return accounts_; }
  const std::vector<EligibilityEdge>& edges() const { return edges_; }

  int security_count() const { return static_cast<int>(securities_.size()); }
  int account_count() const { return static_cast<int>(accounts_.size()); }
  int edge_count() const { return static_cast<int>(edges_.size()); }

  /// n = |S| + |A|.
  int node_count() const { return security_count() + account_count(); }

  /// M = max over all values and exposures.
  const BigInt& max_magnitude() const { return max_magnitude_; }

  /// Decimal-input scaling factor applied during validation (1 for integral input).
  const BigInt& scale() const { return scale_; }

  bool has_priorities() const { return num_priorities_ > 0; }
  /// Number of priority classes P; 0 when edges carry no priorities.
  int num_priorities() const { return num_priorities_; }
  bool has_caps() const { return has_caps_; }

  int security_index(const std::string& id) const;  // -1 if unknown
  int account_index(const std::string& id) const;
  int edge_index(int security, int account) const;

  BigInt total_exposure() const;
  BigInt total_value() const;

 private:
  std::vector<Security> securities_;
  std::vector<Account> accounts_;
  std::vector<EligibilityEdge> edges_;
  BigInt scale_;
  BigInt max_magnitude_;
  int num_priorities_ = 0;
  bool has_caps_ = false;
};

/// Pre-validation instance description, as parsed from an input file or
/// assembled in code. Quantities may be decimal (non-integral) rationals.
struct RawInstance {
  struct RawSecurity {
    std::string id;
    Rational value;
  };
  struct RawAccount {
    std::string id;
    Rational exposure;
  };
  struct RawEdge {
    std::string security;
    std::string account;
    std::optional<Rational> cap;
    std::optional<int> priority;
  };

  std::vector<RawSecurity> securities;
  std::vector<RawAccount> accounts;
  std::vector<RawEdge> edges;
};

struct ValidatedInstance {
  Instance instance;
  std::vector<std::string> warnings;
};

/// Normalizes a raw description: scales decimals to integers by a shared
/// power of ten, drops securities with no incident edges (warning), keeps
/// edge-less accounts (they are legitimately fully unsecured), renumbers
/// sparse priority classes densely (warning).
///
/// Throws Error with NonPositiveExposure, NegativeValue, DuplicateEdge,
/// DanglingEndpoint, PartialPriorities or InvalidInput.
ValidatedInstance validate_instance(const RawInstance& raw);

}  // namespace colflow
