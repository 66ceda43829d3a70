#include "colflow/instance.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <unordered_map>

#include "colflow/errors.hpp"

namespace colflow {

namespace {

BigInt lcm(const BigInt& a, const BigInt& b) {
  BigInt x = a, y = b;
  while (y != 0) {
    BigInt t = x % y;
    x = std::move(y);
    y = std::move(t);
  }
  return (a / x) * b;
}

}  // namespace

Instance::Instance(std::vector<Security> securities, std::vector<Account> accounts,
                   std::vector<EligibilityEdge> edges, BigInt scale)
    : securities_(std::move(securities)),
      accounts_(std::move(accounts)),
      edges_(std::move(edges)),
      scale_(std::move(scale)) {
  max_magnitude_ = 0;
  for (const auto& s : securities_) max_magnitude_ = std::max(max_magnitude_, s.value);
  for (const auto& a : accounts_) max_magnitude_ = std::max(max_magnitude_, a.exposure);
  for (const auto& e : edges_) {
    num_priorities_ = std::max(num_priorities_, e.priority);
    if (e.cap) has_caps_ = true;
  }
}

int Instance::security_index(const std::string& id) const {
  for (int i = 0; i < security_count(); ++i)
    if (securities_[i].id == id) return i;
  return -1;
}

int Instance::account_index(const std::string& id) const {
  for (int j = 0; j < account_count(); ++j)
    if (accounts_[j].id == id) return j;
  return -1;
}

int Instance::edge_index(int security, int account) const {
  for (int e = 0; e < edge_count(); ++e)
    if (edges_[e].security == security && edges_[e].account == account) return e;
  return -1;
}

BigInt Instance::total_exposure() const {
  BigInt t = 0;
  for (const auto& a : accounts_) t += a.exposure;
  return t;
}

BigInt Instance::total_value() const {
  BigInt t = 0;
  for (const auto& s : securities_) t += s.value;
  return t;
}

ValidatedInstance validate_instance(const RawInstance& raw) {
  std::vector<std::string> warnings;

  // Shared scaling denominator for decimal inputs.
  BigInt scale = 1;
  for (const auto& s : raw.securities) scale = lcm(scale, s.value.den());
  for (const auto& a : raw.accounts) scale = lcm(scale, a.exposure.den());
  for (const auto& e : raw.edges)
    if (e.cap) scale = lcm(scale, e.cap->den());

  std::unordered_map<std::string, int> sec_by_id;
  std::unordered_map<std::string, int> acct_by_id;

  std::vector<Security> securities;
  securities.reserve(raw.securities.size());
  for (const auto& s : raw.securities) {
    if (s.value.is_negative())
      fail(ErrorCode::NegativeValue,
           "security '" + s.id + "' has negative value " + s.value.to_fraction_string());
    if (!sec_by_id.emplace(s.id, static_cast<int>(securities.size())).second)
      fail(ErrorCode::InvalidInput, "duplicate security id '" + s.id + "'");
    Rational scaled = s.value * Rational(scale);
    securities.push_back({s.id, scaled.num()});
  }

  std::vector<Account> accounts;
  accounts.reserve(raw.accounts.size());
  for (const auto& a : raw.accounts) {
    if (a.exposure.is_zero() || a.exposure.is_negative())
      fail(ErrorCode::NonPositiveExposure,
           "account '" + a.id + "' has non-positive exposure " + a.exposure.to_fraction_string());
    if (!acct_by_id.emplace(a.id, static_cast<int>(accounts.size())).second)
      fail(ErrorCode::InvalidInput, "duplicate account id '" + a.id + "'");
    Rational scaled = a.exposure * Rational(scale);
    accounts.push_back({a.id, scaled.num()});
  }

  int with_priority = 0;
  std::set<int> priority_values;
  std::set<std::pair<std::string, std::string>> seen_pairs;
  std::vector<EligibilityEdge> edges;
  edges.reserve(raw.edges.size());
  for (const auto& e : raw.edges) {
    auto sec_it = sec_by_id.find(e.security);
    if (sec_it == sec_by_id.end())
      fail(ErrorCode::DanglingEndpoint, "edge references unknown security '" + e.security + "'");
    auto acct_it = acct_by_id.find(e.account);
    if (acct_it == acct_by_id.end())
      fail(ErrorCode::DanglingEndpoint, "edge references unknown account '" + e.account + "'");
    if (!seen_pairs.emplace(e.security, e.account).second)
      fail(ErrorCode::DuplicateEdge, "duplicate edge " + e.security + " -> " + e.account);

    EligibilityEdge edge;
    edge.security = sec_it->second;
    edge.account = acct_it->second;
    if (e.cap) {
      if (e.cap->is_negative())
        fail(ErrorCode::InvalidInput,
             "edge " + e.security + " -> " + e.account + " has negative cap");
      edge.cap = *e.cap * Rational(scale);
    }
    if (e.priority) {
      if (*e.priority <= 0)
        fail(ErrorCode::InvalidInput,
             "edge " + e.security + " -> " + e.account + " has non-positive priority");
      ++with_priority;
      priority_values.insert(*e.priority);
      edge.priority = *e.priority;
    }
    edges.push_back(edge);
  }

  if (with_priority != 0 && with_priority != static_cast<int>(edges.size()))
    fail(ErrorCode::PartialPriorities,
         "priorities present on " + std::to_string(with_priority) + " of " +
             std::to_string(edges.size()) + " edges; must be all or none");

  // Dense renumbering {1..P}, preserving order.
  if (!priority_values.empty()) {
    std::map<int, int> remap;
    int next = 1;
    for (int p : priority_values) remap[p] = next++;
    bool changed = false;
    for (auto& e : edges) {
      int dense = remap[e.priority];
      if (dense != e.priority) changed = true;
      e.priority = dense;
    }
    if (changed)
      warnings.push_back("priority classes renumbered to 1.." +
                         std::to_string(static_cast<int>(priority_values.size())));
  }

  // Drop securities with no incident edges; remap indices.
  std::vector<char> sec_used(securities.size(), 0);
  for (const auto& e : edges) sec_used[e.security] = 1;
  std::vector<int> sec_remap(securities.size(), -1);
  std::vector<Security> kept_securities;
  for (int i = 0; i < static_cast<int>(securities.size()); ++i) {
    if (sec_used[i]) {
      sec_remap[i] = static_cast<int>(kept_securities.size());
      kept_securities.push_back(securities[i]);
    } else {
      warnings.push_back("security '" + securities[i].id + "' has no eligible accounts; removed");
    }
  }
  for (auto& e : edges) e.security = sec_remap[e.security];

  return ValidatedInstance{
      Instance(std::move(kept_securities), std::move(accounts), std::move(edges), scale),
      std::move(warnings)};
}

}  // namespace colflow
