#pragma once

#include <optional>
#include <random>
#include <string>
#include <vector>

#include "colflow/instance.hpp"
#include "colflow/rational.hpp"

namespace colflow::testsupport {

struct EdgeSpec {
  int security;  // 1-based, matching the fixture descriptions
  int account;
  std::optional<Rational> cap = std::nullopt;
  std::optional<int> priority = std::nullopt;
};

inline RawInstance make_raw(const std::vector<long long>& values,
                            const std::vector<long long>& exposures,
                            const std::vector<EdgeSpec>& edges) {
  RawInstance raw;
  for (std::size_t i = 0; i < values.size(); ++i)
    raw.securities.push_back({"s" + std::to_string(i + 1), Rational(values[i])});
  for (std::size_t j = 0; j < exposures.size(); ++j)
    raw.accounts.push_back({"a" + std::to_string(j + 1), Rational(exposures[j])});
  for (const auto& e : edges)
    raw.edges.push_back({"s" + std::to_string(e.security), "a" + std::to_string(e.account), e.cap,
                         e.priority});
  return raw;
}

inline Instance make_instance(const std::vector<long long>& values,
                              const std::vector<long long>& exposures,
                              const std::vector<EdgeSpec>& edges) {
  return validate_instance(make_raw(values, exposures, edges)).instance;
}

/// v=(3,3,5), e=(4,6,6), edges {1->1, 2->1, 2->2, 3->2, 3->3}.
inline Instance intro_instance() {
  return make_instance({3, 3, 5}, {4, 6, 6},
                       {{1, 1}, {2, 1}, {2, 2}, {3, 2}, {3, 3}});
}

/// v=(8,8), e=(12,8,16), edges x1..x5 = (1,1),(1,2),(2,1),(2,2),(2,3).
inline Instance figure1_instance() {
  return make_instance({8, 8}, {12, 8, 16},
                       {{1, 1}, {1, 2}, {2, 1}, {2, 2}, {2, 3}});
}

/// v=(1,2,3), e=(1,1), edges {1->1, 1->2, 2->2, 3->2}.
inline Instance over_coverage_instance() {
  return make_instance({1, 2, 3}, {1, 1}, {{1, 1}, {1, 2}, {2, 2}, {3, 2}});
}

/// v=(20,20), e=(20,20,5), edges x1=(1,1,p1), x2=(1,2,p1), x3=(2,2,p2), x4=(2,3,p1).
inline Instance priorities_instance() {
  return make_instance({20, 20}, {20, 20, 5},
                       {{1, 1, std::nullopt, 1},
                        {1, 2, std::nullopt, 1},
                        {2, 2, std::nullopt, 2},
                        {2, 3, std::nullopt, 1}});
}

/// Random corpus instance: |S|,|A| uniform in [1,8], integer values and
/// exposures in [1,20], each eligibility edge present with probability 1/2.
inline Instance random_instance(std::mt19937_64& rng, int max_side = 8,
                                long long max_magnitude = 20, bool with_caps = false) {
  int n_sec = 1 + static_cast<int>(rng() % max_side);
  int n_acct = 1 + static_cast<int>(rng() % max_side);
  RawInstance raw;
  for (int i = 0; i < n_sec; ++i)
    raw.securities.push_back(
        {"s" + std::to_string(i + 1),
         Rational(1 + static_cast<long long>(rng() % max_magnitude))});
  for (int j = 0; j < n_acct; ++j)
    raw.accounts.push_back(
        {"a" + std::to_string(j + 1),
         Rational(1 + static_cast<long long>(rng() % max_magnitude))});
  for (int i = 0; i < n_sec; ++i)
    for (int j = 0; j < n_acct; ++j) {
      if (rng() % 2 != 0) continue;
      RawInstance::RawEdge edge;
      edge.security = "s" + std::to_string(i + 1);
      edge.account = "a" + std::to_string(j + 1);
      if (with_caps && rng() % 3 == 0)
        edge.cap = Rational(static_cast<long long>(rng() % (max_magnitude + 1)));
      raw.edges.push_back(std::move(edge));
    }
  return validate_instance(raw).instance;
}

/// Random instance where every edge carries a priority from 1..classes.
inline Instance random_priority_instance(std::mt19937_64& rng, int max_side = 4,
                                         long long max_magnitude = 10, int classes = 3) {
  for (;;) {
    int n_sec = 1 + static_cast<int>(rng() % max_side);
    int n_acct = 1 + static_cast<int>(rng() % max_side);
    RawInstance raw;
    for (int i = 0; i < n_sec; ++i)
      raw.securities.push_back(
          {"s" + std::to_string(i + 1),
           Rational(1 + static_cast<long long>(rng() % max_magnitude))});
    for (int j = 0; j < n_acct; ++j)
      raw.accounts.push_back(
          {"a" + std::to_string(j + 1),
           Rational(1 + static_cast<long long>(rng() % max_magnitude))});
    for (int i = 0; i < n_sec; ++i)
      for (int j = 0; j < n_acct; ++j) {
        if (rng() % 2 != 0) continue;
        RawInstance::RawEdge edge;
        edge.security = "s" + std::to_string(i + 1);
        edge.account = "a" + std::to_string(j + 1);
        edge.priority = 1 + static_cast<int>(rng() % classes);
        raw.edges.push_back(std::move(edge));
      }
    if (raw.edges.empty()) continue;
    return validate_instance(raw).instance;
  }
}

}  // namespace colflow::testsupport
