#include <doctest.h>

#include <random>

#include "colflow/errors.hpp"
#include "colflow/ratio_balancer.hpp"
#include "colflow/verification.hpp"
#include "support.hpp"

using namespace colflow;
using namespace colflow::testsupport;

namespace {

FlowAssignment assignment(const Instance& inst, std::vector<Rational> values) {
  FlowAssignment f;
  f.edge_flow = std::move(values);
  check_flow(inst, f);
  return f;
}

}  // namespace

TEST_CASE("the reference flow is ratio-balanced") {
  auto inst = intro_instance();
  auto f = assignment(inst, {3, 0, 3, 1, 4});
  CHECK(check_ratio_balance(inst, f).empty());
}

TEST_CASE("an unbalanced flow is flagged with its witness pair") {
  auto inst = intro_instance();
  // f11=3, f21=1, f22=0, f32=4, f33=1: account a3 keeps risk 5/6 while its
  // security also serves the better-covered a2
  auto f = assignment(inst, {3, 1, 0, 4, 1});
  auto violations = check_ratio_balance(inst, f);
  REQUIRE(!violations.empty());
  bool found = false;
  for (const auto& v : violations) {
    int flow_acct = inst.edges()[v.flow_edge].account;
    int sibling_acct = inst.edges()[v.sibling_edge].account;
    if (inst.edges()[v.flow_edge].security == 2 && flow_acct == 1 && sibling_acct == 2)
      found = true;  // s3 funds a2 while a3 is worse covered
  }
  CHECK(found);
}

TEST_CASE("single-edge instances are vacuously balanced") {
  auto inst = make_instance({2}, {3}, {{1, 1}});
  CHECK(check_ratio_balance(inst, zero_flow(inst)).empty());
}

TEST_CASE("a saturated claim limit exempts the sibling") {
  auto inst = make_instance({10}, {10, 10}, {{1, 1}, {1, 2, Rational(2)}});
  // optimum: a1 gets 8, a2 capped at 2; r = (1/5, 4/5): literal balance is
  // violated but no flow can be diverted onto the saturated edge
  auto f = assignment(inst, {8, 2});
  CHECK(check_ratio_balance(inst, f).empty());
  // with room on the claim-limited edge the violation is real
  auto g = assignment(inst, {8, 1});
  CHECK(!check_ratio_balance(inst, g).empty());
}

TEST_CASE("tolerance widens the comparison") {
  auto inst = make_instance({4}, {10, 10}, {{1, 1}, {1, 2}});
  auto f = assignment(inst, {Rational(BigInt(21), BigInt(10)), Rational(BigInt(19), BigInt(10))});
  CHECK(!check_ratio_balance(inst, f).empty());
  CHECK(check_ratio_balance(inst, f, Rational(BigInt(1), BigInt(10))).empty());
}

TEST_CASE("maximality verdicts") {
  auto inst = intro_instance();
  CHECK(check_maximality(inst, assignment(inst, {3, 0, 3, 1, 4})).maximal);

  auto verdict = check_maximality(inst, zero_flow(inst));
  CHECK(!verdict.maximal);
  CHECK(verdict.augmenting_path.find("source") == 0);
  CHECK(verdict.augmenting_path.find("sink") != std::string::npos);

  auto pair = make_instance({1}, {1}, {{1, 1}});
  CHECK(check_maximality(pair, assignment(pair, {1})).maximal);
}

TEST_CASE("oracle risk vectors on the pinned examples") {
  CHECK(oracle_risk_vector(intro_instance()) ==
        std::vector<Rational>{Rational(BigInt(1), BigInt(4)), Rational(BigInt(1), BigInt(3)),
                              Rational(BigInt(1), BigInt(3))});
  CHECK(oracle_risk_vector(figure1_instance()) ==
        std::vector<Rational>{Rational(BigInt(5), BigInt(9)), Rational(BigInt(5), BigInt(9)),
                              Rational(BigInt(5), BigInt(9))});
  CHECK(oracle_risk_vector(make_instance({1, 1}, {4}, {{1, 1}, {2, 1}})) ==
        std::vector<Rational>{Rational(BigInt(1), BigInt(2))});
}

TEST_CASE("oracle rejects oversized and prioritized instances") {
  std::vector<long long> exposures(16, 1);
  std::vector<EdgeSpec> edges;
  for (int j = 1; j <= 16; ++j) edges.push_back({1, j});
  auto big = make_instance({5}, exposures, edges);
  CHECK_THROWS_AS(oracle_risk_vector(big), Error);
  CHECK_NOTHROW(oracle_risk_vector(big, 16));
  CHECK_THROWS_AS(oracle_risk_vector(priorities_instance()), Error);
}

TEST_CASE("gradient of the objective matches central differences") {
  std::mt19937_64 rng(31415);
  auto fig1 = figure1_instance();
  for (int t = 0; t < 20; ++t) {
    auto f = random_feasible_flow(fig1, rng, /*interior=*/true);
    CHECK(gradient_check(fig1, f) <= 1e-6);
  }
}

TEST_CASE("gradient at the boundary cases") {
  auto inst = intro_instance();
  // zero flow: every account has risk 1, gradient -2 on every edge
  CHECK(gradient_check(inst, zero_flow(inst)) <= 1e-6);
  // fully covered account: gradient 0 on its edges
  auto pair = make_instance({1}, {1}, {{1, 1}});
  CHECK(gradient_check(pair, assignment(pair, {1})) <= 1e-6);
}

TEST_CASE("local optimality probe accepts the balanced flows") {
  auto intro = intro_instance();
  auto intro_report = phase_decompose(intro);
  auto verdict = local_opt_probe(intro, intro_report.flow, 100);
  CHECK(verdict.ok);
  CHECK(verdict.best_candidate_objective >= Rational(BigInt(19), BigInt(12)));

  auto fig1 = figure1_instance();
  auto fig1_report = phase_decompose(fig1);
  auto fig1_verdict = local_opt_probe(fig1, fig1_report.flow, 100);
  CHECK(fig1_verdict.ok);
  CHECK(fig1_verdict.best_candidate_objective >= Rational(BigInt(100), BigInt(9)));
}

TEST_CASE("local optimality probe rejects a suboptimal flow") {
  auto inst = intro_instance();
  auto verdict = local_opt_probe(inst, zero_flow(inst), 50);
  CHECK(!verdict.ok);
}

TEST_CASE("random maximum flows really are maximum and feasible") {
  std::mt19937_64 rng(999);
  for (int t = 0; t < 60; ++t) {
    auto inst = random_instance(rng, 6, 12, t % 2 == 1);
    auto f = random_maximum_flow(inst, rng);
    check_flow(inst, f);
    CHECK(check_maximality(inst, f).maximal);
  }
}

TEST_CASE("risk-vector uniqueness across node and edge orderings") {
  std::mt19937_64 rng(2718);
  for (int t = 0; t < 20; ++t) {
    auto inst = random_instance(rng);
    auto reference = phase_decompose(inst).risk_ratio;
    for (unsigned variant = 1; variant <= 4; ++variant) {
      // deterministically permuted copy of the instance
      std::mt19937_64 perm_rng(variant * 101);
      std::vector<int> sec_order(inst.security_count());
      std::vector<int> acct_order(inst.account_count());
      for (int i = 0; i < inst.security_count(); ++i) sec_order[i] = i;
      for (int j = 0; j < inst.account_count(); ++j) acct_order[j] = j;
      std::shuffle(sec_order.begin(), sec_order.end(), perm_rng);
      std::shuffle(acct_order.begin(), acct_order.end(), perm_rng);
      RawInstance raw;
      for (int i : sec_order)
        raw.securities.push_back(
            {inst.securities()[i].id, Rational(inst.securities()[i].value)});
      for (int j : acct_order)
        raw.accounts.push_back(
            {inst.accounts()[j].id, Rational(inst.accounts()[j].exposure)});
      std::vector<int> edge_order(inst.edge_count());
      for (int e = 0; e < inst.edge_count(); ++e) edge_order[e] = e;
      std::shuffle(edge_order.begin(), edge_order.end(), perm_rng);
      for (int e : edge_order)
        raw.edges.push_back({inst.securities()[inst.edges()[e].security].id,
                             inst.accounts()[inst.edges()[e].account].id, inst.edges()[e].cap,
                             std::nullopt});
      auto permuted = validate_instance(raw).instance;
      auto permuted_risk = phase_decompose(permuted).risk_ratio;
      for (int j = 0; j < inst.account_count(); ++j) {
        int pj = permuted.account_index(inst.accounts()[j].id);
        REQUIRE(pj >= 0);
        CHECK(permuted_risk[pj] == reference[j]);
      }
    }
  }
}
