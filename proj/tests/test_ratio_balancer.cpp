#include <doctest.h>

#include <random>
#include <set>

#include "colflow/errors.hpp"
#include "colflow/ratio_balancer.hpp"
#include "colflow/verification.hpp"
#include "support.hpp"

using namespace colflow;
using namespace colflow::testsupport;

namespace {

Rational sink_cap_of(const FlowNetwork& net, int account_ref) {
  for (const auto& arc : net.arcs()) {
    if (arc.to != net.sink()) continue;
    if (net.nodes()[arc.from].ref == account_ref) return *arc.cap;
  }
  REQUIRE(false);
  return Rational(0);
}

// First-phase critical level straight from the subset formula (no caps).
Rational lambda1_by_subsets(const Instance& inst) {
  int k = inst.account_count();
  std::optional<Rational> best;
  for (std::uint32_t mask = 1; mask < (1u << k); ++mask) {
    std::vector<char> in_group(k, 0);
    for (int j = 0; j < k; ++j)
      if (mask & (1u << j)) in_group[j] = 1;
    std::vector<char> adjacent(inst.security_count(), 0);
    for (const auto& edge : inst.edges())
      if (in_group[edge.account]) adjacent[edge.security] = 1;
    Rational value = 0;
    for (int i = 0; i < inst.security_count(); ++i)
      if (adjacent[i]) value += Rational(inst.securities()[i].value);
    Rational exposure = 0;
    for (int j = 0; j < k; ++j)
      if (in_group[j]) exposure += Rational(inst.accounts()[j].exposure);
    Rational ratio = value / exposure;
    if (!best || ratio < *best) best = ratio;
  }
  return min(Rational(1), *best);
}

void check_phase_record_invariants(const Instance& inst, const BalanceReport& report) {
  std::set<int> seen_secs;
  std::set<int> seen_accts;
  Rational prev(-1);
  for (const auto& phase : report.phases) {
    CHECK(phase.lambda > prev);
    prev = phase.lambda;
    for (int i : phase.tight_securities) CHECK(seen_secs.insert(i).second);
    for (int j : phase.tight_accounts) {
      CHECK(seen_accts.insert(j).second);
      // tight accounts lock in risk ratio 1 - lambda
      CHECK(report.risk_ratio[j] == Rational(1) - phase.lambda);
    }
  }
  CHECK(static_cast<int>(seen_accts.size()) == inst.account_count());
}

}  // namespace

TEST_CASE("lambda network construction") {
  auto inst = intro_instance();
  auto net = build_p_lambda(inst, Rational(BigInt(2), BigInt(3)), BalanceMode::Standard);
  CHECK(sink_cap_of(net, 0) == Rational(BigInt(8), BigInt(3)));
  CHECK(sink_cap_of(net, 1) == Rational(4));
  CHECK(sink_cap_of(net, 2) == Rational(4));

  // over-coverage restriction of the worked example: securities 2,3 feeding
  // account 2 at lambda = 5
  auto restricted = make_instance({2, 3}, {1}, {{1, 1}, {2, 1}});
  auto oc_net = build_p_lambda(restricted, Rational(5), BalanceMode::OverCoverage);
  CHECK(sink_cap_of(oc_net, 0) == Rational(5));

  // claim limits become middle-arc capacities
  auto capped = make_instance({3}, {4, 4}, {{1, 1}, {1, 2, Rational(2)}});
  auto capped_net = build_p_lambda(capped, Rational(1), BalanceMode::Standard);
  int middle_arcs = 0;
  for (const auto& arc : capped_net.arcs()) {
    if (capped_net.nodes()[arc.from].kind == NodeKind::Security &&
        capped_net.nodes()[arc.to].kind == NodeKind::Account) {
      ++middle_arcs;
      if (capped_net.nodes()[arc.to].ref == 1) {
        REQUIRE(arc.cap.has_value());
        CHECK(*arc.cap == Rational(2));
      } else {
        CHECK(!arc.cap.has_value());
      }
    }
  }
  CHECK(middle_arcs == 2);

  CHECK_THROWS_AS(build_p_lambda(inst, Rational(BigInt(11), BigInt(10)), BalanceMode::Standard),
                  Error);
  CHECK_THROWS_AS(build_p_lambda(inst, Rational(BigInt(1), BigInt(2)), BalanceMode::OverCoverage),
                  Error);
}

TEST_CASE("feasibility is exact at the critical level") {
  auto inst = intro_instance();
  CHECK(is_feasible(inst, Rational(BigInt(2), BigInt(3)), BalanceMode::Standard).feasible);
  CHECK(!is_feasible(inst, Rational(BigInt(2), BigInt(3)) + Rational(BigInt(1), BigInt(1000)),
                     BalanceMode::Standard)
             .feasible);
  CHECK(is_feasible(inst, Rational(0), BalanceMode::Standard).feasible);

  auto fig1 = figure1_instance();
  CHECK(is_feasible(fig1, Rational(BigInt(4), BigInt(9)), BalanceMode::Standard).feasible);
  CHECK(!is_feasible(fig1, Rational(BigInt(1), BigInt(2)), BalanceMode::Standard).feasible);
}

TEST_CASE("feasibility is downward closed in lambda") {
  std::mt19937_64 rng(404);
  for (int t = 0; t < 30; ++t) {
    auto inst = random_instance(rng, 5, 12, /*with_caps=*/t % 3 == 0);
    Rational probe_hi(1 + static_cast<long long>(rng() % 16), 16);
    Rational probe_lo = probe_hi * Rational(1 + static_cast<long long>(rng() % 8), 8);
    bool hi_feasible = is_feasible(inst, probe_hi, BalanceMode::Standard).feasible;
    bool lo_feasible = is_feasible(inst, probe_lo, BalanceMode::Standard).feasible;
    if (hi_feasible) CHECK(lo_feasible);
  }
}

TEST_CASE("find_lambda on the worked phases") {
  LambdaQueryBudget budget;
  auto first = find_lambda(intro_instance(), BalanceMode::Standard, budget);
  CHECK(first.lambda == Rational(BigInt(2), BigInt(3)));
  CHECK(first.cut.unreachable_securities == std::vector<int>{1, 2});
  CHECK(first.cut.unreachable_accounts == std::vector<int>{1, 2});

  // remaining sub-instance after the first peel
  auto second_inst = make_instance({3}, {4}, {{1, 1}});
  LambdaQueryBudget budget2;
  auto second = find_lambda(second_inst, BalanceMode::Standard, budget2);
  CHECK(second.lambda == Rational(BigInt(3), BigInt(4)));

  auto exact_cover = make_instance({5}, {5}, {{1, 1}});
  LambdaQueryBudget budget3;
  CHECK(find_lambda(exact_cover, BalanceMode::Standard, budget3).lambda == Rational(1));

  CHECK_THROWS_AS(find_lambda(validate_instance(make_raw({}, {3}, {})).instance,
                              BalanceMode::Standard, budget),
                  Error);
}

TEST_CASE("find_lambda agrees with the subset formula on random instances") {
  std::mt19937_64 rng(6021);
  for (int t = 0; t < 60; ++t) {
    auto inst = random_instance(rng, 6, 15);
    if (inst.security_count() == 0) continue;
    LambdaQueryBudget budget;
    auto located = find_lambda(inst, BalanceMode::Standard, budget);
    CHECK(located.lambda == lambda1_by_subsets(inst));
  }
}

TEST_CASE("phase decomposition reproduces the introductory example exactly") {
  auto inst = intro_instance();
  auto report = phase_decompose(inst);

  REQUIRE(report.phases.size() == 2);
  CHECK(report.phases[0].lambda == Rational(BigInt(2), BigInt(3)));
  CHECK(report.phases[0].tight_securities == std::vector<int>{1, 2});
  CHECK(report.phases[0].tight_accounts == std::vector<int>{1, 2});
  CHECK(report.phases[1].lambda == Rational(BigInt(3), BigInt(4)));
  CHECK(report.phases[1].tight_securities == std::vector<int>{0});
  CHECK(report.phases[1].tight_accounts == std::vector<int>{0});

  CHECK(report.flow.edge_flow ==
        std::vector<Rational>{Rational(3), Rational(0), Rational(3), Rational(1), Rational(4)});
  CHECK(report.risk_ratio ==
        std::vector<Rational>{Rational(BigInt(1), BigInt(4)), Rational(BigInt(1), BigInt(3)),
                              Rational(BigInt(1), BigInt(3))});
  CHECK(report.objective == Rational(BigInt(19), BigInt(12)));
  check_phase_record_invariants(inst, report);
}

TEST_CASE("the standard-form example balances in a single phase") {
  auto inst = figure1_instance();
  auto report = phase_decompose(inst);
  REQUIRE(report.phases.size() == 1);
  CHECK(report.phases[0].lambda == Rational(BigInt(4), BigInt(9)));
  for (const auto& r : report.risk_ratio) CHECK(r == Rational(BigInt(5), BigInt(9)));
  CHECK(report.objective == Rational(BigInt(100), BigInt(9)));
  // flows are non-unique; the flow must be a balanced maximum flow
  CHECK(check_ratio_balance(inst, report.flow).empty());
  CHECK(check_maximality(inst, report.flow).maximal);
}

TEST_CASE("isolated accounts occupy a lambda-zero first phase") {
  auto inst = make_instance({3}, {4, 7}, {{1, 1}});
  auto report = phase_decompose(inst);
  REQUIRE(report.phases.size() == 2);
  CHECK(report.phases[0].lambda == Rational(0));
  CHECK(report.phases[0].tight_securities.empty());
  CHECK(report.phases[0].tight_accounts == std::vector<int>{1});
  CHECK(report.risk_ratio[1] == Rational(1));
  check_phase_record_invariants(inst, report);
}

TEST_CASE("instances whose securities all vanish still assign every account") {
  auto inst = validate_instance(make_raw({5}, {2, 3}, {})).instance;  // security removed
  REQUIRE(inst.security_count() == 0);
  auto report = phase_decompose(inst);
  REQUIRE(report.phases.size() == 1);
  CHECK(report.phases[0].lambda == Rational(0));
  CHECK(report.risk_ratio == std::vector<Rational>{Rational(1), Rational(1)});
}

TEST_CASE("over-coverage reproduces the worked example") {
  auto inst = over_coverage_instance();
  auto base = phase_decompose(inst);
  CHECK(base.risk_ratio == std::vector<Rational>{Rational(0), Rational(0)});

  auto report = over_coverage_pass(inst, base);
  REQUIRE(report.over_coverage.has_value());
  const auto& oc = *report.over_coverage;
  REQUIRE(oc.phases.size() == 2);
  CHECK(oc.phases[0].lambda == Rational(1));
  CHECK(oc.phases[0].tight_securities == std::vector<int>{0});
  CHECK(oc.phases[0].tight_accounts == std::vector<int>{0});
  CHECK(oc.phases[1].lambda == Rational(5));
  CHECK(oc.phases[1].tight_securities == std::vector<int>{1, 2});
  CHECK(oc.phases[1].tight_accounts == std::vector<int>{1});
  CHECK(oc.flow.edge_flow ==
        std::vector<Rational>{Rational(1), Rational(0), Rational(2), Rational(3)});
  // base report unchanged
  CHECK(report.flow.edge_flow == base.flow.edge_flow);
  CHECK(report.phases.size() == base.phases.size());
}

TEST_CASE("over-coverage is benign without fully covered accounts") {
  auto inst = intro_instance();
  auto base = phase_decompose(inst);
  auto report = over_coverage_pass(inst, base);
  CHECK(!report.over_coverage.has_value());
}

TEST_CASE("over-coverage on a single pair") {
  auto inst = make_instance({10}, {2}, {{1, 1}});
  auto report = over_coverage_pass(inst, phase_decompose(inst));
  REQUIRE(report.over_coverage.has_value());
  REQUIRE(report.over_coverage->phases.size() == 1);
  CHECK(report.over_coverage->phases[0].lambda == Rational(5));
  CHECK(report.over_coverage->flow.edge_flow[0] == Rational(10));
}

TEST_CASE("claim limits bound the over-coverage level") {
  auto inst = make_instance({10}, {2}, {{1, 1, Rational(6)}});
  auto report = over_coverage_pass(inst, phase_decompose(inst));
  REQUIRE(report.over_coverage.has_value());
  CHECK(report.over_coverage->phases[0].lambda == Rational(3));
  CHECK(report.over_coverage->flow.edge_flow[0] == Rational(6));
}

TEST_CASE("find_lambda in over-coverage mode on a restricted sub-instance") {
  auto restricted = make_instance({2, 3}, {1}, {{1, 1}, {2, 1}});
  LambdaQueryBudget budget;
  auto located = find_lambda(restricted, BalanceMode::OverCoverage, budget);
  CHECK(located.lambda == Rational(5));
  CHECK(located.cut.unreachable_accounts == std::vector<int>{0});
}

TEST_CASE("over-coverage phases scale coverage exactly on random instances") {
  std::mt19937_64 rng(77077);
  int exercised = 0;
  for (int t = 0; t < 60; ++t) {
    // big values over small exposures so full coverage is common
    auto inst = random_instance(rng, 5, 9, t % 3 == 0);
    auto report = over_coverage_pass(inst, phase_decompose(inst));
    if (!report.over_coverage) continue;
    ++exercised;
    const auto& oc = *report.over_coverage;
    check_flow(inst, oc.flow);
    auto inflow = account_inflow(inst, oc.flow);
    Rational prev(0);
    for (const auto& phase : oc.phases) {
      CHECK(phase.lambda >= Rational(1));
      CHECK(phase.lambda > prev);
      prev = phase.lambda;
      for (int j : phase.tight_accounts)
        CHECK(inflow[j] == phase.lambda * Rational(inst.accounts()[j].exposure));
    }
    // accounts outside the covered set keep their base inflow
    auto base_inflow = account_inflow(inst, report.flow);
    for (int j = 0; j < inst.account_count(); ++j)
      if (!report.risk_ratio[j].is_zero()) CHECK(inflow[j] == base_inflow[j]);
  }
  CHECK(exercised > 5);
}

TEST_CASE("phase output is balanced, maximum, and matches the oracle") {
  std::mt19937_64 rng(880011);
  for (int t = 0; t < 120; ++t) {
    auto inst = random_instance(rng);
    auto report = phase_decompose(inst);
    CHECK(check_ratio_balance(inst, report.flow).empty());
    CHECK(check_maximality(inst, report.flow).maximal);
    CHECK(report.risk_ratio == oracle_risk_vector(inst));
    check_phase_record_invariants(inst, report);
  }
}

TEST_CASE("claim-limited instances still match the oracle") {
  std::mt19937_64 rng(424242);
  for (int t = 0; t < 80; ++t) {
    auto inst = random_instance(rng, 6, 12, /*with_caps=*/true);
    auto report = phase_decompose(inst);
    CHECK(report.risk_ratio == oracle_risk_vector(inst));
    CHECK(check_ratio_balance(inst, report.flow).empty());
    CHECK(check_maximality(inst, report.flow).maximal);
    check_phase_record_invariants(inst, report);
  }
}

TEST_CASE("query counts stay within the advertised budget") {
  std::mt19937_64 rng(550055);
  for (int t = 0; t < 60; ++t) {
    auto inst = random_instance(rng);
    LambdaQueryBudget budget;
    auto report = phase_decompose(inst, &budget);
    long phases = static_cast<long>(report.phases.size());
    if (phases == 0) continue;
    // c * ceil(log2(2 N^2)) with c = 3, N = n*M
    BigInt n_m = BigInt(inst.node_count()) * inst.max_magnitude();
    if (n_m < 1) n_m = 1;
    long bits = 0;
    BigInt p = 1;
    while (p < 2 * n_m * n_m) {
      p *= 2;
      ++bits;
    }
    CHECK(budget.queries_used <= phases * 3 * bits);
    for (long per_phase : budget.per_phase) CHECK(per_phase <= 3 * bits);
    // every peeled level is a fraction bounded by N in lowest terms
    for (const auto& phase : report.phases) {
      CHECK(phase.lambda.num() <= n_m);
      CHECK(phase.lambda.den() <= n_m);
    }
  }
}

TEST_CASE("a deterministic multi-phase instance matches the oracle") {
  auto inst = make_instance({9, 1, 7, 3}, {5, 11, 2, 8, 6},
                            {{1, 1}, {1, 4}, {2, 2}, {3, 2}, {3, 3}, {4, 5}, {3, 5}});
  auto report = phase_decompose(inst);
  check_phase_record_invariants(inst, report);
  CHECK(report.risk_ratio == oracle_risk_vector(inst));
}
