// colflow: ratio-balanced collateral allocation.
//
//   colflow balance <instance.json> [--out FILE] [--over-coverage]
//                   [--priorities] [--precision N] [--max-oracle-size N]
//   colflow verify <instance.json> <report.json> [--tolerance D]
//   colflow export-qp <instance.json> [--out FILE]
//
// Exit codes: 0 ok, 1 verification failed, 2 input/validation error,
// 3 internal invariant breach.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "colflow/errors.hpp"
#include "colflow/io.hpp"
#include "colflow/priority_balancer.hpp"
#include "colflow/qp_form.hpp"
#include "colflow/ratio_balancer.hpp"
#include "colflow/verification.hpp"

namespace {

using namespace colflow;

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailed = 1;
constexpr int kExitInputError = 2;
constexpr int kExitInternalError = 3;

int run_balance(const std::string& input, const std::string& out_path, bool over_coverage,
                bool priorities, int precision, int max_oracle_size) {
  RawInstance raw = load_instance_file(input);
  ValidatedInstance validated = validate_instance(raw);
  const Instance& inst = validated.instance;

  if (priorities && !inst.has_priorities())
    fail(ErrorCode::MissingPriorities, "--priorities given but no edge carries a priority");
  if (!priorities && inst.has_priorities())
    fail(ErrorCode::InvalidInput, "instance carries priorities; rerun with --priorities");
  if (priorities && over_coverage)
    fail(ErrorCode::InvalidInput, "--over-coverage cannot be combined with --priorities");

  BalanceReport report =
      priorities ? balance_with_priorities(inst) : phase_decompose(inst);
  if (over_coverage) report = over_coverage_pass(inst, report);

  // Post-run self checks; a failure here is a bug, not an input problem.
  // (With priorities the balance condition holds on the admissible
  // subnetwork and is certified inside balance_with_priorities.)
  if (!priorities) {
    if (!check_ratio_balance(inst, report.flow).empty())
      fail(ErrorCode::Internal, "output flow violates the balance condition");
    if (!check_maximality(inst, report.flow).maximal)
      fail(ErrorCode::Internal, "output flow is not maximum");
    if (inst.account_count() <= max_oracle_size) {
      auto expected = oracle_risk_vector(inst, max_oracle_size);
      if (expected != report.risk_ratio)
        fail(ErrorCode::Internal, "risk vector disagrees with the subset oracle");
    }
  }

  Json doc = report_to_json(inst, report, validated.warnings, precision);
  std::string text = doc.dump(2);
  text += "\n";
  if (out_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(out_path);
    if (!out) fail(ErrorCode::InvalidInput, "cannot write '" + out_path + "'");
    out << text;
  }
  return kExitOk;
}

int run_verify(const std::string& input, const std::string& report_path,
               const std::string& tolerance_text) {
  RawInstance raw = load_instance_file(input);
  ValidatedInstance validated = validate_instance(raw);
  const Instance& inst = validated.instance;
  ParsedReport parsed = load_report_file(report_path);

  auto tolerance = Rational::from_decimal_string(tolerance_text);
  if (!tolerance || tolerance->is_negative())
    fail(ErrorCode::InvalidInput, "--tolerance must be a nonnegative decimal");

  FlowAssignment flow = zero_flow(inst);
  std::vector<char> edge_seen(inst.edge_count(), 0);
  for (std::size_t idx = 0; idx < parsed.flow_edges.size(); ++idx) {
    const auto& [sec_id, acct_id] = parsed.flow_edges[idx];
    int sec = inst.security_index(sec_id);
    int acct = inst.account_index(acct_id);
    if (sec < 0 || acct < 0)
      fail(ErrorCode::InvalidInput,
           "report references unknown nodes " + sec_id + " -> " + acct_id);
    int edge = inst.edge_index(sec, acct);
    if (edge < 0)
      fail(ErrorCode::InvalidInput, "report references unknown edge " + sec_id + " -> " + acct_id);
    if (edge_seen[edge])
      fail(ErrorCode::InvalidInput, "report lists edge " + sec_id + " -> " + acct_id + " twice");
    edge_seen[edge] = 1;
    // report values are in input units; the instance works in scaled units
    flow.edge_flow[edge] = parsed.flow_values[idx] * Rational(inst.scale());
  }

  int failures = 0;
  try {
    check_flow(inst, flow);
  } catch (const Error& e) {
    std::cout << "capacity violation: " << e.what() << "\n";
    ++failures;
  }

  if (failures == 0) {
    auto violations = check_ratio_balance(inst, flow, *tolerance);
    for (const auto& v : violations) {
      const auto& edge = inst.edges()[v.flow_edge];
      const auto& sibling = inst.edges()[v.sibling_edge];
      std::cout << "balance violation: security '" << inst.securities()[edge.security].id
                << "' funds account '" << inst.accounts()[edge.account].id << "' (risk "
                << v.r_receiving << ") while account '" << inst.accounts()[sibling.account].id
                << "' (risk " << v.r_sibling << ") is eligible and worse covered\n";
      ++failures;
    }

    auto maximality = check_maximality(inst, flow);
    if (!maximality.maximal) {
      std::cout << "maximality violation: augmenting path " << maximality.augmenting_path << "\n";
      ++failures;
    }

    if (parsed.has_objective) {
      Rational recomputed = mwsr_objective(inst, flow) / Rational(inst.scale());
      if (recomputed != parsed.objective) {
        std::cout << "objective mismatch: report says " << parsed.objective
                  << ", recomputed " << recomputed << "\n";
        ++failures;
      }
    }
  }

  if (failures == 0) {
    std::cout << "ok\n";
    return kExitOk;
  }
  std::cout << failures << " violation(s)\n";
  return kExitVerifyFailed;
}

int run_export_qp(const std::string& input, const std::string& out_path) {
  RawInstance raw = load_instance_file(input);
  ValidatedInstance validated = validate_instance(raw);
  QpStandardForm qp = qp_standard_form(validated.instance);
  if (out_path.empty()) {
    write_qp_export(std::cout, validated.instance, qp);
  } else {
    std::ofstream out(out_path);
    if (!out) fail(ErrorCode::InvalidInput, "cannot write '" + out_path + "'");
    write_qp_export(out, validated.instance, qp);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ratio-balanced collateral allocation"};
  app.require_subcommand(1);

  std::string input;
  std::string report_path;
  std::string out_path;
  std::string tolerance = "0";
  bool over_coverage = false;
  bool priorities = false;
  int precision = 6;
  int max_oracle_size = 15;

  CLI::App* balance = app.add_subcommand("balance", "compute a ratio-balanced maximum flow");
  balance->add_option("input", input, "instance file")->required();
  balance->add_option("--out", out_path, "write the report here instead of stdout");
  balance->add_flag("--over-coverage", over_coverage,
                    "distribute leftover value across fully covered accounts");
  balance->add_flag("--priorities", priorities, "require and enforce edge priorities");
  balance->add_option("--precision", precision, "decimal digits in renderings (default 6)");
  balance->add_option("--max-oracle-size", max_oracle_size,
                      "self-check against the subset oracle up to this many accounts (0 = off)");

  CLI::App* verify = app.add_subcommand("verify", "re-check a balance report");
  verify->add_option("input", input, "instance file")->required();
  verify->add_option("report", report_path, "report file")->required();
  verify->add_option("--tolerance", tolerance,
                     "slack allowed in the balance comparisons (decimal, default 0 = exact)");

  CLI::App* export_qp = app.add_subcommand("export-qp", "write the standard-form matrices");
  export_qp->add_option("input", input, "instance file")->required();
  export_qp->add_option("--out", out_path, "write the export here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitInputError;
  }

  try {
    if (balance->parsed())
      return run_balance(input, out_path, over_coverage, priorities, precision, max_oracle_size);
    if (verify->parsed()) return run_verify(input, report_path, tolerance);
    if (export_qp->parsed()) return run_export_qp(input, out_path);
  } catch (const colflow::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == colflow::ErrorCode::Internal ? kExitInternalError : kExitInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  return kExitInputError;
}
