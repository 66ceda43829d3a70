#pragma once

#include <json.hpp>

#include <iosfwd>
#include <string>
#include <vector>

#include "colflow/instance.hpp"
#include "colflow/qp_form.hpp"
#include "colflow/report.hpp"

namespace colflow {

using Json = nlohmann::ordered_json;

/// Parses the instance schema:
///   {"securities": [{"id", "value"}], "accounts": [{"id", "exposure"}],
///    "edges": [{"security", "account", "cap"?, "priority"?}]}
/// Quantities are JSON integers or decimal strings ("12.5"). Non-integral
/// JSON numbers are rejected (binary floats are lossy); use strings.
/// Throws Error(InvalidInput) with a pointered message on schema problems.
RawInstance parse_instance_json(const Json& doc);

RawInstance load_instance_file(const std::string& path);

/// A parsed balance report, as far as verification needs it.
struct ParsedReport {
  std::vector<std::pair<std::string, std::string>> flow_edges;  // (security, account)
  std::vector<Rational> flow_values;
  Rational objective;
  bool has_objective = false;
};

ParsedReport parse_report_json(const Json& doc);
ParsedReport load_report_file(const std::string& path);

Json rational_json(const Rational& value, int precision);

/// Serializes a balance report. Deterministic: stable input-order listings,
/// exact num/den strings plus decimal renderings at the given precision.
Json report_to_json(const Instance& inst, const BalanceReport& report,
                    const std::vector<std::string>& warnings, int precision);

/// Plain-text dense export of the standard-form matrices (documented in the
/// README): one row per line, entries as num/den.
void write_qp_export(std::ostream& os, const Instance& inst, const QpStandardForm& qp);

}  // namespace colflow
