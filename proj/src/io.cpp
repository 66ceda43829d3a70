#include "colflow/io.hpp"

#include <fstream>
#include <ostream>

#include "colflow/errors.hpp"

namespace colflow {

namespace {

Rational parse_quantity(const Json& value, const std::string& where) {
  if (value.is_number_integer()) {
    return Rational(BigInt(value.get<long long>()));
  }
  if (value.is_number_unsigned()) {
    return Rational(BigInt(value.get<unsigned long long>()));
  }
  if (value.is_string()) {
    auto parsed = Rational::from_decimal_string(value.get<std::string>());
    if (!parsed)
      fail(ErrorCode::InvalidInput,
           where + ": '" + value.get<std::string>() + "' is not a decimal number");
    return *parsed;
  }
  if (value.is_number_float())
    fail(ErrorCode::InvalidInput,
         where + ": non-integral JSON numbers are lossy; pass decimals as strings");
  fail(ErrorCode::InvalidInput, where + ": expected an integer or a decimal string");
}

std::string id_of(const Json& value, const std::string& where) {
  if (value.is_string()) return value.get<std::string>();
  if (value.is_number_integer() || value.is_number_unsigned()) return value.dump();
  fail(ErrorCode::InvalidInput, where + ": id must be a string or integer");
}

const Json& require(const Json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) fail(ErrorCode::InvalidInput, where + ": missing \"" + key + "\"");
  return *it;
}

}  // namespace

RawInstance parse_instance_json(const Json& doc) {
  if (!doc.is_object()) fail(ErrorCode::InvalidInput, "top level: expected an object");
  RawInstance raw;

  const Json& securities = require(doc, "securities", "top level");
  if (!securities.is_array()) fail(ErrorCode::InvalidInput, "\"securities\": expected an array");
  int index = 0;
  for (const auto& item : securities) {
    std::string where = "securities[" + std::to_string(index++) + "]";
    if (!item.is_object()) fail(ErrorCode::InvalidInput, where + ": expected an object");
    RawInstance::RawSecurity sec;
    sec.id = id_of(require(item, "id", where), where);
    sec.value = parse_quantity(require(item, "value", where), where + ".value");
    raw.securities.push_back(std::move(sec));
  }

  const Json& accounts = require(doc, "accounts", "top level");
  if (!accounts.is_array()) fail(ErrorCode::InvalidInput, "\"accounts\": expected an array");
  index = 0;
  for (const auto& item : accounts) {
    std::string where = "accounts[" + std::to_string(index++) + "]";
    if (!item.is_object()) fail(ErrorCode::InvalidInput, where + ": expected an object");
    RawInstance::RawAccount acct;
    acct.id = id_of(require(item, "id", where), where);
    acct.exposure = parse_quantity(require(item, "exposure", where), where + ".exposure");
    raw.accounts.push_back(std::move(acct));
  }

  const Json& edges = require(doc, "edges", "top level");
  if (!edges.is_array()) fail(ErrorCode::InvalidInput, "\"edges\": expected an array");
  index = 0;
  for (const auto& item : edges) {
    std::string where = "edges[" + std::to_string(index++) + "]";
    if (!item.is_object()) fail(ErrorCode::InvalidInput, where + ": expected an object");
    RawInstance::RawEdge edge;
    edge.security = id_of(require(item, "security", where), where);
    edge.account = id_of(require(item, "account", where), where);
    if (item.contains("cap")) edge.cap = parse_quantity(item["cap"], where + ".cap");
    if (item.contains("priority")) {
      const Json& p = item["priority"];
      if (!p.is_number_integer() || p.get<long long>() <= 0)
        fail(ErrorCode::InvalidInput, where + ".priority: expected a positive integer");
      edge.priority = static_cast<int>(p.get<long long>());
    }
    raw.edges.push_back(std::move(edge));
  }
  return raw;
}

RawInstance load_instance_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::InvalidInput, "cannot open '" + path + "'");
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorCode::InvalidInput, "'" + path + "': " + e.what());
  }
  return parse_instance_json(doc);
}

ParsedReport parse_report_json(const Json& doc) {
  if (!doc.is_object()) fail(ErrorCode::InvalidInput, "report: expected an object");
  ParsedReport parsed;
  const Json& flow = require(doc, "flow", "report");
  if (!flow.is_array()) fail(ErrorCode::InvalidInput, "report.flow: expected an array");
  int index = 0;
  for (const auto& item : flow) {
    std::string where = "flow[" + std::to_string(index++) + "]";
    std::string sec = id_of(require(item, "security", where), where);
    std::string acct = id_of(require(item, "account", where), where);
    const Json& value = require(item, "value", where);
    BigInt num(require(value, "num", where + ".value").get<std::string>());
    BigInt den(require(value, "den", where + ".value").get<std::string>());
    parsed.flow_edges.emplace_back(std::move(sec), std::move(acct));
    parsed.flow_values.emplace_back(std::move(num), std::move(den));
  }
  if (doc.contains("objective")) {
    const Json& obj = doc["objective"];
    BigInt num(require(obj, "num", "objective").get<std::string>());
    BigInt den(require(obj, "den", "objective").get<std::string>());
    parsed.objective = Rational(std::move(num), std::move(den));
    parsed.has_objective = true;
  }
  return parsed;
}

ParsedReport load_report_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::InvalidInput, "cannot open '" + path + "'");
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorCode::InvalidInput, "'" + path + "': " + e.what());
  }
  return parse_report_json(doc);
}

Json rational_json(const Rational& value, int precision) {
  Json out;
  out["num"] = value.num().str();
  out["den"] = value.den().str();
  out["decimal"] = value.decimal_string(precision);
  return out;
}

namespace {

Json flow_entry_json(const Instance& inst, int edge, const Rational& value, int precision) {
  Json entry;
  entry["security"] = inst.securities()[inst.edges()[edge].security].id;
  entry["account"] = inst.accounts()[inst.edges()[edge].account].id;
  Json v;
  v["num"] = value.num().str();
  v["den"] = value.den().str();
  entry["value"] = std::move(v);
  entry["decimal"] = value.decimal_string(precision);
  return entry;
}

Json phases_json(const Instance& inst, const std::vector<PhaseRecord>& phases, int precision) {
  Json out = Json::array();
  for (const auto& phase : phases) {
    Json rec;
    rec["k"] = phase.index;
    rec["lambda"] = rational_json(phase.lambda, precision);
    Json secs = Json::array();
    for (int i : phase.tight_securities) secs.push_back(inst.securities()[i].id);
    rec["tight_securities"] = std::move(secs);
    Json accts = Json::array();
    for (int j : phase.tight_accounts) accts.push_back(inst.accounts()[j].id);
    rec["tight_accounts"] = std::move(accts);
    out.push_back(std::move(rec));
  }
  return out;
}

Rational descale(const Rational& scaled, const BigInt& scale) {
  return scaled / Rational(scale);
}

}  // namespace

Json report_to_json(const Instance& inst, const BalanceReport& report,
                    const std::vector<std::string>& warnings, int precision) {
  const BigInt& scale = inst.scale();
  Json doc;
  doc["scale"] = scale.str();

  Json flow = Json::array();
  for (int e = 0; e < inst.edge_count(); ++e)
    flow.push_back(flow_entry_json(inst, e, descale(report.flow.edge_flow[e], scale), precision));
  doc["flow"] = std::move(flow);

  Json accounts = Json::array();
  for (int j = 0; j < inst.account_count(); ++j) {
    Json entry;
    entry["id"] = inst.accounts()[j].id;
    entry["surplus"] = rational_json(descale(report.surplus[j], scale), precision);
    entry["risk_ratio"] = rational_json(report.risk_ratio[j], precision);
    entry["secured_fraction"] = rational_json(Rational(1) - report.risk_ratio[j], precision);
    accounts.push_back(std::move(entry));
  }
  doc["accounts"] = std::move(accounts);

  doc["phases"] = phases_json(inst, report.phases, precision);
  doc["objective"] = rational_json(descale(report.objective, scale), precision);

  if (report.over_coverage) {
    Json oc;
    Json oc_flow = Json::array();
    for (int e = 0; e < inst.edge_count(); ++e)
      oc_flow.push_back(
          flow_entry_json(inst, e, descale(report.over_coverage->flow.edge_flow[e], scale),
                          precision));
    oc["flow"] = std::move(oc_flow);
    oc["phases"] = phases_json(inst, report.over_coverage->phases, precision);
    doc["over_coverage"] = std::move(oc);
  }

  if (report.priority_profile) {
    Json profile = Json::array();
    const auto& totals = report.priority_profile->class_total;
    for (std::size_t p = 0; p < totals.size(); ++p) {
      Json entry;
      entry["priority"] = static_cast<int>(p) + 1;
      entry["total"] = rational_json(descale(totals[p], scale), precision);
      profile.push_back(std::move(entry));
    }
    doc["priority_profile"] = std::move(profile);
  }

  if (!warnings.empty()) {
    Json w = Json::array();
    for (const auto& warning : warnings) w.push_back(warning);
    doc["warnings"] = std::move(w);
  }
  return doc;
}

namespace {

void write_matrix(std::ostream& os, const char* name, const MatrixR& m) {
  os << "matrix " << name << " " << m.rows() << " " << m.cols() << "\n";
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c > 0) os << " ";
      os << m(r, c).num().str() << "/" << m(r, c).den().str();
    }
    os << "\n";
  }
}

void write_vector(std::ostream& os, const char* name, const VectorR& v) {
  os << "vector " << name << " " << v.size() << "\n";
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i > 0) os << " ";
    os << v(i).num().str() << "/" << v(i).den().str();
  }
  os << "\n";
}

}  // namespace

void write_qp_export(std::ostream& os, const Instance& inst, const QpStandardForm& qp) {
  os << "colflow-qp 1\n";
  os << "edges " << inst.edge_count() << "\n";
  for (const auto& edge : inst.edges())
    os << inst.securities()[edge.security].id << " " << inst.accounts()[edge.account].id << "\n";
  write_matrix(os, "P", qp.qp_p);
  write_vector(os, "q", qp.q);
  write_matrix(os, "G", qp.g);
  write_vector(os, "h", qp.h);
  write_matrix(os, "K", qp.k);
  write_matrix(os, "V", qp.v);
  os << "constant " << qp.constant.num().str() << "/" << qp.constant.den().str() << "\n";
}

}  // namespace colflow
