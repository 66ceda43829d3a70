#include "colflow/report.hpp"

#include "colflow/errors.hpp"

namespace colflow {

FlowAssignment zero_flow(const Instance& inst) {
  FlowAssignment f;
  f.edge_flow.assign(inst.edge_count(), Rational(0));
  return f;
}

void check_flow(const Instance& inst, const FlowAssignment& f) {
  if (static_cast<int>(f.edge_flow.size()) != inst.edge_count())
    fail(ErrorCode::InfeasibleFlow, "flow vector length does not match edge count");
  for (int e = 0; e < inst.edge_count(); ++e) {
    const auto& value = f.edge_flow[e];
    if (value.is_negative())
      fail(ErrorCode::InfeasibleFlow, "negative flow on edge " + std::to_string(e));
    const auto& cap = inst.edges()[e].cap;
    if (cap && value > *cap)
      fail(ErrorCode::InfeasibleFlow, "flow exceeds claim limit on edge " + std::to_string(e));
  }
  auto outflow = security_outflow(inst, f);
  for (int i = 0; i < inst.security_count(); ++i)
    if (outflow[i] > Rational(inst.securities()[i].value))
      fail(ErrorCode::InfeasibleFlow,
           "outflow of security '" + inst.securities()[i].id + "' exceeds its value");
  if (!f.over_coverage) {
    auto inflow = account_inflow(inst, f);
    for (int j = 0; j < inst.account_count(); ++j)
      if (inflow[j] > Rational(inst.accounts()[j].exposure))
        fail(ErrorCode::InfeasibleFlow,
             "inflow of account '" + inst.accounts()[j].id + "' exceeds its exposure");
  }
}

std::vector<Rational> security_outflow(const Instance& inst, const FlowAssignment& f) {
  std::vector<Rational> out(inst.security_count(), Rational(0));
  for (int e = 0; e < inst.edge_count(); ++e) out[inst.edges()[e].security] += f.edge_flow[e];
  return out;
}

std::vector<Rational> account_inflow(const Instance& inst, const FlowAssignment& f) {
  std::vector<Rational> in(inst.account_count(), Rational(0));
  for (int e = 0; e < inst.edge_count(); ++e) in[inst.edges()[e].account] += f.edge_flow[e];
  return in;
}

std::vector<Rational> surplus_vector(const Instance& inst, const FlowAssignment& f) {
  auto inflow = account_inflow(inst, f);
  std::vector<Rational> s(inst.account_count());
  for (int j = 0; j < inst.account_count(); ++j)
    s[j] = Rational(inst.accounts()[j].exposure) - inflow[j];
  return s;
}

std::vector<Rational> risk_vector(const Instance& inst, const FlowAssignment& f) {
  check_flow(inst, f);
  auto s = surplus_vector(inst, f);
  std::vector<Rational> r(inst.account_count());
  for (int j = 0; j < inst.account_count(); ++j)
    r[j] = s[j] / Rational(inst.accounts()[j].exposure);
  return r;
}

Rational mwsr_objective(const Instance& inst, const FlowAssignment& f) {
  auto r = risk_vector(inst, f);
  Rational total = 0;
  for (int j = 0; j < inst.account_count(); ++j)
    total += Rational(inst.accounts()[j].exposure) * r[j] * r[j];
  return total;
}

Rational total_flow(const FlowAssignment& f) {
  Rational t = 0;
  for (const auto& v : f.edge_flow) t += v;
  return t;
}

}  // namespace colflow
