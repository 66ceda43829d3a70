#include "colflow/qp_form.hpp"

namespace colflow {

QpStandardForm qp_standard_form(const Instance& inst) {
  const int m = inst.edge_count();
  const int n_sec = inst.security_count();
  const int n_acct = inst.account_count();

  QpStandardForm qp;
  qp.k = MatrixR::Zero(n_acct, m);
  qp.v = MatrixR::Zero(n_sec, m);
  for (int e = 0; e < m; ++e) {
    qp.k(inst.edges()[e].account, e) = Rational(1);
    qp.v(inst.edges()[e].security, e) = Rational(1);
  }

  MatrixR weighted = MatrixR::Zero(n_acct, m);
  for (int j = 0; j < n_acct; ++j) {
    Rational inv_exposure = Rational(1) / Rational(inst.accounts()[j].exposure);
    for (int e = 0; e < m; ++e) weighted(j, e) = qp.k(j, e) * inv_exposure;
  }
  qp.qp_p = Rational(2) * (qp.k.transpose() * weighted);

  qp.q = VectorR::Constant(m, Rational(-2));

  int cap_rows = 0;
  for (const auto& edge : inst.edges())
    if (edge.cap) ++cap_rows;
  qp.g = MatrixR::Zero(m + n_sec + n_acct + cap_rows, m);
  qp.h = VectorR::Zero(m + n_sec + n_acct + cap_rows);
  for (int e = 0; e < m; ++e) {
    qp.g(e, e) = Rational(-1);
    qp.h(e) = Rational(0);
  }
  qp.g.block(m, 0, n_sec, m) = qp.v;
  for (int i = 0; i < n_sec; ++i) qp.h(m + i) = Rational(inst.securities()[i].value);
  qp.g.block(m + n_sec, 0, n_acct, m) = qp.k;
  for (int j = 0; j < n_acct; ++j) qp.h(m + n_sec + j) = Rational(inst.accounts()[j].exposure);
  int row = m + n_sec + n_acct;
  for (int e = 0; e < m; ++e) {
    if (!inst.edges()[e].cap) continue;
    qp.g(row, e) = Rational(1);
    qp.h(row) = *inst.edges()[e].cap;
    ++row;
  }

  qp.constant = Rational(inst.total_exposure());
  return qp;
}

Rational qp_objective(const QpStandardForm& qp, const VectorR& x) {
  Rational quadratic = (x.transpose() * qp.qp_p * x)(0, 0);
  Rational linear = (qp.q.transpose() * x)(0, 0);
  return quadratic / Rational(2) + linear + qp.constant;
}

VectorR to_rational_vector(const std::vector<Rational>& values) {
  VectorR x(static_cast<Eigen::Index>(values.size()));
  for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = values[i];
  return x;
}

Eigen::MatrixXd to_double_matrix(const MatrixR& m) {
  Eigen::MatrixXd out(m.rows(), m.cols());
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) out(r, c) = m(r, c).to_double();
  return out;
}

Eigen::VectorXd to_double_vector(const VectorR& v) {
  Eigen::VectorXd out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) out(i) = v(i).to_double();
  return out;
}

}  // namespace colflow
