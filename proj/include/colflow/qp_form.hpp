#pragma once

#include <Eigen/Core>

#include "colflow/instance.hpp"
#include "colflow/rational.hpp"

namespace Eigen {

template <>
struct NumTraits<colflow::Rational> {
  using Real = colflow::Rational;
  using NonInteger = colflow::Rational;
  using Nested = colflow::Rational;
  using Literal = colflow::Rational;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 8,
    AddCost = 60,
    MulCost = 60,
  };
  static inline Real epsilon() { return Real(0); }
  static inline Real dummy_precision() { return Real(0); }
  static inline int digits10() { return 0; }
};

}  // namespace Eigen

namespace colflow {

using MatrixR = Eigen::Matrix<Rational, Eigen::Dynamic, Eigen::Dynamic>;
using VectorR = Eigen::Matrix<Rational, Eigen::Dynamic, 1>;

/// The balancing objective and constraints in standard quadratic-program
/// form over the edge-flow vector x:
///
///   minimize 1/2 x^T qp_P x + q^T x   subject to G x <= h,
///
/// where qp_P = 2 K^T diag(1/e_j) K, q = -2*1, G stacks (-I; V; K) plus one
/// row per claim limit, and the dropped constant is sum_j e_j. K and V are
/// the account- and security-incidence 0/1 matrices. For every flow vector,
/// 1/2 x^T qp_P x + q^T x + constant equals sum_j e_j r_j^2 exactly.
struct QpStandardForm {
  MatrixR qp_p;  // m x m, symmetric PSD
  VectorR q;     // m
  MatrixR g;     // (m + |S| + |A| + #caps) x m
  VectorR h;
  MatrixR k;  // |A| x m
  MatrixR v;  // |S| x m
  Rational constant;
};

QpStandardForm qp_standard_form(const Instance& inst);

/// 1/2 x^T qp_P x + q^T x + constant, exact.
Rational qp_objective(const QpStandardForm& qp, const VectorR& x);

VectorR to_rational_vector(const std::vector<Rational>& values);
Eigen::MatrixXd to_double_matrix(const MatrixR& m);
Eigen::VectorXd to_double_vector(const VectorR& v);

}  // namespace colflow
