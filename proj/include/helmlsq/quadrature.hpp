#ifndef HELMLSQ_QUADRATURE_HPP
#define HELMLSQ_QUADRATURE_HPP

#include <Eigen/Dense>

namespace helmlsq {

// Gauss-Legendre rule on [0,1]. n points integrate polynomials of degree
// <= 2n-1 exactly. The tensorized 2D rule is taken per axis by the callers.
struct QuadratureRule {
  int n = 0;
  Eigen::VectorXd x;  // nodes in (0,1)
  Eigen::VectorXd w;  // weights, sum to 1
};

QuadratureRule gauss_legendre(int n);

}  // namespace helmlsq

#endif
