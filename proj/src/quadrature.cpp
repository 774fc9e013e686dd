#include "helmlsq/quadrature.hpp"

#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace helmlsq {

// Golub-Welsch: nodes are eigenvalues of the Jacobi matrix of the Legendre
// recurrence, weights come from the first components of the eigenvectors.
QuadratureRule gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: need n >= 1");
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double b = k / std::sqrt(4.0 * k * k - 1.0);
    J(k, k - 1) = b;
    J(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  QuadratureRule rule;
  rule.n = n;
  rule.x.resize(n);
  rule.w.resize(n);
  for (int i = 0; i < n; ++i) {
    const double t = es.eigenvalues()(i);            // node on [-1,1]
    const double v0 = es.eigenvectors()(0, i);
    rule.x(i) = 0.5 * (t + 1.0);                     // map to [0,1]
    rule.w(i) = v0 * v0;                             // 2*v0^2, then /2 for [0,1]
  }
  return rule;
}

}  // namespace helmlsq
