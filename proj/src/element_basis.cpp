#include "helmlsq/element_basis.hpp"

#include <stdexcept>

namespace helmlsq {

ElementBasis::ElementBasis(int p_) : p(p_) {
  if (p < 1) throw std::invalid_argument("ElementBasis: need p >= 1");
  e0 = legendre_values(p, 0.0);
  e1 = legendre_values(p, 1.0);
  dgram = Eigen::MatrixXd::Zero(p + 1, p + 1);
  const QuadratureRule quad = gauss_legendre(p + 2);
  for (int a = 0; a < quad.n; ++a) {
    const Eigen::VectorXd d = legendre_derivatives(p, quad.x(a));
    dgram += quad.w(a) * d * d.transpose();
  }
}

Eigen::VectorXcd trace_coeffs(const ElementBasis& b, const Eigen::VectorXcd& c, Side s) {
  const auto M = coeff_matrix(b, c);
  switch (s) {
    case kLeft: return M * b.e0.cast<Complex>();
    case kRight: return M * b.e1.cast<Complex>();
    case kBottom: return M.transpose() * b.e0.cast<Complex>();
    default: return M.transpose() * b.e1.cast<Complex>();
  }
}

void add_trace_adjoint(const ElementBasis& b, Side s, const Eigen::VectorXcd& w,
                       Eigen::VectorXcd& c) {
  auto M = coeff_matrix(b, c);
  switch (s) {
    case kLeft: M.noalias() += w * b.e0.transpose().cast<Complex>(); break;
    case kRight: M.noalias() += w * b.e1.transpose().cast<Complex>(); break;
    case kBottom: M.noalias() += b.e0.cast<Complex>() * w.transpose(); break;
    default: M.noalias() += b.e1.cast<Complex>() * w.transpose(); break;
  }
}

Complex eval_field(const ElementBasis& b, const Eigen::VectorXcd& c, double xi, double eta) {
  const auto M = coeff_matrix(b, c);
  const Eigen::VectorXd lx = legendre_values(b.p, xi);
  const Eigen::VectorXd ly = legendre_values(b.p, eta);
  return ly.cast<Complex>().dot(M * lx.cast<Complex>());
}

}  // namespace helmlsq
