// Tensor-product element basis on the reference square [0,1]^2.
//
// The 1D family is the orthonormal shifted Legendre basis, so the element
// mass matrix on the reference square is the identity and the restriction of
// an element function to an edge is exactly a degree-p polynomial in the
// global edge parameter whose coefficients come out of a one-dimensional
// contraction (the trace map below). Local coefficient layout: the function
// is sum_{i,j} c_{ij} L_i(x) L_j(y) with flat index n = i*(p+1)+j.

#ifndef HELMLSQ_ELEMENT_BASIS_HPP
#define HELMLSQ_ELEMENT_BASIS_HPP

#include <Eigen/Dense>

#include "helmlsq/polynomials.hpp"
#include "helmlsq/quadrature.hpp"

namespace helmlsq {

// Reference-element sides; edges of horizontal sides are parametrized by x,
// vertical sides by y, both in the increasing direction (the global mesh
// orientation, shared by the two elements of an interior edge).
enum Side : int { kLeft = 0, kRight = 1, kBottom = 2, kTop = 3 };

struct ElementBasis {
  int p = 1;
  Eigen::VectorXd e0;     // L_n(0), n = 0..p
  Eigen::VectorXd e1;     // L_n(1)
  Eigen::MatrixXd dgram;  // 1D derivative Gram: int_0^1 L_i' L_j' dx

  explicit ElementBasis(int p);
  int n1d() const { return p + 1; }
  int n2d() const { return (p + 1) * (p + 1); }
};

// View of a flat coefficient vector as the (y-mode) x (x-mode) matrix M with
// M(j, i) = c_{ij}; all trace/evaluation formulas below contract against it.
template <typename Vec>
auto coeff_matrix(const ElementBasis& b, Vec& c) {
  using Scalar = std::remove_const_t<typename Vec::Scalar>;
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using MapT = std::conditional_t<std::is_const_v<Vec>, Eigen::Map<const Mat>, Eigen::Map<Mat>>;
  return MapT(c.derived().data(), b.n1d(), b.n1d());
}

// Degree-p trace coefficients of the element function on one side.
Eigen::VectorXcd trace_coeffs(const ElementBasis& b, const Eigen::VectorXcd& c, Side s);

// c += (adjoint of the trace map on side s) applied to w.
void add_trace_adjoint(const ElementBasis& b, Side s, const Eigen::VectorXcd& w,
                       Eigen::VectorXcd& c);

// Point evaluation of the element function at reference coordinates.
Complex eval_field(const ElementBasis& b, const Eigen::VectorXcd& c, double xi, double eta);

}  // namespace helmlsq

#endif
