// Per-element discrete Helmholtz problems with impedance coupling.
//
// On each element the sesquilinear form is
//   a(v,w) = (grad v, grad conj(w)) - (kappa^2 v, conj(w))
//            +/- i rho <v, conj(w)> on interior sides (+ on owned sides)
//            + i <kappa v, conj(w)> on domain-boundary sides,
// and the two local solves of the splitting u = u1(lambda) + u2 are
//   a(u1, v) = +/- <lambda, conj(v)>,   a(u2, v) = (f, conj(v)) + <g, conj(v)>.
//
// The assembled matrix is complex symmetric (A = A^T), so the conjugate-
// transposed solves needed by the adjoint sweeps reuse the same LU:
// A^{-H} b = conj(A^{-1} conj(b)).
//
// ElementKernel additionally stores the composite map
//   u1_trace : stacked incoming edge coefficients (4 sides x (q+1))
//           -> stacked degree-p traces of u1 (4 sides x (p+1)),
// with the ownership sign and the edge length of the load pairing folded in.
// One application of the interface operator then costs one small matvec with
// u1_trace and one with its adjoint per element. Elements with identical
// geometry, sign pattern and constant wave number share one kernel.

#ifndef HELMLSQ_LOCAL_SOLVER_HPP
#define HELMLSQ_LOCAL_SOLVER_HPP

#include <array>
#include <map>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "helmlsq/element_basis.hpp"
#include "helmlsq/geometry.hpp"
#include "helmlsq/problem.hpp"
#include "helmlsq/quadrature.hpp"

namespace helmlsq {

struct ElementKernel {
  Eigen::MatrixXcd A;                    // local matrix (kept for oracles)
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu;
  Eigen::MatrixXcd u1_trace;             // 4(p+1) x 4(q+1)
};

struct LocalOperator {
  int element = 0;
  std::shared_ptr<const ElementKernel> kernel;
};

// All local operators of a mesh plus the shared discretization data.
class LocalSystem {
 public:
  LocalSystem(const MeshTopology& mesh, const ProblemCoefficients& coeffs, int q, int p,
              int quad_order = 0, int workers = 0);

  const MeshTopology& mesh() const { return *mesh_; }
  const ElementBasis& basis() const { return basis_; }
  const ProblemCoefficients& coeffs() const { return coeffs_; }
  const QuadratureRule& quad() const { return quad_; }
  int q() const { return q_; }
  int p() const { return basis_.p; }
  int modes_per_edge() const { return q_ + 1; }
  int n2d() const { return basis_.n2d(); }
  long n_interface_dofs() const { return count_interface_dofs(*mesh_, q_); }
  const LocalOperator& op(int k) const { return ops_[k]; }
  double side_length(int side) const { return (side < 2) ? mesh_->dy : mesh_->dx; }

  // u2 per element: A^{-1} (volume load of f + boundary load of g).
  Eigen::VectorXcd solve_u2(int workers = 0) const;

  // u1(lambda) per element; linear in lambda and local to the elements whose
  // sides carry nonzero multipliers.
  Eigen::VectorXcd solve_u1(const Eigen::VectorXcd& lambda, int workers = 0) const;

  // Adjoint of (trace jumps of solve_u1) against per-edge degree-p data w,
  // including the edge mass: returns y with <y, mu> = sum_e int_e w conj([u1(mu)]).
  Eigen::VectorXcd solve_u1_adjoint(const Eigen::VectorXcd& w, int workers = 0) const;

  // Stacked incoming multipliers of one element (zeros on boundary sides).
  Eigen::VectorXcd gather_lambda(int k, const Eigen::VectorXcd& lambda) const;

  // Degree-p trace-jump coefficients of a piecewise field on an interior edge.
  Eigen::VectorXcd jump_on_edge(const Eigen::VectorXcd& fields, int edge) const;

 private:
  const MeshTopology* mesh_;
  ProblemCoefficients coeffs_;
  int q_;
  ElementBasis basis_;
  QuadratureRule quad_;
  std::vector<LocalOperator> ops_;
  int workers_;

  std::shared_ptr<ElementKernel> build_kernel(int k) const;
  Eigen::VectorXcd local_load(int k) const;
};

}  // namespace helmlsq

#endif
