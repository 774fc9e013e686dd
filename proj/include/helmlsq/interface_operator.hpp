// The interface system: the Hermitian positive definite operator S with
//   <S lambda, mu> = s_h(lambda, mu) = sum_edges int_e [u1(lambda)] conj([u1(mu)]) ds,
// applied matrix-free (forward local solves -> jump traces -> edge mass ->
// conjugate-transposed solves -> coupling adjoint), its right-hand side b
// from the jumps of u2, a Hermitian CG solver, and solution recovery.
//
// Interface dofs: edge e, mode m <= q map to dof e*(q+1)+m. Because the edge
// basis is orthonormal, the coefficient inner product <x,y> = sum conj(y_i) x_i
// equals the L2(gamma) inner product, and restriction to an edge subset is the
// exact L2 projection onto the corresponding subspace.

#ifndef HELMLSQ_INTERFACE_OPERATOR_HPP
#define HELMLSQ_INTERFACE_OPERATOR_HPP

#include <functional>
#include <utility>
#include <vector>

#include "helmlsq/local_solver.hpp"

namespace helmlsq {

class InterfaceSystem {
 public:
  explicit InterfaceSystem(const LocalSystem& locals, int workers = 0)
      : locals_(&locals), workers_(workers) {}

  const LocalSystem& locals() const { return *locals_; }
  long dim() const { return locals_->n_interface_dofs(); }

  // y = S x.
  Eigen::VectorXcd apply(const Eigen::VectorXcd& x, int workers = 0) const;

  // Scattered application for subspace assembly: input as (dof, value) pairs
  // on distinct dofs; the result is written into the dense buffer `out`
  // (size dim(), assumed zero on entry) and every written dof id is appended
  // to `touched`. Only elements within the coupling stencil of the input
  // edges are visited.
  void apply_scattered(const std::vector<std::pair<long, Complex>>& x,
                       Eigen::VectorXcd& out, std::vector<long>& touched) const;

  // b with <b, mu> = l_h(mu), built by the adjoint sweep from -[u2].
  Eigen::VectorXcd build_rhs(const Eigen::VectorXcd& u2, int workers = 0) const;

  // s_h(x, y) = <S x, y>.
  Complex pair(const Eigen::VectorXcd& x, const Eigen::VectorXcd& y) const {
    return y.dot(apply(x));
  }

 private:
  const LocalSystem* locals_;
  int workers_;
};

struct SolveReport {
  long iterations = 0;
  double rel_residual = 0;
  double seconds = 0;
  bool preconditioned = false;
  bool converged = false;
};

using PrecondFn = std::function<Eigen::VectorXcd(const Eigen::VectorXcd&)>;

// Hermitian (preconditioned) conjugate gradients for S lambda = b. Throws on
// a non-real or non-positive <S p, p> (an assembly bug or a non-HPD
// preconditioner); returns converged = false when max_iter is exhausted.
std::pair<Eigen::VectorXcd, SolveReport> cg_solve(const InterfaceSystem& sys,
                                                  const Eigen::VectorXcd& b,
                                                  const PrecondFn& precond, double tol,
                                                  long max_iter);

// u_h = u1(lambda) + u2, elementwise.
Eigen::VectorXcd recover_solution(const LocalSystem& locals, const Eigen::VectorXcd& lambda,
                                  const Eigen::VectorXcd& u2, int workers = 0);

// J = sum_edges || [fields] ||^2_{L2(e)} for a piecewise field.
double jump_functional(const LocalSystem& locals, const Eigen::VectorXcd& fields);

// Dense S by applying the operator to every unit vector (small meshes only).
Eigen::MatrixXcd dense_interface_matrix(const InterfaceSystem& sys);

}  // namespace helmlsq

#endif
