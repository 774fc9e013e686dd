// Substructuring preconditioner for the interface system.
//
// Ingredients, per the subdomain layout:
//  - one solver per D_r^0 with the restriction of S to the edges interior to
//    D_r^0 (a principal submatrix, Hermitian positive definite);
//  - one solver per coarse edge on the half-band D~_rl^half;
//  - a coarse space with up to 4(q+1) basis functions per interior coarse
//    vertex: the unit edge functions on D_V, extended harmonically into the
//    subdomain interiors and corrected by energy minimizations on the
//    adjacent half-bands; the coarse matrix is the Galerkin restriction of S.
//
// The application runs the five steps: interior solves, the global residual,
// half-band and coarse corrections, and the harmonic re-extension of the
// interface values into the subdomain interiors. With all restricted
// operators taken from the one Hermitian S, the composite map is Hermitian
// positive definite.

#ifndef HELMLSQ_PRECONDITIONER_HPP
#define HELMLSQ_PRECONDITIONER_HPP

#include <memory>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Sparse>

#include "helmlsq/interface_operator.hpp"

namespace helmlsq {

struct SubspaceSolver {
  std::vector<long> dofs;  // sorted interface dofs of the subspace
  Eigen::SparseMatrix<Complex> matrix;  // restricted S (symmetrized)
  std::unique_ptr<Eigen::SimplicialLLT<Eigen::SparseMatrix<Complex>>> llt;

  bool empty() const { return dofs.empty(); }
  Eigen::VectorXcd solve(const Eigen::VectorXcd& rhs) const { return llt->solve(rhs); }
};

struct CoarseBasisFunction {
  int vertex = 0;  // index into layout.coarse_vertices
  std::vector<std::pair<long, Complex>> entries;  // sorted by dof
};

class Preconditioner {
 public:
  Preconditioner(const InterfaceSystem& sys, const DecompositionLayout& layout,
                 int workers = 0);

  Eigen::VectorXcd apply(const Eigen::VectorXcd& xi) const;
  PrecondFn as_function() const {
    return [this](const Eigen::VectorXcd& v) { return apply(v); };
  }

  const std::vector<SubspaceSolver>& interior_solvers() const { return interior_; }
  const std::vector<SubspaceSolver>& band_solvers() const { return bands_; }
  const std::vector<CoarseBasisFunction>& coarse_basis() const { return coarse_basis_; }
  const Eigen::MatrixXcd& coarse_matrix() const { return Sd_; }
  bool dof_is_interior(long d) const { return interior_mask_[size_t(d)] != 0; }

 private:
  const InterfaceSystem* sys_;
  const DecompositionLayout* layout_;
  int workers_;
  std::vector<SubspaceSolver> interior_;  // per subdomain (may be empty)
  std::vector<SubspaceSolver> bands_;     // per coarse edge
  std::vector<CoarseBasisFunction> coarse_basis_;
  std::vector<std::pair<int, int>> vertex_basis_range_;  // per coarse vertex
  Eigen::MatrixXcd Sd_;
  Eigen::LLT<Eigen::MatrixXcd> Sd_llt_;
  std::vector<char> interior_mask_;

  void build_local_solvers();
  void build_coarse_space();
};

}  // namespace helmlsq

#endif
