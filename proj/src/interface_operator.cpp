#include "helmlsq/interface_operator.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

#include "helmlsq/parallel.hpp"

namespace helmlsq {

Eigen::VectorXcd InterfaceSystem::apply(const Eigen::VectorXcd& x, int workers) const {
  const LocalSystem& ls = *locals_;
  if (x.size() != dim()) throw std::invalid_argument("InterfaceSystem::apply: size mismatch");
  const MeshTopology& mesh = ls.mesh();
  const int n1 = ls.basis().n1d(), me = ls.modes_per_edge();
  const int N = mesh.n_elements();
  const long E = long(mesh.interior_edges.size());
  if (workers == 0) workers = workers_;

  // Forward: traces of u1 on all four sides of every element.
  Eigen::VectorXcd traces(Eigen::Index(4) * n1 * N);
  parallel_for(N, workers, [&](std::ptrdiff_t k) {
    const Eigen::VectorXcd in = ls.gather_lambda(int(k), x);
    traces.segment(Eigen::Index(4) * n1 * k, 4 * n1).noalias() =
        ls.op(int(k)).kernel->u1_trace * in;
  });

  // Edge mass times trace jumps.
  Eigen::VectorXcd w(E * n1);
  parallel_for(E, workers, [&](std::ptrdiff_t f) {
    const InteriorEdge& fe = mesh.interior_edges[f];
    w.segment(f * n1, n1) =
        fe.length *
        (traces.segment(Eigen::Index(4) * n1 * fe.owner + fe.owner_side * n1, n1) -
         traces.segment(Eigen::Index(4) * n1 * fe.neighbor + fe.nb_side * n1, n1));
  });

  // Adjoint: signed gather of w, conjugate-transposed composite, then the
  // per-edge sum of the two adjacent contributions.
  Eigen::VectorXcd contrib(Eigen::Index(4) * me * N);
  parallel_for(N, workers, [&](std::ptrdiff_t k) {
    Eigen::VectorXcd stack = Eigen::VectorXcd::Zero(4 * n1);
    for (int s = 0; s < 4; ++s) {
      const int f = mesh.edge_of_side[k][s];
      if (f < 0) continue;
      stack.segment(s * n1, n1) =
          double(mesh.sign_of_side[k][s]) * w.segment(Eigen::Index(f) * n1, n1);
    }
    contrib.segment(Eigen::Index(4) * me * k, 4 * me).noalias() =
        ls.op(int(k)).kernel->u1_trace.adjoint() * stack;
  });

  Eigen::VectorXcd y(dim());
  parallel_for(E, workers, [&](std::ptrdiff_t f) {
    const InteriorEdge& fe = mesh.interior_edges[f];
    y.segment(f * me, me) =
        contrib.segment(Eigen::Index(4) * me * fe.owner + fe.owner_side * me, me) +
        contrib.segment(Eigen::Index(4) * me * fe.neighbor + fe.nb_side * me, me);
  });
  return y;
}

void InterfaceSystem::apply_scattered(const std::vector<std::pair<long, Complex>>& x,
                                      Eigen::VectorXcd& out, std::vector<long>& touched) const {
  const LocalSystem& ls = *locals_;
  const MeshTopology& mesh = ls.mesh();
  const int n1 = ls.basis().n1d(), me = ls.modes_per_edge();

  // Gather scattered multipliers into per-element input stacks.
  std::unordered_map<int, Eigen::VectorXcd> in;
  in.reserve(2 * x.size());
  for (const auto& [dof, val] : x) {
    const long f = dof / me;
    const int m = int(dof % me);
    const InteriorEdge& fe = mesh.interior_edges[f];
    for (int which = 0; which < 2; ++which) {
      const int k = which ? fe.neighbor : fe.owner;
      const int s = which ? fe.nb_side : fe.owner_side;
      auto it = in.try_emplace(k, Eigen::VectorXcd::Zero(4 * me)).first;
      it->second(s * me + m) = val;
    }
  }

  // Forward traces on the input elements.
  std::unordered_map<int, Eigen::VectorXcd> tr;
  tr.reserve(in.size());
  for (const auto& [k, stack] : in)
    tr.emplace(k, (ls.op(k).kernel->u1_trace * stack).eval());

  // Active edges: edges of any input element.
  std::unordered_map<long, Eigen::VectorXcd> w;
  w.reserve(8 * in.size());
  for (const auto& [k, stack] : in) {
    for (int s = 0; s < 4; ++s) {
      const int f = mesh.edge_of_side[k][s];
      if (f < 0 || w.count(f)) continue;
      const InteriorEdge& fe = mesh.interior_edges[f];
      Eigen::VectorXcd jf = Eigen::VectorXcd::Zero(n1);
      if (auto it = tr.find(fe.owner); it != tr.end())
        jf += it->second.segment(fe.owner_side * n1, n1);
      if (auto it = tr.find(fe.neighbor); it != tr.end())
        jf -= it->second.segment(fe.nb_side * n1, n1);
      w.emplace(f, (fe.length * jf).eval());
    }
  }

  // Adjoint on every element adjacent to an active edge.
  std::unordered_map<int, Eigen::VectorXcd> contrib;
  contrib.reserve(2 * w.size());
  for (const auto& [f, wf] : w) {
    const InteriorEdge& fe = mesh.interior_edges[f];
    for (int k : {fe.owner, fe.neighbor}) {
      if (contrib.count(k)) continue;
      Eigen::VectorXcd stack = Eigen::VectorXcd::Zero(4 * n1);
      bool any = false;
      for (int s = 0; s < 4; ++s) {
        const int g = mesh.edge_of_side[k][s];
        if (g < 0) continue;
        if (auto it = w.find(g); it != w.end()) {
          stack.segment(s * n1, n1) = double(mesh.sign_of_side[k][s]) * it->second;
          any = true;
        }
      }
      if (any)
        contrib.emplace(k, (ls.op(k).kernel->u1_trace.adjoint() * stack).eval());
    }
  }

  // Scatter: every edge of a contributing element receives output.
  for (const auto& [k, ck] : contrib) {
    for (int s = 0; s < 4; ++s) {
      const int f = mesh.edge_of_side[k][s];
      if (f < 0) continue;
      const auto piece = ck.segment(s * me, me);
      if (piece.isZero(0.0)) continue;
      const long base = long(f) * me;
      for (int m = 0; m < me; ++m) {
        if (out(base + m) == 0.0) touched.push_back(base + m);
        out(base + m) += piece(m);
      }
    }
  }
}

Eigen::VectorXcd InterfaceSystem::build_rhs(const Eigen::VectorXcd& u2, int workers) const {
  const LocalSystem& ls = *locals_;
  const MeshTopology& mesh = ls.mesh();
  const int n1 = ls.basis().n1d();
  const long E = long(mesh.interior_edges.size());
  if (workers == 0) workers = workers_;
  Eigen::VectorXcd w(E * n1);
  parallel_for(E, workers, [&](std::ptrdiff_t f) {
    w.segment(f * n1, n1) = -ls.jump_on_edge(u2, int(f));
  });
  return ls.solve_u1_adjoint(w, workers);
}

std::pair<Eigen::VectorXcd, SolveReport> cg_solve(const InterfaceSystem& sys,
                                                  const Eigen::VectorXcd& b,
                                                  const PrecondFn& precond, double tol,
                                                  long max_iter) {
  const auto t0 = std::chrono::steady_clock::now();
  SolveReport rep;
  rep.preconditioned = bool(precond);
  Eigen::VectorXcd x = Eigen::VectorXcd::Zero(b.size());
  const double bnorm = b.norm();
  auto elapsed = [&t0] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };
  if (bnorm == 0.0) {
    rep.converged = true;
    rep.seconds = elapsed();
    return {x, rep};
  }

  const auto precond_dot = [&](const Eigen::VectorXcd& rr, const Eigen::VectorXcd& zz) {
    const Complex rz = rr.dot(zz);
    if (precond && (!(std::real(rz) > 0.0) ||
                    std::abs(std::imag(rz)) > 1e-11 * std::max(1.0, std::abs(std::real(rz)))))
      throw std::runtime_error("cg_solve: <r, K^{-1}r> not real positive (preconditioner not HPD?)");
    return rz;
  };
  Eigen::VectorXcd r = b;
  Eigen::VectorXcd z = precond ? precond(r) : r;
  Eigen::VectorXcd p = z;
  Complex rz = precond_dot(r, z);
  for (long it = 1; it <= max_iter; ++it) {
    const Eigen::VectorXcd q = sys.apply(p);
    const Complex pq = p.dot(q);
    if (!(std::real(pq) > 0.0) ||
        std::abs(std::imag(pq)) > 1e-13 * std::max(1.0, std::abs(std::real(pq))) * 100.0)
      throw std::runtime_error("cg_solve: <Sp,p> not real positive (operator not HPD?)");
    const Complex alpha = rz / pq;
    x += alpha * p;
    r -= alpha * q;
    rep.iterations = it;
    rep.rel_residual = r.norm() / bnorm;
    if (rep.rel_residual <= tol) {
      rep.converged = true;
      break;
    }
    z = precond ? precond(r) : r;
    const Complex rz_new = precond_dot(r, z);
    const Complex beta = rz_new / rz;
    rz = rz_new;
    p = z + beta * p;
  }
  rep.seconds = elapsed();
  return {x, rep};
}

Eigen::VectorXcd recover_solution(const LocalSystem& locals, const Eigen::VectorXcd& lambda,
                                  const Eigen::VectorXcd& u2, int workers) {
  return locals.solve_u1(lambda, workers) + u2;
}

double jump_functional(const LocalSystem& locals, const Eigen::VectorXcd& fields) {
  const MeshTopology& mesh = locals.mesh();
  double J = 0;
  for (long f = 0; f < long(mesh.interior_edges.size()); ++f)
    J += mesh.interior_edges[f].length * locals.jump_on_edge(fields, int(f)).squaredNorm();
  return J;
}

Eigen::MatrixXcd dense_interface_matrix(const InterfaceSystem& sys) {
  const long n = sys.dim();
  Eigen::MatrixXcd S(n, n);
  for (long j = 0; j < n; ++j) {
    Eigen::VectorXcd e = Eigen::VectorXcd::Zero(n);
    e(j) = 1.0;
    S.col(j) = sys.apply(e);
  }
  return S;
}

}  // namespace helmlsq
