#include "helmlsq/local_solver.hpp"

#include <stdexcept>

#include "helmlsq/parallel.hpp"

namespace helmlsq {

namespace {

const Complex kI(0.0, 1.0);

// Per-side assembly state: domain boundary, owned interior edge, or not-owned.
enum SideState : int { kBoundarySide = 0, kOwnerSide = 1, kNeighborSide = 2 };

std::array<int, 4> side_states(const MeshTopology& mesh, int k) {
  std::array<int, 4> st;
  for (int s = 0; s < 4; ++s) {
    if (mesh.edge_of_side[k][s] < 0)
      st[s] = kBoundarySide;
    else
      st[s] = mesh.sign_of_side[k][s] > 0 ? kOwnerSide : kNeighborSide;
  }
  return st;
}

// Edge mass block of one side in the flat (i*(p+1)+j) layout: the trace on a
// horizontal side pins the y-mode through e(j), on a vertical side the x-mode.
void add_edge_mass(const ElementBasis& b, int side, Complex scale, Eigen::MatrixXcd& A) {
  const int n1 = b.n1d();
  const Eigen::VectorXd& e = (side == kLeft || side == kBottom) ? b.e0 : b.e1;
  if (side == kBottom || side == kTop) {
    // delta_{i i'} * e(j) e(j'): diagonal blocks.
    for (int i = 0; i < n1; ++i)
      for (int j = 0; j < n1; ++j)
        for (int j2 = 0; j2 < n1; ++j2) A(i * n1 + j, i * n1 + j2) += scale * e(j) * e(j2);
  } else {
    // e(i) e(i') * delta_{j j'}.
    for (int i = 0; i < n1; ++i)
      for (int i2 = 0; i2 < n1; ++i2)
        for (int j = 0; j < n1; ++j) A(i * n1 + j, i2 * n1 + j) += scale * e(i) * e(i2);
  }
}

// Same structure with a variable coefficient on the side, by 1D quadrature.
void add_edge_mass_coeff(const ElementBasis& b, const MeshTopology& mesh, const Element& el,
                         int side, const QuadratureRule& quad,
                         const std::function<double(double, double)>& coeff, Complex scale,
                         Eigen::MatrixXcd& A) {
  const int n1 = b.n1d();
  const Eigen::VectorXd& e = (side == kLeft || side == kBottom) ? b.e0 : b.e1;
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(n1, n1);  // 1D coeff-weighted Gram
  for (int a = 0; a < quad.n; ++a) {
    double x, y;
    if (side == kBottom || side == kTop) {
      x = el.x0 + mesh.dx * quad.x(a);
      y = (side == kBottom) ? el.y0 : el.y0 + mesh.dy;
    } else {
      x = (side == kLeft) ? el.x0 : el.x0 + mesh.dx;
      y = el.y0 + mesh.dy * quad.x(a);
    }
    const Eigen::VectorXd v = legendre_values(b.p, quad.x(a));
    G += (quad.w(a) * coeff(x, y)) * v * v.transpose();
  }
  // Tangential Gram times endpoint factors of the pinned axis.
  if (side == kBottom || side == kTop) {
    for (int i = 0; i < n1; ++i)
      for (int i2 = 0; i2 < n1; ++i2)
        for (int j = 0; j < n1; ++j)
          for (int j2 = 0; j2 < n1; ++j2)
            A(i * n1 + j, i2 * n1 + j2) += scale * G(i, i2) * e(j) * e(j2);
  } else {
    for (int i = 0; i < n1; ++i)
      for (int i2 = 0; i2 < n1; ++i2)
        for (int j = 0; j < n1; ++j)
          for (int j2 = 0; j2 < n1; ++j2)
            A(i * n1 + j, i2 * n1 + j2) += scale * G(j, j2) * e(i) * e(i2);
  }
}

}  // namespace

LocalSystem::LocalSystem(const MeshTopology& mesh, const ProblemCoefficients& coeffs, int q,
                         int p, int quad_order, int workers)
    : mesh_(&mesh), coeffs_(coeffs), q_(q), basis_(p), workers_(workers) {
  if (q < 1) throw std::invalid_argument("LocalSystem: need q >= 1");
  if (p < q) throw std::invalid_argument("LocalSystem: need p >= q");
  quad_ = gauss_legendre(std::max(quad_order, p + 2));

  const int N = mesh.n_elements();
  ops_.resize(N);
  for (int k = 0; k < N; ++k) ops_[k].element = k;

  if (coeffs_.c_constant) {
    // One kernel per side-state pattern; at most 9 on a uniform grid.
    std::map<std::array<int, 4>, std::shared_ptr<ElementKernel>> cache;
    for (int k = 0; k < N; ++k) {
      const auto key = side_states(mesh, k);
      auto it = cache.find(key);
      if (it == cache.end()) it = cache.emplace(key, build_kernel(k)).first;
      ops_[k].kernel = it->second;
    }
  } else {
    parallel_for(N, workers_, [&](std::ptrdiff_t k) { ops_[k].kernel = build_kernel(int(k)); });
  }
}

std::shared_ptr<ElementKernel> LocalSystem::build_kernel(int k) const {
  const MeshTopology& mesh = *mesh_;
  const Element& el = mesh.elements[k];
  const int n1 = basis_.n1d(), n2 = basis_.n2d(), nq = quad_.n;
  auto kern = std::make_shared<ElementKernel>();
  Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(n2, n2);

  // Stiffness: (dy/dx) Kx (x) My + (dx/dy) Mx (x) Ky with orthonormal masses.
  for (int i = 0; i < n1; ++i)
    for (int i2 = 0; i2 < n1; ++i2)
      for (int j = 0; j < n1; ++j) {
        A(i * n1 + j, i2 * n1 + j) += (mesh.dy / mesh.dx) * basis_.dgram(i, i2);
        A(j * n1 + i, j * n1 + i2) += (mesh.dx / mesh.dy) * basis_.dgram(i, i2);
      }

  // - kappa^2 mass.
  if (coeffs_.c_constant) {
    const double kap = coeffs_.kappa(el.x0, el.y0);
    A.diagonal().array() -= kap * kap * mesh.dx * mesh.dy;
  } else {
    Eigen::MatrixXd V(nq, n1);
    for (int a = 0; a < nq; ++a) V.row(a) = legendre_values(basis_.p, quad_.x(a)).transpose();
    for (int a = 0; a < nq; ++a) {
      Eigen::VectorXd wk(nq);
      for (int b = 0; b < nq; ++b) {
        const double kap =
            coeffs_.kappa(el.x0 + mesh.dx * quad_.x(a), el.y0 + mesh.dy * quad_.x(b));
        wk(b) = quad_.w(b) * kap * kap;
      }
      const Eigen::MatrixXd Ka = V.transpose() * wk.asDiagonal() * V;  // y-mode Gram
      for (int i = 0; i < n1; ++i)
        for (int i2 = 0; i2 < n1; ++i2) {
          const double c = -mesh.dx * mesh.dy * quad_.w(a) * V(a, i) * V(a, i2);
          A.block(i * n1, i2 * n1, n1, n1) += c * Ka;
        }
    }
  }

  // Interior sides: +/- i rho edge mass. Boundary sides: + i kappa edge mass.
  for (int s = 0; s < 4; ++s) {
    const double len = side_length(s);
    if (mesh.edge_of_side[k][s] >= 0) {
      const double sg = mesh.sign_of_side[k][s];
      add_edge_mass(basis_, s, kI * coeffs_.rho * sg * len, A);
    } else if (coeffs_.c_constant) {
      add_edge_mass(basis_, s, kI * coeffs_.kappa(el.x0, el.y0) * len, A);
    } else {
      auto kap = [this](double x, double y) { return coeffs_.kappa(x, y); };
      add_edge_mass_coeff(basis_, mesh, el, s, quad_, kap, kI * len, A);
    }
  }

  kern->A = A;
  kern->lu.compute(A);
  {
    const auto d = kern->lu.matrixLU().diagonal();
    const double dmax = d.cwiseAbs().maxCoeff();
    const double dmin = d.cwiseAbs().minCoeff();
    if (!(dmin > 1e-14 * dmax))
      throw std::runtime_error("assemble_local: singular local matrix on element " +
                               std::to_string(k));
  }

  // Composite multiplier -> trace map.
  const int in = 4 * (q_ + 1), tr = 4 * n1;
  kern->u1_trace = Eigen::MatrixXcd::Zero(tr, in);
  for (int s = 0; s < 4; ++s) {
    if (mesh.edge_of_side[k][s] < 0) continue;
    const double sg = mesh.sign_of_side[k][s];
    const double len = side_length(s);
    for (int m = 0; m <= q_; ++m) {
      Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(n2);
      Eigen::VectorXcd unit = Eigen::VectorXcd::Zero(n1);
      unit(m) = sg * len;
      add_trace_adjoint(basis_, Side(s), unit, rhs);
      const Eigen::VectorXcd sol = kern->lu.solve(rhs);
      for (int s2 = 0; s2 < 4; ++s2)
        kern->u1_trace.block(s2 * n1, s * (q_ + 1) + m, n1, 1) =
            trace_coeffs(basis_, sol, Side(s2));
    }
  }
  return kern;
}

Eigen::VectorXcd LocalSystem::local_load(int k) const {
  const MeshTopology& mesh = *mesh_;
  const Element& el = mesh.elements[k];
  const int n1 = basis_.n1d(), nq = quad_.n;
  Eigen::VectorXcd load = Eigen::VectorXcd::Zero(basis_.n2d());

  Eigen::MatrixXd V(nq, n1);
  for (int a = 0; a < nq; ++a) V.row(a) = legendre_values(basis_.p, quad_.x(a)).transpose();

  // Volume load (f, conj(v)).
  Eigen::MatrixXcd F(nq, nq);
  bool any = false;
  for (int a = 0; a < nq; ++a)
    for (int b = 0; b < nq; ++b) {
      const Complex fv =
          coeffs_.f(el.x0 + mesh.dx * quad_.x(a), el.y0 + mesh.dy * quad_.x(b));
      any = any || (fv != 0.0);
      F(a, b) = quad_.w(a) * quad_.w(b) * fv;
    }
  if (any) {
    const Eigen::MatrixXcd L = V.transpose().cast<Complex>() * F * V.cast<Complex>();
    // L(i, j) multiplies basis (i, j); flatten.
    for (int i = 0; i < n1; ++i)
      for (int j = 0; j < n1; ++j) load(i * n1 + j) += mesh.dx * mesh.dy * L(i, j);
  }

  // Boundary load <g, conj(v)> on sides lying on the domain boundary.
  for (int s = 0; s < 4; ++s) {
    if (mesh.edge_of_side[k][s] >= 0) continue;
    const double len = side_length(s);
    double nx = 0, ny = 0;
    if (s == kLeft) nx = -1;
    if (s == kRight) nx = 1;
    if (s == kBottom) ny = -1;
    if (s == kTop) ny = 1;
    Eigen::VectorXcd gq = Eigen::VectorXcd::Zero(n1);  // 1D modal load
    for (int a = 0; a < nq; ++a) {
      double x, y;
      if (s == kBottom || s == kTop) {
        x = el.x0 + mesh.dx * quad_.x(a);
        y = (s == kBottom) ? el.y0 : el.y0 + mesh.dy;
      } else {
        x = (s == kLeft) ? el.x0 : el.x0 + mesh.dx;
        y = el.y0 + mesh.dy * quad_.x(a);
      }
      gq += quad_.w(a) * coeffs_.g(x, y, nx, ny) * V.row(a).transpose().cast<Complex>();
    }
    Eigen::VectorXcd contrib = Eigen::VectorXcd::Zero(basis_.n2d());
    add_trace_adjoint(basis_, Side(s), gq, contrib);
    load += len * contrib;
  }
  return load;
}

Eigen::VectorXcd LocalSystem::solve_u2(int workers) const {
  const int n2 = basis_.n2d(), N = mesh_->n_elements();
  Eigen::VectorXcd out(Eigen::Index(n2) * N);
  parallel_for(N, workers ? workers : workers_, [&](std::ptrdiff_t k) {
    const Eigen::VectorXcd load = local_load(int(k));
    if (load.isZero(0.0))
      out.segment(k * n2, n2).setZero();
    else
      out.segment(k * n2, n2) = ops_[k].kernel->lu.solve(load);
  });
  return out;
}

Eigen::VectorXcd LocalSystem::gather_lambda(int k, const Eigen::VectorXcd& lambda) const {
  const int me = modes_per_edge();
  Eigen::VectorXcd in = Eigen::VectorXcd::Zero(4 * me);
  for (int s = 0; s < 4; ++s) {
    const int f = mesh_->edge_of_side[k][s];
    if (f >= 0) in.segment(s * me, me) = lambda.segment(Eigen::Index(f) * me, me);
  }
  return in;
}

Eigen::VectorXcd LocalSystem::solve_u1(const Eigen::VectorXcd& lambda, int workers) const {
  if (lambda.size() != n_interface_dofs())
    throw std::invalid_argument("solve_u1: multiplier size mismatch");
  const int n1 = basis_.n1d(), n2 = basis_.n2d(), N = mesh_->n_elements(), me = modes_per_edge();
  Eigen::VectorXcd out(Eigen::Index(n2) * N);
  parallel_for(N, workers ? workers : workers_, [&](std::ptrdiff_t k) {
    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(n2);
    bool any = false;
    for (int s = 0; s < 4; ++s) {
      const int f = mesh_->edge_of_side[k][s];
      if (f < 0) continue;
      Eigen::VectorXcd pad = Eigen::VectorXcd::Zero(n1);
      pad.head(me) = lambda.segment(Eigen::Index(f) * me, me);
      if (pad.isZero(0.0)) continue;
      any = true;
      pad *= mesh_->sign_of_side[k][s] * side_length(s);
      add_trace_adjoint(basis_, Side(s), pad, rhs);
    }
    if (any)
      out.segment(k * n2, n2) = ops_[k].kernel->lu.solve(rhs);
    else
      out.segment(k * n2, n2).setZero();
  });
  return out;
}

Eigen::VectorXcd LocalSystem::jump_on_edge(const Eigen::VectorXcd& fields, int edge) const {
  const int n2 = basis_.n2d();
  const InteriorEdge& f = mesh_->interior_edges[edge];
  const Eigen::VectorXcd co = fields.segment(Eigen::Index(f.owner) * n2, n2);
  const Eigen::VectorXcd cn = fields.segment(Eigen::Index(f.neighbor) * n2, n2);
  return trace_coeffs(basis_, co, Side(f.owner_side)) -
         trace_coeffs(basis_, cn, Side(f.nb_side));
}

Eigen::VectorXcd LocalSystem::solve_u1_adjoint(const Eigen::VectorXcd& w, int workers) const {
  const int n1 = basis_.n1d(), n2 = basis_.n2d(), N = mesh_->n_elements(), me = modes_per_edge();
  const long E = long(mesh_->interior_edges.size());
  if (w.size() != E * n1) throw std::invalid_argument("solve_u1_adjoint: bad trace data size");

  // Per-element conjugate-transposed solves against the signed, mass-weighted
  // trace data, then gather the q+1 leading trace modes per edge.
  Eigen::VectorXcd contrib(Eigen::Index(4) * n1 * N);
  parallel_for(N, workers ? workers : workers_, [&](std::ptrdiff_t k) {
    Eigen::VectorXcd r = Eigen::VectorXcd::Zero(n2);
    bool any = false;
    for (int s = 0; s < 4; ++s) {
      const int f = mesh_->edge_of_side[k][s];
      if (f < 0) continue;
      const InteriorEdge& fe = mesh_->interior_edges[f];
      Eigen::VectorXcd wf = fe.length * w.segment(Eigen::Index(f) * n1, n1);
      if (wf.isZero(0.0)) continue;
      any = true;
      wf *= double(mesh_->sign_of_side[k][s]);
      add_trace_adjoint(basis_, Side(s), wf, r);
    }
    if (!any) {
      contrib.segment(Eigen::Index(4) * n1 * k, 4 * n1).setZero();
      return;
    }
    const Eigen::VectorXcd v = ops_[k].kernel->lu.solve(r.conjugate()).conjugate();
    for (int s = 0; s < 4; ++s)
      contrib.segment(Eigen::Index(4) * n1 * k + s * n1, n1) =
          trace_coeffs(basis_, v, Side(s));
  });

  Eigen::VectorXcd y(E * me);
  parallel_for(E, workers ? workers : workers_, [&](std::ptrdiff_t f) {
    const InteriorEdge& fe = mesh_->interior_edges[f];
    const auto to = contrib.segment(Eigen::Index(4) * n1 * fe.owner + fe.owner_side * n1, n1);
    const auto tn = contrib.segment(Eigen::Index(4) * n1 * fe.neighbor + fe.nb_side * n1, n1);
    y.segment(f * me, me) =
        fe.length * (to.head(me) - tn.head(me));
  });
  return y;
}

}  // namespace helmlsq
