#include "helmlsq/preconditioner.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

#include "helmlsq/parallel.hpp"

namespace helmlsq {

namespace {

std::vector<long> dofs_of_edges(const std::vector<int>& edges, int me) {
  std::vector<long> dofs;
  dofs.reserve(edges.size() * me);
  for (int e : edges)
    for (int m = 0; m < me; ++m) dofs.push_back(long(e) * me + m);
  std::sort(dofs.begin(), dofs.end());
  return dofs;
}

// Dense scatter/reset scratch shared by the assembly sweeps of one worker.
struct Scratch {
  Eigen::VectorXcd buf;
  std::vector<long> touched;
  explicit Scratch(long dim) : buf(Eigen::VectorXcd::Zero(dim)) {}
  void reset() {
    for (long t : touched) buf(t) = 0.0;
    touched.clear();
  }
};

}  // namespace

Preconditioner::Preconditioner(const InterfaceSystem& sys, const DecompositionLayout& layout,
                               int workers)
    : sys_(&sys), layout_(&layout), workers_(workers) {
  interior_mask_.assign(size_t(sys.dim()), 0);
  build_local_solvers();
  build_coarse_space();
}

void Preconditioner::build_local_solvers() {
  const InterfaceSystem& sys = *sys_;
  const LocalSystem& ls = sys.locals();
  const MeshTopology& mesh = ls.mesh();
  const int me = ls.modes_per_edge();
  const DecompositionLayout& L = *layout_;

  const int ns = L.n_subdomains();
  const int nb = int(L.coarse_edges.size());
  interior_.resize(ns);
  bands_.resize(nb);
  for (int r = 0; r < ns; ++r) {
    interior_[r].dofs = dofs_of_edges(edges_inside(mesh, L.interior[r]), me);
    for (long d : interior_[r].dofs) interior_mask_[size_t(d)] = 1;
  }
  for (int b = 0; b < nb; ++b)
    bands_[b].dofs = dofs_of_edges(edges_inside(mesh, L.coarse_edges[b].half), me);

  // Assemble and factor every restricted matrix: columns of S restricted to
  // the subspace, computed by scattered sweeps around each edge.
  const int total = ns + nb;
  const int nworkers = workers_ > 0 ? workers_ : default_workers();
  std::vector<std::unique_ptr<Scratch>> scratch;
  for (int w = 0; w < nworkers; ++w) scratch.emplace_back(std::make_unique<Scratch>(sys.dim()));

  parallel_for_workers(total, nworkers, [&](int w, std::ptrdiff_t idx) {
    SubspaceSolver& sub = idx < ns ? interior_[idx] : bands_[idx - ns];
    if (sub.empty()) return;
    const long n = long(sub.dofs.size());
    std::map<long, int> local;
    for (long i = 0; i < n; ++i) local.emplace(sub.dofs[i], int(i));
    std::vector<Eigen::Triplet<Complex>> trips;
    Scratch& sc = *scratch[w];
    for (long j = 0; j < n; ++j) {
      sys.apply_scattered({{sub.dofs[j], Complex(1.0)}}, sc.buf, sc.touched);
      for (long t : sc.touched) {
        const Complex v = sc.buf(t);
        if (v == 0.0) continue;
        sc.buf(t) = 0.0;
        if (auto it = local.find(t); it != local.end())
          trips.emplace_back(it->second, int(j), v);
      }
      sc.touched.clear();
    }
    Eigen::SparseMatrix<Complex> M(n, n);
    M.setFromTriplets(trips.begin(), trips.end());
    Eigen::SparseMatrix<Complex> Mh = M.adjoint();
    sub.matrix = Complex(0.5) * (M + Mh);
    sub.llt = std::make_unique<Eigen::SimplicialLLT<Eigen::SparseMatrix<Complex>>>();
    sub.llt->compute(sub.matrix);
    if (sub.llt->info() != Eigen::Success)
      throw std::runtime_error("Preconditioner: restricted matrix not positive definite");
  });
}

void Preconditioner::build_coarse_space() {
  const InterfaceSystem& sys = *sys_;
  const LocalSystem& ls = sys.locals();
  const int me = ls.modes_per_edge();
  const DecompositionLayout& L = *layout_;
  const int nv = int(L.coarse_vertices.size());
  vertex_basis_range_.assign(nv, {0, 0});
  if (nv == 0) return;

  // Basis function slots: one per (fine edge of D_V, mode).
  std::vector<int> offset(nv + 1, 0);
  for (int v = 0; v < nv; ++v)
    offset[v + 1] = offset[v] + int(L.coarse_vertices[v].edges_of_element.size()) * me;
  const int nc = offset[nv];
  coarse_basis_.assign(nc, {});
  for (int v = 0; v < nv; ++v) vertex_basis_range_[v] = {offset[v], offset[v + 1]};

  const int nworkers = workers_ > 0 ? workers_ : default_workers();
  std::vector<std::unique_ptr<Scratch>> scratch;
  for (int w = 0; w < nworkers; ++w) scratch.emplace_back(std::make_unique<Scratch>(sys.dim()));

  parallel_for_workers(nv, nworkers, [&](int w, std::ptrdiff_t v) {
    const CoarseVertex& V = L.coarse_vertices[v];
    Scratch& sc = *scratch[w];
    // The four subdomains meeting at the vertex.
    std::vector<int> adj;
    for (int dy = -1; dy <= 0; ++dy)
      for (int dx = -1; dx <= 0; ++dx)
        adj.push_back((V.cvy + dy) * L.nsx + (V.cvx + dx));

    int slot = offset[v];
    for (int e : V.edges_of_element)
      for (int m = 0; m < me; ++m, ++slot) {
        const long dof0 = long(e) * me + m;
        // Initial extension: unit on the D_V edge, zero on the rest of the
        // interface, harmonic in every subdomain interior.
        std::vector<std::pair<long, Complex>> tilde{{dof0, Complex(1.0)}};
        sys.apply_scattered(tilde, sc.buf, sc.touched);
        for (int r : adj) {
          const SubspaceSolver& sub = interior_[r];
          if (sub.empty()) continue;
          Eigen::VectorXcd rhs(sub.dofs.size());
          bool any = false;
          for (size_t i = 0; i < sub.dofs.size(); ++i) {
            rhs(i) = -sc.buf(sub.dofs[i]);
            any = any || (rhs(i) != 0.0);
          }
          if (!any) continue;
          const Eigen::VectorXcd tail = sub.solve(rhs);
          for (size_t i = 0; i < sub.dofs.size(); ++i)
            if (tail(i) != 0.0) tilde.emplace_back(sub.dofs[i], tail(i));
        }
        sc.reset();
        std::sort(tilde.begin(), tilde.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });

        // Half-band energy-minimizing corrections on every coarse edge at V,
        // all driven by the one residual of the initial extension.
        sys.apply_scattered(tilde, sc.buf, sc.touched);
        std::map<long, Complex> accum(tilde.begin(), tilde.end());
        for (int ce : V.coarse_edges) {
          const SubspaceSolver& band = bands_[ce];
          if (band.empty()) continue;
          Eigen::VectorXcd rhs(band.dofs.size());
          for (size_t i = 0; i < band.dofs.size(); ++i) rhs(i) = -sc.buf(band.dofs[i]);
          const Eigen::VectorXcd corr = band.solve(rhs);
          for (size_t i = 0; i < band.dofs.size(); ++i)
            if (corr(i) != 0.0) accum[band.dofs[i]] += corr(i);
        }
        sc.reset();

        CoarseBasisFunction& cb = coarse_basis_[slot];
        cb.vertex = int(v);
        cb.entries.assign(accum.begin(), accum.end());
      }
  });

  // Coarse matrix S_d = Phi^H S Phi, column by column; only vertices within
  // two coarse cells can pair (supports plus the coupling stencil).
  Sd_ = Eigen::MatrixXcd::Zero(nc, nc);
  parallel_for_workers(nc, nworkers, [&](int w, std::ptrdiff_t j) {
    Scratch& sc = *scratch[w];
    const CoarseBasisFunction& cj = coarse_basis_[j];
    sys.apply_scattered(cj.entries, sc.buf, sc.touched);
    const CoarseVertex& Vj = L.coarse_vertices[cj.vertex];
    for (int v = 0; v < nv; ++v) {
      const CoarseVertex& Vi = L.coarse_vertices[v];
      if (std::abs(Vi.cvx - Vj.cvx) > 2 || std::abs(Vi.cvy - Vj.cvy) > 2) continue;
      for (int i = vertex_basis_range_[v].first; i < vertex_basis_range_[v].second; ++i) {
        Complex s = 0;
        for (const auto& [d, val] : coarse_basis_[i].entries) s += std::conj(val) * sc.buf(d);
        Sd_(i, j) = s;
      }
    }
    sc.reset();
  });
  Sd_ = (Complex(0.5) * (Sd_ + Sd_.adjoint())).eval();
  Sd_llt_.compute(Sd_);
  if (Sd_llt_.info() != Eigen::Success)
    throw std::runtime_error(
        "Preconditioner: coarse matrix not positive definite (degenerate coarse supports?)");
}

Eigen::VectorXcd Preconditioner::apply(const Eigen::VectorXcd& xi) const {
  const InterfaceSystem& sys = *sys_;
  const long dim = sys.dim();
  if (xi.size() != dim) throw std::invalid_argument("Preconditioner::apply: size mismatch");
  const int ns = int(interior_.size());
  const int nb = int(bands_.size());
  const int nc = int(coarse_basis_.size());

  // Step 1: interior solves.
  Eigen::VectorXcd lam0 = Eigen::VectorXcd::Zero(dim);
  parallel_for(ns, workers_, [&](std::ptrdiff_t r) {
    const SubspaceSolver& sub = interior_[r];
    if (sub.empty()) return;
    Eigen::VectorXcd rhs(sub.dofs.size());
    for (size_t i = 0; i < sub.dofs.size(); ++i) rhs(i) = xi(sub.dofs[i]);
    const Eigen::VectorXcd sol = sub.solve(rhs);
    for (size_t i = 0; i < sub.dofs.size(); ++i) lam0(sub.dofs[i]) = sol(i);
  });

  // Residual after the interior solves.
  Eigen::VectorXcd r1 = xi - sys.apply(lam0, workers_);

  // Steps 2-3: half-band and coarse corrections of the residual.
  std::vector<Eigen::VectorXcd> bsol(nb);
  parallel_for(nb, workers_, [&](std::ptrdiff_t b) {
    const SubspaceSolver& band = bands_[b];
    if (band.empty()) return;
    Eigen::VectorXcd rhs(band.dofs.size());
    for (size_t i = 0; i < band.dofs.size(); ++i) rhs(i) = r1(band.dofs[i]);
    bsol[b] = band.solve(rhs);
  });
  Eigen::VectorXcd phi = Eigen::VectorXcd::Zero(dim);
  for (int b = 0; b < nb; ++b) {
    const SubspaceSolver& band = bands_[b];
    for (size_t i = 0; i < band.dofs.size(); ++i) phi(band.dofs[i]) += bsol[b](i);
  }
  if (nc > 0) {
    Eigen::VectorXcd c(nc);
    parallel_for(nc, workers_, [&](std::ptrdiff_t i) {
      Complex s = 0;
      for (const auto& [d, val] : coarse_basis_[i].entries) s += std::conj(val) * r1(d);
      c(i) = s;
    });
    const Eigen::VectorXcd y = Sd_llt_.solve(c);
    for (int i = 0; i < nc; ++i)
      for (const auto& [d, val] : coarse_basis_[i].entries) phi(d) += val * y(i);
  }

  // Step 4: keep the interface values, re-extend harmonically inside.
  for (long d = 0; d < dim; ++d)
    if (interior_mask_[size_t(d)]) phi(d) = 0.0;
  Eigen::VectorXcd out = lam0 + phi;
  if (!phi.isZero(0.0)) {
    const Eigen::VectorXcd r2 = sys.apply(phi, workers_);
    parallel_for(ns, workers_, [&](std::ptrdiff_t r) {
      const SubspaceSolver& sub = interior_[r];
      if (sub.empty()) return;
      Eigen::VectorXcd rhs(sub.dofs.size());
      for (size_t i = 0; i < sub.dofs.size(); ++i) rhs(i) = r2(sub.dofs[i]);
      const Eigen::VectorXcd sol = sub.solve(rhs);
      for (size_t i = 0; i < sub.dofs.size(); ++i) out(sub.dofs[i]) -= sol(i);
    });
  }
  return out;
}

}  // namespace helmlsq
