#include "helmlsq/geometry.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

#include "helmlsq/element_basis.hpp"
#include "json.hpp"

namespace helmlsq {

MeshTopology build_mesh(Point lo, Point hi, int nx, int ny) {
  if (nx < 1 || ny < 1) throw std::invalid_argument("build_mesh: element counts must be >= 1");
  if (!(hi.x > lo.x) || !(hi.y > lo.y))
    throw std::invalid_argument("build_mesh: degenerate rectangle");
  MeshTopology m;
  m.lo = lo;
  m.hi = hi;
  m.nx = nx;
  m.ny = ny;
  m.dx = (hi.x - lo.x) / nx;
  m.dy = (hi.y - lo.y) / ny;
  const double ar = std::max(m.dx / m.dy, m.dy / m.dx);
  if (ar > 2.0 + 1e-12) throw std::invalid_argument("build_mesh: cell aspect ratio exceeds 2");
  m.h = std::max(m.dx, m.dy);

  m.elements.resize(size_t(nx) * ny);
  m.edge_of_side.assign(size_t(nx) * ny, {-1, -1, -1, -1});
  m.sign_of_side.assign(size_t(nx) * ny, {0, 0, 0, 0});
  for (int iy = 0; iy < ny; ++iy)
    for (int ix = 0; ix < nx; ++ix) {
      Element& e = m.elements[m.element_id(ix, iy)];
      e.ix = ix;
      e.iy = iy;
      e.x0 = lo.x + ix * m.dx;
      e.y0 = lo.y + iy * m.dy;
    }

  // Vertical edges first (between horizontal neighbors), then horizontal.
  for (int iy = 0; iy < ny; ++iy)
    for (int ix = 0; ix + 1 < nx; ++ix) {
      InteriorEdge f;
      f.neighbor = m.element_id(ix, iy);
      f.owner = m.element_id(ix + 1, iy);
      f.owner_side = kLeft;
      f.nb_side = kRight;
      f.vertical = true;
      f.length = m.dy;
      f.start = {lo.x + (ix + 1) * m.dx, lo.y + iy * m.dy};
      const int id = int(m.interior_edges.size());
      m.interior_edges.push_back(f);
      m.edge_of_side[f.owner][kLeft] = id;
      m.edge_of_side[f.neighbor][kRight] = id;
      m.sign_of_side[f.owner][kLeft] = +1;
      m.sign_of_side[f.neighbor][kRight] = -1;
    }
  for (int iy = 0; iy + 1 < ny; ++iy)
    for (int ix = 0; ix < nx; ++ix) {
      InteriorEdge f;
      f.neighbor = m.element_id(ix, iy);
      f.owner = m.element_id(ix, iy + 1);
      f.owner_side = kBottom;
      f.nb_side = kTop;
      f.vertical = false;
      f.length = m.dx;
      f.start = {lo.x + ix * m.dx, lo.y + (iy + 1) * m.dy};
      const int id = int(m.interior_edges.size());
      m.interior_edges.push_back(f);
      m.edge_of_side[f.owner][kBottom] = id;
      m.edge_of_side[f.neighbor][kTop] = id;
      m.sign_of_side[f.owner][kBottom] = +1;
      m.sign_of_side[f.neighbor][kTop] = -1;
    }

  for (int iy = 0; iy < ny; ++iy) {
    m.boundary_edges.push_back({m.element_id(0, iy), kLeft, m.dy,
                                {lo.x, lo.y + iy * m.dy}, -1.0, 0.0});
    m.boundary_edges.push_back({m.element_id(nx - 1, iy), kRight, m.dy,
                                {hi.x, lo.y + iy * m.dy}, 1.0, 0.0});
  }
  for (int ix = 0; ix < nx; ++ix) {
    m.boundary_edges.push_back({m.element_id(ix, 0), kBottom, m.dx,
                                {lo.x + ix * m.dx, lo.y}, 0.0, -1.0});
    m.boundary_edges.push_back({m.element_id(ix, ny - 1), kTop, m.dx,
                                {lo.x + ix * m.dx, hi.y}, 0.0, 1.0});
  }
  return m;
}

long count_interface_dofs(const MeshTopology& mesh, int q) {
  if (q < 1) throw std::invalid_argument("count_interface_dofs: need q >= 1");
  return long(q + 1) * long(mesh.interior_edges.size());
}

namespace {

// Subdomain grid coordinates of an element.
inline int sub_of(const MeshTopology& m, int elem, int n0, int nsx) {
  const int ix = m.elements[elem].ix, iy = m.elements[elem].iy;
  return (iy / n0) * nsx + (ix / n0);
}

}  // namespace

DecompositionLayout build_decomposition(const MeshTopology& mesh, int n0) {
  if (n0 < 2) throw std::invalid_argument("build_decomposition: subdomain must be >= 2x2 elements");
  if (mesh.nx % n0 != 0 || mesh.ny % n0 != 0)
    throw std::invalid_argument("build_decomposition: grid not divisible by subdomain size");
  DecompositionLayout L;
  L.n0 = n0;
  L.nsx = mesh.nx / n0;
  L.nsy = mesh.ny / n0;
  L.d = n0 * std::max(mesh.dx, mesh.dy);
  const int ns = L.nsx * L.nsy;
  L.subdomains.resize(ns);
  L.boundary_layer.resize(ns);
  L.interior.resize(ns);
  L.subdomain_of_element.resize(mesh.n_elements());
  L.in_interface.assign(mesh.n_elements(), 0);

  for (int e = 0; e < mesh.n_elements(); ++e) {
    const int r = sub_of(mesh, e, n0, L.nsx);
    L.subdomain_of_element[e] = r;
    L.subdomains[r].push_back(e);
    const int ix = mesh.elements[e].ix, iy = mesh.elements[e].iy;
    const int rx = ix / n0, ry = iy / n0;
    // D_r^b: elements touching the right / lower boundary of dD_r \ dOmega.
    const bool right_layer = (ix == (rx + 1) * n0 - 1) && (rx != L.nsx - 1);
    const bool lower_layer = (iy == ry * n0) && (ry != 0);
    if (right_layer || lower_layer) {
      L.boundary_layer[r].push_back(e);
      L.in_interface[e] = 1;
    } else {
      L.interior[r].push_back(e);
    }
  }

  // Interior coarse vertices and their D_V elements.
  for (int cvy = 1; cvy < L.nsy; ++cvy)
    for (int cvx = 1; cvx < L.nsx; ++cvx) {
      CoarseVertex V;
      V.cvx = cvx;
      V.cvy = cvy;
      V.element = mesh.element_id(cvx * n0 - 1, cvy * n0);
      for (int s = 0; s < 4; ++s) {
        const int f = mesh.edge_of_side[V.element][s];
        if (f >= 0) V.edges_of_element.push_back(f);
      }
      L.coarse_vertices.push_back(V);
    }
  auto vertex_index = [&](int cvx, int cvy) -> int {
    if (cvx < 1 || cvx >= L.nsx || cvy < 1 || cvy >= L.nsy) return -1;
    return (cvy - 1) * (L.nsx - 1) + (cvx - 1);
  };

  // Vertical coarse edges: D_rl is the strip touching from the left, i.e. the
  // right column of the left subdomain; the element at the lower endpoint is
  // excluded when that endpoint is an interior coarse vertex (it is a D_V).
  const int half = [&] {  // element layers within d/2 of a coarse edge
    int k = 0;
    while (2 * (k + 1) < n0) ++k;
    // At least one layer on the far side: every edge between a subdomain
    // interior and the interface layer must lie inside some half band.
    return std::max(k, 1);  // layers 1..k on the far side, 0..k on the near side
  }();
  for (int ry = 0; ry < L.nsy; ++ry)
    for (int rx = 0; rx + 1 < L.nsx; ++rx) {
      CoarseEdge ce;
      ce.vertical = true;
      ce.l = ry * L.nsx + rx;
      ce.r = ry * L.nsx + rx + 1;
      const int col = (rx + 1) * n0 - 1;
      const bool skip_bottom = vertex_index(rx + 1, ry) >= 0;
      for (int iy = ry * n0 + (skip_bottom ? 1 : 0); iy < (ry + 1) * n0; ++iy)
        ce.strip.push_back(mesh.element_id(col, iy));
      ce.half = ce.strip;
      for (int e : L.interior[ce.l]) {
        const int k = col - mesh.elements[e].ix;  // >= 1
        if (k <= half) ce.half.push_back(e);
      }
      for (int e : L.interior[ce.r]) {
        const int k = mesh.elements[e].ix - (col + 1);  // >= 0
        if (k <= half) ce.half.push_back(e);
      }
      const int id = int(L.coarse_edges.size());
      L.coarse_edges.push_back(ce);
      for (int cvy : {ry, ry + 1}) {
        const int vi = vertex_index(rx + 1, cvy);
        if (vi >= 0) L.coarse_vertices[vi].coarse_edges.push_back(id);
      }
    }
  // Horizontal coarse edges: strip touches from above (bottom row of the
  // upper subdomain); the right-endpoint element is excluded when interior.
  for (int ry = 0; ry + 1 < L.nsy; ++ry)
    for (int rx = 0; rx < L.nsx; ++rx) {
      CoarseEdge ce;
      ce.vertical = false;
      ce.l = ry * L.nsx + rx;          // below
      ce.r = (ry + 1) * L.nsx + rx;    // above (carries the strip)
      const int row = (ry + 1) * n0;
      const bool skip_right = vertex_index(rx + 1, ry + 1) >= 0;
      for (int ix = rx * n0; ix < (rx + 1) * n0 - (skip_right ? 1 : 0); ++ix)
        ce.strip.push_back(mesh.element_id(ix, row));
      ce.half = ce.strip;
      for (int e : L.interior[ce.r]) {
        const int k = mesh.elements[e].iy - row;  // >= 1
        if (k <= half) ce.half.push_back(e);
      }
      for (int e : L.interior[ce.l]) {
        const int k = (row - 1) - mesh.elements[e].iy;  // >= 0
        if (k <= half) ce.half.push_back(e);
      }
      const int id = int(L.coarse_edges.size());
      L.coarse_edges.push_back(ce);
      for (int cvx : {rx, rx + 1}) {
        const int vi = vertex_index(cvx, ry + 1);
        if (vi >= 0) L.coarse_vertices[vi].coarse_edges.push_back(id);
      }
    }
  return L;
}

std::vector<int> edges_inside(const MeshTopology& mesh, const std::vector<int>& elems) {
  std::vector<char> in(mesh.n_elements(), 0);
  for (int e : elems) in[e] = 1;
  std::vector<int> out;
  for (int e : elems)
    for (int s = 0; s < 4; ++s) {
      const int f = mesh.edge_of_side[e][s];
      if (f < 0) continue;
      const InteriorEdge& edge = mesh.interior_edges[f];
      // Count each edge once, from its owner.
      if (edge.owner == e && in[edge.neighbor]) out.push_back(f);
    }
  std::sort(out.begin(), out.end());
  return out;
}

void dump_mesh_json(const MeshTopology& mesh, const DecompositionLayout* layout,
                    const std::string& path) {
  nlohmann::json j;
  j["domain"] = {{"lo", {mesh.lo.x, mesh.lo.y}}, {"hi", {mesh.hi.x, mesh.hi.y}}};
  j["nx"] = mesh.nx;
  j["ny"] = mesh.ny;
  j["h"] = mesh.h;
  auto& elems = j["elements"] = nlohmann::json::array();
  for (const auto& e : mesh.elements) elems.push_back({e.ix, e.iy});
  auto& edges = j["interior_edges"] = nlohmann::json::array();
  for (const auto& f : mesh.interior_edges)
    edges.push_back({{"owner", f.owner}, {"neighbor", f.neighbor}, {"vertical", f.vertical}});
  j["n_boundary_edges"] = mesh.boundary_edges.size();
  if (layout) {
    auto& L = *layout;
    nlohmann::json d;
    d["n0"] = L.n0;
    d["nsx"] = L.nsx;
    d["nsy"] = L.nsy;
    d["interior_sets"] = L.interior;
    d["boundary_layers"] = L.boundary_layer;
    auto& ce = d["coarse_edges"] = nlohmann::json::array();
    for (const auto& c : L.coarse_edges)
      ce.push_back({{"vertical", c.vertical}, {"strip", c.strip}, {"half", c.half}});
    auto& cv = d["coarse_vertices"] = nlohmann::json::array();
    for (const auto& v : L.coarse_vertices)
      cv.push_back({{"cvx", v.cvx}, {"cvy", v.cvy}, {"element", v.element}});
    j["decomposition"] = d;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("dump_mesh_json: cannot open " + path);
  out << j.dump(1) << "\n";
}

}  // namespace helmlsq
