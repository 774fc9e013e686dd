// Uniform rectangular partition of a rectangle, its edge topology, and the
// subdomain layout used by the substructuring preconditioner.
//
// Conventions, fixed once for the whole library:
//  - elements are indexed row-major by (iy, ix): id = iy*nx + ix;
//  - every interior edge is owned by the adjacent element with the larger
//    index (the right element of a vertical edge, the upper element of a
//    horizontal edge); the owner carries the "+" sign of the local Robin
//    data and the jump is [v] = v_owner - v_neighbor;
//  - horizontal edges are parametrized by x, vertical edges by y, both
//    increasing, so the two adjacent elements see the same parametrization.

#ifndef HELMLSQ_GEOMETRY_HPP
#define HELMLSQ_GEOMETRY_HPP

#include <array>
#include <string>
#include <vector>

namespace helmlsq {

struct Point {
  double x = 0, y = 0;
};

struct Element {
  int ix = 0, iy = 0;
  double x0 = 0, y0 = 0;  // lower-left corner
};

struct InteriorEdge {
  int owner = 0;       // larger element index
  int neighbor = 0;    // smaller element index
  int owner_side = 0;  // Side the edge occupies on the owner
  int nb_side = 0;
  bool vertical = false;
  double length = 0;
  Point start;  // lowest-parameter endpoint
};

struct BoundaryEdge {
  int element = 0;
  int side = 0;  // Side of the owning element lying on the domain boundary
  double length = 0;
  Point start;
  double nx = 0, ny = 0;  // outward normal
};

struct MeshTopology {
  Point lo, hi;
  int nx = 0, ny = 0;
  double dx = 0, dy = 0;
  double h = 0;  // max cell edge length
  std::vector<Element> elements;
  std::vector<InteriorEdge> interior_edges;
  std::vector<BoundaryEdge> boundary_edges;
  // Per element and Side: interior edge id or -1.
  std::vector<std::array<int, 4>> edge_of_side;
  // Per element and Side: +1 (owner), -1 (neighbor), 0 (domain boundary).
  std::vector<std::array<int, 4>> sign_of_side;

  int n_elements() const { return nx * ny; }
  int element_id(int ix, int iy) const { return iy * nx + ix; }
};

MeshTopology build_mesh(Point lo, Point hi, int nx, int ny);

// Dimension of the interface space: (q+1) per interior edge.
long count_interface_dofs(const MeshTopology& mesh, int q);

// One coarse edge between subdomains r and l, with the element sets around it.
struct CoarseEdge {
  int r = 0, l = 0;        // subdomain ids (owner convention irrelevant here)
  bool vertical = false;
  std::vector<int> strip;  // D_rl elements
  std::vector<int> half;   // D~_rl^half elements (includes strip)
};

struct CoarseVertex {
  int cvx = 0, cvy = 0;       // coarse grid coordinates (interior)
  int element = 0;            // D_V: top-left element touching the vertex
  std::vector<int> edges_of_element;  // the (interior) fine edges of D_V
  std::vector<int> coarse_edges;      // Gamma_V: ids into layout.coarse_edges
};

struct DecompositionLayout {
  int n0 = 0;          // elements per subdomain side
  int nsx = 0, nsy = 0;
  double d = 0;        // subdomain size (length units, max over axes)
  std::vector<int> subdomain_of_element;
  std::vector<std::vector<int>> subdomains;       // D_r element lists
  std::vector<std::vector<int>> boundary_layer;   // D_r^b
  std::vector<std::vector<int>> interior;         // D_r^0
  std::vector<char> in_interface;                 // element -> Gamma?
  std::vector<CoarseEdge> coarse_edges;
  std::vector<CoarseVertex> coarse_vertices;

  int n_subdomains() const { return nsx * nsy; }
};

DecompositionLayout build_decomposition(const MeshTopology& mesh, int elems_per_side);

// Interior edges whose two elements both lie in the given element set.
std::vector<int> edges_inside(const MeshTopology& mesh, const std::vector<int>& elems);

// Debug/visualization dump of the mesh (and layout, if given) as JSON.
void dump_mesh_json(const MeshTopology& mesh, const DecompositionLayout* layout,
                    const std::string& path);

}  // namespace helmlsq

#endif
