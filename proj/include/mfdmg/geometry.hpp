#ifndef MFDMG_GEOMETRY_HPP
#define MFDMG_GEOMETRY_HPP

#include <array>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace mfdmg
{

using Vec2 = Eigen::Vector2d;

class GeometryError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

class AcutenessError : public GeometryError
{
public:
  AcutenessError(int triangle, double max_angle_deg);
  int triangle() const { return triangle_; }
  double max_angle() const { return max_angle_; }

private:
  int triangle_;
  double max_angle_;
};

//
// Triangulation with edge topology. Triangles are counter-clockwise. Local edge c of a
// triangle joins corners c+1 and c+2 (mod 3), i.e. it is opposite corner c.
//
// Bounded meshes orient every edge from the smaller to the larger vertex index. Periodic
// (torus) meshes orient edges along the lattice directions instead, so that orientation
// is translation invariant; `period` > 0 marks such meshes.
//
struct TriMesh
{
  std::vector<Vec2> vertices;
  std::vector<std::array<int, 3>> triangles;
  // Corner coordinates per triangle. Identical to `vertices` for bounded meshes; unwrapped
  // lattice coordinates for periodic meshes.
  std::vector<std::array<Vec2, 3>> corners;
  std::vector<std::array<int, 2>> edges;           // tail -> head
  std::vector<std::array<int, 2>> edge_triangles;  // -1 where absent
  std::vector<std::array<int, 3>> triangle_edges;
  std::vector<std::array<int, 3>> triangle_edge_signs;  // +1 if edge runs ccw in triangle
  std::vector<bool> boundary_vertex;
  std::vector<bool> boundary_edge;

  double alpha = 0.0;  // degrees
  double beta = 0.0;
  int level = 0;

  int period = 0;
  std::vector<std::array<int, 2>> lattice;  // periodic meshes only

  int num_vertices() const { return static_cast<int>(vertices.size()); }
  int num_triangles() const { return static_cast<int>(triangles.size()); }
  int num_edges() const { return static_cast<int>(edges.size()); }
  int num_interior_edges() const;
  bool is_periodic() const { return period > 0; }

  // Local index (0..2) of edge `e` in triangle `k`, or -1.
  int local_edge(int k, int e) const;

  // Throws GeometryError if the topology invariants are violated.
  void validate() const;
};

// Builds edge topology for a bounded mesh. Triangles are reoriented counter-clockwise.
TriMesh make_mesh(std::vector<Vec2> vertices, std::vector<std::array<int, 3>> triangles);

// Generating triangle with angles alpha at (0,0) and beta at (base,0); `levels` regular
// refinements.
TriMesh build_structured_mesh(double alpha, double beta, int levels, double base = 1.0);

struct RefinementMap
{
  std::vector<int> parent_triangle;                  // per fine triangle
  std::vector<std::array<int, 4>> children;          // per coarse triangle
  std::vector<int> midpoint_vertex;                  // per coarse edge
  std::vector<std::array<int, 2>> edge_children;     // per coarse edge, ordered tail to head
};

struct Refinement
{
  TriMesh fine;
  RefinementMap map;
};

Refinement refine_regular(const TriMesh &mesh);

struct AcuteReport
{
  bool pass = true;
  std::vector<int> offending;
  double max_angle = 0.0;  // degrees, over all triangles
};

// Passes iff every angle < 90 - margin degrees (strict, tolerance 1e-12).
AcuteReport check_acute(const TriMesh &mesh, double margin_deg = 0.0);

// Interior angles (degrees) at the three corners of triangle k.
std::array<double, 3> triangle_angles(const TriMesh &mesh, int k);

Vec2 circumcenter(const Vec2 &a, const Vec2 &b, const Vec2 &c);

//
// Voronoi dual of an acute triangulation. Boundary Voronoi cells are clipped to the
// domain: each triangle is split into three kites (corner, two edge midpoints,
// circumcenter) and meas(V_i) sums the kites at vertex i. The dual length of a boundary
// edge is the clipped half segment from the circumcenter to the edge midpoint.
//
struct DualMesh
{
  TriMesh mesh;
  std::vector<Vec2> circumcenters;     // x^V_k, in the frame of triangle k's corners
  std::vector<double> triangle_area;   // meas(D_k)
  std::vector<double> edge_length;     // l^D
  std::vector<double> dual_length;     // l^V
  std::vector<double> cell_measure;    // meas(V_i)
  std::vector<Vec2> edge_tangent;      // unit e^D, tail -> head
  std::vector<Vec2> edge_midpoint;     // x^D_ij

  double domain_area() const;
};

DualMesh compute_dual(TriMesh mesh, double margin_deg = 0.0);

//
// Orientation signs eta(i, e) = n^V_i . e^D_e for every vertex/edge incidence.
//
struct EtaTable
{
  std::vector<std::vector<std::pair<int, int>>> incident;  // per vertex: (edge, eta)
  int eta(int vertex, int edge) const;
};

EtaTable orient_edges(const DualMesh &dual);

//
// Doubly periodic lattice of n x n cells, each holding two triangles congruent to the
// generating triangle scaled by `spacing`. Edge 3*(a + n*b) + c belongs to cell (a, b):
//   c = 0: (a,b) -> (a+1,b);  c = 1: (a,b) -> (a,b+1);  c = 2: (a+1,b) -> (a,b+1).
// Triangle 2*(a + n*b) is the lower one, 2*(a + n*b) + 1 the upper one.
//
TriMesh build_periodic_mesh(double alpha, double beta, int n, double spacing = 1.0);

// Parent triangle of each triangle of the n-torus inside the (n/2)-torus.
std::vector<int> periodic_parents(int n_fine);

// Plain-text mesh format; see README.
void write_mesh(std::ostream &out, const TriMesh &mesh);
TriMesh read_mesh(std::istream &in);

}  // namespace mfdmg

#endif  // MFDMG_GEOMETRY_HPP
