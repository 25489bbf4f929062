#ifndef MFDMG_OPERATORS_HPP
#define MFDMG_OPERATORS_HPP

#include <functional>
#include <stdexcept>
#include <vector>

#include "mfdmg/geometry.hpp"
#include "mfdmg/sparse.hpp"

namespace mfdmg
{

class BoundaryEdgeError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

using VectorField = std::function<Vec2(const Vec2 &)>;

// Numbering of the active edge unknowns. Essential conditions eliminate boundary edges.
struct EdgeDofMap
{
  std::vector<int> dof_of_edge;  // -1 for eliminated edges
  std::vector<int> edge_of_dof;

  int size() const { return static_cast<int>(edge_of_dof.size()); }

  static EdgeDofMap interior(const TriMesh &mesh);
  static EdgeDofMap all(const TriMesh &mesh);
};

// One value per edge: the tangential component u . e^D at the edge midpoint.
struct EdgeField
{
  Eigen::VectorXd values;
  bool boundary_eliminated = false;
};

// Constant on Voronoi cells, one value per Delaunay vertex.
using CellFieldD = Eigen::VectorXd;
// Constant on Delaunay triangles.
using CellFieldV = Eigen::VectorXd;

std::vector<int> interior_vertices(const TriMesh &mesh);

// u(x^D_e) . e^D_e on every edge.
EdgeField sample_tangential(const DualMesh &dual, const VectorField &u);
EdgeField restrict_field(const EdgeField &field, const EdgeDofMap &dofs);

// Discrete vector calculus on the Delaunay/Voronoi pair, over all vertices, edges and
// triangles. Rows of div_h for boundary vertices use the clipped cell measure.
SparseOperator div_h(const DualMesh &dual);   // edges -> vertices
SparseOperator grad_h(const DualMesh &dual);  // vertices -> edges
SparseOperator rot_h(const DualMesh &dual);   // edges -> triangles

// triangles -> active edges. Only interior edges carry a Voronoi edge between two
// circumcenters; boundary edges must be eliminated by `dofs`.
SparseOperator curl_h(const DualMesh &dual, const EdgeDofMap &dofs);

// (triangle, weight) pairs of the curl_h row for a single edge.
std::vector<std::pair<int, double>> curl_h_row(const DualMesh &dual, int edge);

}  // namespace mfdmg

#endif  // MFDMG_OPERATORS_HPP
