#include "mfdmg/operators.hpp"

#include <cmath>
#include <string>

namespace mfdmg
{

EdgeDofMap EdgeDofMap::interior(const TriMesh &mesh)
{
  EdgeDofMap map;
  map.dof_of_edge.assign(mesh.num_edges(), -1);
  for (int e = 0; e < mesh.num_edges(); ++e)
  {
    if (!mesh.boundary_edge[e])
    {
      map.dof_of_edge[e] = static_cast<int>(map.edge_of_dof.size());
      map.edge_of_dof.push_back(e);
    }
  }
  return map;
}

EdgeDofMap EdgeDofMap::all(const TriMesh &mesh)
{
  EdgeDofMap map;
  map.dof_of_edge.resize(mesh.num_edges());
  map.edge_of_dof.resize(mesh.num_edges());
  for (int e = 0; e < mesh.num_edges(); ++e)
  {
    map.dof_of_edge[e] = map.edge_of_dof[e] = e;
  }
  return map;
}

std::vector<int> interior_vertices(const TriMesh &mesh)
{
  std::vector<int> out;
  for (int i = 0; i < mesh.num_vertices(); ++i)
  {
    if (!mesh.boundary_vertex[i])
    {
      out.push_back(i);
    }
  }
  return out;
}

EdgeField sample_tangential(const DualMesh &dual, const VectorField &u)
{
  EdgeField f;
  const int ne = dual.mesh.num_edges();
  f.values.resize(ne);
  for (int e = 0; e < ne; ++e)
  {
    f.values(e) = u(dual.edge_midpoint[e]).dot(dual.edge_tangent[e]);
  }
  return f;
}

EdgeField restrict_field(const EdgeField &field, const EdgeDofMap &dofs)
{
  EdgeField out;
  out.boundary_eliminated = true;
  out.values.resize(dofs.size());
  for (int d = 0; d < dofs.size(); ++d)
  {
    out.values(d) = field.values(dofs.edge_of_dof[d]);
  }
  return out;
}

SparseOperator div_h(const DualMesh &dual)
{
  const auto &mesh = dual.mesh;
  const EtaTable eta = orient_edges(dual);
  Triplets t;
  for (int i = 0; i < mesh.num_vertices(); ++i)
  {
    for (const auto &[e, s] : eta.incident[i])
    {
      t.emplace_back(i, e, s * dual.dual_length[e] / dual.cell_measure[i]);
    }
  }
  return from_triplets(mesh.num_vertices(), mesh.num_edges(), t);
}

SparseOperator grad_h(const DualMesh &dual)
{
  const auto &mesh = dual.mesh;
  const EtaTable eta = orient_edges(dual);
  Triplets t;
  for (int e = 0; e < mesh.num_edges(); ++e)
  {
    // eta(i,j) (u_j - u_i) / l, seen from either endpoint.
    const auto [tail, head] = mesh.edges[e];
    const double l = dual.edge_length[e];
    t.emplace_back(e, head, eta.eta(tail, e) / l);
    t.emplace_back(e, tail, -eta.eta(tail, e) / l);
  }
  return from_triplets(mesh.num_edges(), mesh.num_vertices(), t);
}

SparseOperator rot_h(const DualMesh &dual)
{
  const auto &mesh = dual.mesh;
  Triplets t;
  for (int k = 0; k < mesh.num_triangles(); ++k)
  {
    for (int c = 0; c < 3; ++c)
    {
      const int e = mesh.triangle_edges[k][c];
      t.emplace_back(k, e,
                     mesh.triangle_edge_signs[k][c] * dual.edge_length[e] / dual.triangle_area[k]);
    }
  }
  return from_triplets(mesh.num_triangles(), mesh.num_edges(), t);
}

std::vector<std::pair<int, double>> curl_h_row(const DualMesh &dual, int edge)
{
  const auto &mesh = dual.mesh;
  const auto adj = mesh.edge_triangles.at(edge);
  if (adj[1] < 0)
  {
    throw BoundaryEdgeError("curl_h is undefined on boundary edge " + std::to_string(edge));
  }
  std::vector<std::pair<int, double>> row;
  for (int k : adj)
  {
    const int c = mesh.local_edge(k, edge);
    row.emplace_back(k, mesh.triangle_edge_signs[k][c] / dual.dual_length[edge]);
  }
  return row;
}

SparseOperator curl_h(const DualMesh &dual, const EdgeDofMap &dofs)
{
  Triplets t;
  for (int d = 0; d < dofs.size(); ++d)
  {
    for (const auto &[k, w] : curl_h_row(dual, dofs.edge_of_dof[d]))
    {
      t.emplace_back(d, k, w);
    }
  }
  return from_triplets(dofs.size(), dual.mesh.num_triangles(), t);
}

}  // namespace mfdmg
