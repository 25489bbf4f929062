#include "mfdmg/mfd_system.hpp"

#include <cmath>

#include "mfdmg/quadrature.hpp"

namespace mfdmg
{

MfdSystem assemble_curlrot_mfd(const DualMesh &dual, double kappa)
{
  return assemble_curlrot_mfd(dual, kappa, EdgeDofMap::interior(dual.mesh));
}

MfdSystem assemble_curlrot_mfd(const DualMesh &dual, double kappa, const EdgeDofMap &dofs)
{
  MfdSystem out;
  out.scaling = scaling_matrices(dual, dofs);
  out.system = scale_to_mfd(assemble_nedelec(dual, kappa, dofs), out.scaling);
  if (kappa == 0.0)
  {
    out.singular = true;
    out.warnings.push_back("kappa = 0: curl rot has the gradient kernel, system is singular");
  }
  return out;
}

SparseOperator weighted_operator(const MfdSystem &sys)
{
  return diagonal_operator(sys.scaling.d2.cwiseQuotient(sys.scaling.d1)) * sys.system.matrix;
}

SparseOperator curlrot_composition(const DualMesh &dual, const EdgeDofMap &dofs)
{
  std::vector<int> tri(dual.mesh.num_triangles());
  for (int k = 0; k < dual.mesh.num_triangles(); ++k)
  {
    tri[k] = k;
  }
  const SparseOperator rot = select(rot_h(dual), tri, dofs.edge_of_dof);
  SparseOperator prod = curl_h(dual, dofs) * rot;
  prod.makeCompressed();
  return prod;
}

MfdSystem assemble_graddiv_mfd(const DualMesh &dual, double kappa)
{
  if (!(kappa >= 0.0))
  {
    throw std::invalid_argument("kappa must be non-negative");
  }
  const auto dofs = EdgeDofMap::interior(dual.mesh);
  const auto verts = interior_vertices(dual.mesh);
  const SparseOperator div = select(div_h(dual), verts, dofs.edge_of_dof);
  const SparseOperator grad = select(grad_h(dual), dofs.edge_of_dof, verts);
  SparseOperator A = -(grad * div);
  if (kappa != 0.0)
  {
    Eigen::VectorXd k = Eigen::VectorXd::Constant(dofs.size(), kappa);
    A += diagonal_operator(k);
  }
  A.prune(0.0, 0.0);
  A.makeCompressed();

  MfdSystem out;
  out.system.matrix = std::move(A);
  out.system.rhs = Eigen::VectorXd::Zero(dofs.size());
  out.system.dofs = dofs;
  out.system.kappa = kappa;
  out.system.provenance = Provenance::MFD;
  out.scaling = scaling_matrices(dual, dofs);
  if (kappa == 0.0)
  {
    out.singular = true;
    out.warnings.push_back("kappa = 0: grad div has the curl kernel, system is singular");
  }
  return out;
}

Eigen::VectorXd graddiv_symmetry_weight(const DualMesh &dual, const EdgeDofMap &dofs)
{
  Eigen::VectorXd w(dofs.size());
  for (int d = 0; d < dofs.size(); ++d)
  {
    const int e = dofs.edge_of_dof[d];
    w(d) = dual.dual_length[e] * dual.edge_length[e];
  }
  return w;
}

EdgeField assemble_rhs_mfd(const DualMesh &dual, const VectorField &f, RhsMode mode,
                           const EdgeDofMap &dofs)
{
  const auto &mesh = dual.mesh;
  EdgeField out;
  out.boundary_eliminated = dofs.size() < mesh.num_edges();
  out.values = Eigen::VectorXd::Zero(dofs.size());
  if (mode == RhsMode::Midpoint)
  {
    for (int d = 0; d < dofs.size(); ++d)
    {
      const int e = dofs.edge_of_dof[d];
      const Vec2 fv = f(dual.edge_midpoint[e]);
      if (!fv.allFinite())
      {
        throw std::runtime_error("right-hand side is not finite at edge " + std::to_string(e));
      }
      out.values(d) = fv.dot(dual.edge_tangent[e]);
    }
    return out;
  }

  // Moment integrals with a collapsed Gauss rule exact for quadratics.
  static const auto rule = triangle_rule_gauss(2);
  for (int k = 0; k < mesh.num_triangles(); ++k)
  {
    const LocalNedelec local(mesh.corners[k]);
    const auto &x = mesh.corners[k];
    for (const auto &qp : rule)
    {
      const Vec2 pt = qp.bary[0] * x[0] + qp.bary[1] * x[1] + qp.bary[2] * x[2];
      const Vec2 fv = f(pt);
      if (!fv.allFinite())
      {
        throw std::runtime_error("right-hand side is not finite in triangle " + std::to_string(k));
      }
      const auto phi = local.basis(qp.bary);
      for (int c = 0; c < 3; ++c)
      {
        const int e = mesh.triangle_edges[k][c];
        const int d = dofs.dof_of_edge[e];
        if (d >= 0)
        {
          out.values(d) += qp.weight * local.area * mesh.triangle_edge_signs[k][c] *
                           fv.dot(phi[c]) / dual.dual_length[e];
        }
      }
    }
  }
  return out;
}

Eigen::VectorXd solve_mfd(const MfdSystem &sys, const Eigen::VectorXd &rhs)
{
  if (sys.singular)
  {
    throw SingularSystemError("refusing to solve a singular MFD system (kappa = 0)");
  }
  return direct_solve(sys.system.matrix, rhs);
}

}  // namespace mfdmg
