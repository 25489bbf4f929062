#include "mfdmg/nedelec.hpp"

#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <Eigen/SparseLU>

#include "mfdmg/quadrature.hpp"

namespace mfdmg
{

LocalNedelec::LocalNedelec(const std::array<Vec2, 3> &x)
{
  Eigen::Matrix2d B;
  B.col(0) = x[1] - x[0];
  B.col(1) = x[2] - x[0];
  area = 0.5 * B.determinant();
  const Eigen::Matrix2d Binv = B.inverse();
  grad_lambda[1] = Binv.row(0).transpose();
  grad_lambda[2] = Binv.row(1).transpose();
  grad_lambda[0] = -(grad_lambda[1] + grad_lambda[2]);
}

std::array<Vec2, 3> LocalNedelec::basis(const std::array<double, 3> &bary) const
{
  std::array<Vec2, 3> out;
  for (int c = 0; c < 3; ++c)
  {
    const int p = (c + 1) % 3, q = (c + 2) % 3;
    out[c] = bary[p] * grad_lambda[q] - bary[q] * grad_lambda[p];
  }
  return out;
}

double LocalNedelec::rot(int c) const
{
  const Vec2 &gp = grad_lambda[(c + 1) % 3], &gq = grad_lambda[(c + 2) % 3];
  return 2.0 * (gp.x() * gq.y() - gp.y() * gq.x());
}

Eigen::Matrix3d LocalNedelec::stiffness() const
{
  Eigen::Vector3d r(rot(0), rot(1), rot(2));
  return area * r * r.transpose();
}

Eigen::Matrix3d LocalNedelec::mass() const
{
  // integral of lambda_a lambda_b = area (1 + delta_ab) / 12
  auto ll = [this](int a, int b) { return area * (a == b ? 2.0 : 1.0) / 12.0; };
  Eigen::Matrix3d M;
  for (int c = 0; c < 3; ++c)
  {
    const int p = (c + 1) % 3, q = (c + 2) % 3;
    for (int d = 0; d < 3; ++d)
    {
      const int r = (d + 1) % 3, s = (d + 2) % 3;
      M(c, d) = ll(p, r) * grad_lambda[q].dot(grad_lambda[s]) -
                ll(p, s) * grad_lambda[q].dot(grad_lambda[r]) -
                ll(q, r) * grad_lambda[p].dot(grad_lambda[s]) +
                ll(q, s) * grad_lambda[p].dot(grad_lambda[r]);
    }
  }
  return M;
}

LinearSystem assemble_nedelec(const DualMesh &dual, double kappa)
{
  return assemble_nedelec(dual, kappa, EdgeDofMap::interior(dual.mesh));
}

LinearSystem assemble_nedelec(const DualMesh &dual, double kappa, const EdgeDofMap &dofs)
{
  if (!(kappa >= 0.0))
  {
    throw std::invalid_argument("kappa must be non-negative");
  }
  const auto &mesh = dual.mesh;
  Triplets t;
  t.reserve(9 * mesh.num_triangles());
  for (int k = 0; k < mesh.num_triangles(); ++k)
  {
    const LocalNedelec local(mesh.corners[k]);
    const Eigen::Matrix3d Ak = local.stiffness() + kappa * local.mass();
    for (int c = 0; c < 3; ++c)
    {
      const int row = dofs.dof_of_edge[mesh.triangle_edges[k][c]];
      if (row < 0)
      {
        continue;
      }
      for (int d = 0; d < 3; ++d)
      {
        const int col = dofs.dof_of_edge[mesh.triangle_edges[k][d]];
        if (col < 0)
        {
          continue;
        }
        t.emplace_back(row, col,
                       mesh.triangle_edge_signs[k][c] * mesh.triangle_edge_signs[k][d] * Ak(c, d));
      }
    }
  }
  LinearSystem sys;
  sys.matrix = from_triplets(dofs.size(), dofs.size(), t);
  sys.rhs = Eigen::VectorXd::Zero(dofs.size());
  sys.dofs = dofs;
  sys.kappa = kappa;
  sys.provenance = Provenance::FE;
  return sys;
}

Eigen::VectorXd assemble_load(const DualMesh &dual, const VectorField &f, const EdgeDofMap &dofs)
{
  const auto &mesh = dual.mesh;
  Eigen::VectorXd b = Eigen::VectorXd::Zero(dofs.size());
  for (int k = 0; k < mesh.num_triangles(); ++k)
  {
    const LocalNedelec local(mesh.corners[k]);
    const auto &x = mesh.corners[k];
    for (const auto &qp : triangle_rule_degree2())
    {
      const Vec2 pt = qp.bary[0] * x[0] + qp.bary[1] * x[1] + qp.bary[2] * x[2];
      const Vec2 fv = f(pt);
      if (!fv.allFinite())
      {
        throw std::runtime_error("load function returned a non-finite value");
      }
      const auto phi = local.basis(qp.bary);
      for (int c = 0; c < 3; ++c)
      {
        const int d = dofs.dof_of_edge[mesh.triangle_edges[k][c]];
        if (d >= 0)
        {
          b(d) += qp.weight * local.area * mesh.triangle_edge_signs[k][c] * fv.dot(phi[c]);
        }
      }
    }
  }
  return b;
}

ScalingPair scaling_matrices(const DualMesh &dual, const EdgeDofMap &dofs)
{
  ScalingPair pair;
  pair.d1.resize(dofs.size());
  pair.d2.resize(dofs.size());
  for (int d = 0; d < dofs.size(); ++d)
  {
    const int e = dofs.edge_of_dof[d];
    const double lv = dual.dual_length[e], ld = dual.edge_length[e];
    if (!(lv > 0.0) || !(ld > 0.0))
    {
      throw GeometryError("non-positive length on edge " + std::to_string(e));
    }
    pair.d1(d) = 1.0 / lv;
    pair.d2(d) = ld;
  }
  return pair;
}

LinearSystem scale_to_mfd(const LinearSystem &fe, const ScalingPair &pair)
{
  if (pair.d1.size() != fe.size() || pair.d2.size() != fe.size())
  {
    throw std::invalid_argument("scaling pair does not match the system dimension");
  }
  LinearSystem out;
  out.matrix = pair.d1.asDiagonal() * fe.matrix * pair.d2.asDiagonal();
  out.matrix.makeCompressed();
  out.rhs = pair.d1.cwiseProduct(fe.rhs);
  out.dofs = fe.dofs;
  out.kappa = fe.kappa;
  out.provenance = Provenance::MFD;
  return out;
}

Eigen::VectorXd fe_coefficients_from_mfd(const Eigen::VectorXd &u_mfd, const ScalingPair &pair)
{
  return pair.d2.cwiseProduct(u_mfd);
}

Vec2 evaluate_edge_function(const DualMesh &dual, const EdgeDofMap &dofs,
                            const Eigen::VectorXd &coeff, int k, const std::array<double, 3> &bary)
{
  const auto &mesh = dual.mesh;
  const LocalNedelec local(mesh.corners[k]);
  const auto phi = local.basis(bary);
  Vec2 v = Vec2::Zero();
  for (int c = 0; c < 3; ++c)
  {
    const int d = dofs.dof_of_edge[mesh.triangle_edges[k][c]];
    if (d >= 0)
    {
      v += coeff(d) * mesh.triangle_edge_signs[k][c] * phi[c];
    }
  }
  return v;
}

double evaluate_edge_rot(const DualMesh &dual, const EdgeDofMap &dofs,
                         const Eigen::VectorXd &coeff, int k)
{
  const auto &mesh = dual.mesh;
  const LocalNedelec local(mesh.corners[k]);
  double r = 0.0;
  for (int c = 0; c < 3; ++c)
  {
    const int d = dofs.dof_of_edge[mesh.triangle_edges[k][c]];
    if (d >= 0)
    {
      r += coeff(d) * mesh.triangle_edge_signs[k][c] * local.rot(c);
    }
  }
  return r;
}

Eigen::VectorXd direct_solve(const SparseOperator &A, const Eigen::VectorXd &b)
{
  Eigen::SparseMatrix<double> Ac(A);
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.analyzePattern(Ac);
  lu.factorize(Ac);
  if (lu.info() != Eigen::Success)
  {
    throw std::runtime_error("sparse LU factorization failed: " + lu.lastErrorMessage());
  }
  return lu.solve(b);
}

}  // namespace mfdmg
