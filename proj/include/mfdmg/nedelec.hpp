#ifndef MFDMG_NEDELEC_HPP
#define MFDMG_NEDELEC_HPP

#include <array>

#include <Eigen/Core>

#include "mfdmg/geometry.hpp"
#include "mfdmg/operators.hpp"
#include "mfdmg/sparse.hpp"

namespace mfdmg
{

enum class Provenance
{
  FE,
  MFD,
  Scaled
};

struct LinearSystem
{
  SparseOperator matrix;
  Eigen::VectorXd rhs;
  EdgeDofMap dofs;
  double kappa = 0.0;
  Provenance provenance = Provenance::FE;

  int size() const { return dofs.size(); }
};

// D1 = diag(1 / l^V), D2 = diag(l^D) over the active edges.
struct ScalingPair
{
  Eigen::VectorXd d1;
  Eigen::VectorXd d2;
};

//
// Lowest order edge element on one triangle. The local basis function of local edge c is
// lambda_p grad(lambda_q) - lambda_q grad(lambda_p) with (p, q) = (c+1, c+2); its
// tangential moment along p -> q is exactly 1.
//
struct LocalNedelec
{
  std::array<Vec2, 3> grad_lambda;
  double area = 0.0;

  explicit LocalNedelec(const std::array<Vec2, 3> &corners);

  std::array<Vec2, 3> basis(const std::array<double, 3> &bary) const;
  double rot(int c) const;  // constant on the triangle
  Eigen::Matrix3d stiffness() const;
  Eigen::Matrix3d mass() const;
};

// A^N on interior edges (essential condition u x n = 0), rhs left at zero.
LinearSystem assemble_nedelec(const DualMesh &dual, double kappa);
LinearSystem assemble_nedelec(const DualMesh &dual, double kappa, const EdgeDofMap &dofs);

// b^N_e = integral of f . phi_e, degree-2 exact quadrature per triangle.
Eigen::VectorXd assemble_load(const DualMesh &dual, const VectorField &f,
                              const EdgeDofMap &dofs);

ScalingPair scaling_matrices(const DualMesh &dual, const EdgeDofMap &dofs);

// A^FD = D1 A^N D2, b^FD = D1 b^N. The solutions satisfy U^FD = D2^{-1} U^N.
LinearSystem scale_to_mfd(const LinearSystem &fe, const ScalingPair &pair);

Eigen::VectorXd fe_coefficients_from_mfd(const Eigen::VectorXd &u_mfd, const ScalingPair &pair);

// Value at a barycentric point of triangle k of sum_e coeff_e phi_e (all-edge or dof
// indexing through `dofs`; eliminated edges contribute nothing).
Vec2 evaluate_edge_function(const DualMesh &dual, const EdgeDofMap &dofs,
                            const Eigen::VectorXd &coeff, int k, const std::array<double, 3> &bary);
double evaluate_edge_rot(const DualMesh &dual, const EdgeDofMap &dofs,
                         const Eigen::VectorXd &coeff, int k);

// Direct sparse LU solve; throws std::runtime_error if factorization fails.
Eigen::VectorXd direct_solve(const SparseOperator &A, const Eigen::VectorXd &b);

}  // namespace mfdmg

#endif  // MFDMG_NEDELEC_HPP
