#ifndef MFDMG_MFD_SYSTEM_HPP
#define MFDMG_MFD_SYSTEM_HPP

#include <stdexcept>
#include <string>
#include <vector>

#include "mfdmg/nedelec.hpp"

namespace mfdmg
{

class SingularSystemError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

struct MfdSystem
{
  LinearSystem system;  // A^FD, b^FD
  ScalingPair scaling;
  bool singular = false;  // kappa == 0
  std::vector<std::string> warnings;
};

// A^FD = D1 A^N D2 for curl rot u + kappa u = f on interior edges.
MfdSystem assemble_curlrot_mfd(const DualMesh &dual, double kappa);
MfdSystem assemble_curlrot_mfd(const DualMesh &dual, double kappa, const EdgeDofMap &dofs);

// (D1^{-1} D2) A^FD = D2 A^N D2, symmetric.
SparseOperator weighted_operator(const MfdSystem &sys);

// curl_h rot_h restricted to the active edges; equals the kappa = 0 part of A^FD.
SparseOperator curlrot_composition(const DualMesh &dual, const EdgeDofMap &dofs);

// -grad_h div_h + kappa I on interior edges. The divergence is taken on the cells of
// interior vertices, whose boundaries carry only active edge fluxes.
MfdSystem assemble_graddiv_mfd(const DualMesh &dual, double kappa);

// diag(l^V l^D): the weight that makes -grad_h div_h symmetric.
Eigen::VectorXd graddiv_symmetry_weight(const DualMesh &dual, const EdgeDofMap &dofs);

enum class RhsMode
{
  Consistent,  // (1 / l^V) integral of f . phi_e
  Midpoint     // f(x^D_e) . e^D_e
};

EdgeField assemble_rhs_mfd(const DualMesh &dual, const VectorField &f, RhsMode mode,
                           const EdgeDofMap &dofs);

// Direct solve of the MFD system. Refuses kappa = 0.
Eigen::VectorXd solve_mfd(const MfdSystem &sys, const Eigen::VectorXd &rhs);

}  // namespace mfdmg

#endif  // MFDMG_MFD_SYSTEM_HPP
