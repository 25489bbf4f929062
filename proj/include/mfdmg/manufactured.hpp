#ifndef MFDMG_MANUFACTURED_HPP
#define MFDMG_MANUFACTURED_HPP

#include <functional>
#include <iosfwd>
#include <vector>

#include "mfdmg/geometry.hpp"
#include "mfdmg/operators.hpp"

namespace mfdmg
{

struct ManufacturedProblem
{
  VectorField u;
  std::function<double(const Vec2 &)> rot_u;
  VectorField f;  // curl rot u + kappa u
};

// u = b (c_x, c_y) with b = 27 lambda_0 lambda_1 lambda_2 the cubic bubble of the
// generating triangle, so u vanishes on the boundary.
ManufacturedProblem bubble_problem(double alpha, double beta, double kappa,
                                   const Vec2 &direction = Vec2(1.0, 2.0));

// u = 0, f = 0.
ManufacturedProblem zero_problem();

struct ConvergenceRow
{
  int level = 0;
  double h = 0.0;
  int dofs = 0;
  double error_rot = 0.0;     // via A^FD, mapped back through D2
  double error_rot_fe = 0.0;  // via A^N directly
  double observed_order = 0.0;  // 0 on the first row
};

std::vector<ConvergenceRow> manufactured_convergence(double alpha, double beta, double kappa,
                                                     int level_min, int level_max,
                                                     const ManufacturedProblem &problem);

void write_convergence_csv(std::ostream &out, const std::vector<ConvergenceRow> &rows);

}  // namespace mfdmg

#endif  // MFDMG_MANUFACTURED_HPP
