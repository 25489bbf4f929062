#include "mfdmg/manufactured.hpp"

#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>

#include <Eigen/Dense>

#include "mfdmg/mfd_system.hpp"
#include "mfdmg/quadrature.hpp"

namespace mfdmg
{

ManufacturedProblem bubble_problem(double alpha, double beta, double kappa, const Vec2 &direction)
{
  const TriMesh tri = build_structured_mesh(alpha, beta, 0);
  const LocalNedelec geom(tri.corners[0]);
  const std::array<Vec2, 3> x0 = tri.corners[0];
  const std::array<Vec2, 3> g = geom.grad_lambda;
  const Vec2 c = direction;

  auto lambda = [x0, g](const Vec2 &x) {
    std::array<double, 3> l{};
    for (int i = 0; i < 3; ++i)
    {
      l[i] = (i == 0 ? 1.0 : 0.0) + g[i].dot(x - x0[0]);
    }
    return l;
  };
  auto grad_b = [lambda, g](const Vec2 &x) {
    const auto l = lambda(x);
    return Vec2(27.0 * (g[0] * l[1] * l[2] + g[1] * l[0] * l[2] + g[2] * l[0] * l[1]));
  };
  auto hess_b = [lambda, g](const Vec2 &x) {
    const auto l = lambda(x);
    Eigen::Matrix2d H = Eigen::Matrix2d::Zero();
    for (int i = 0; i < 3; ++i)
    {
      for (int j = 0; j < 3; ++j)
      {
        if (i != j)
        {
          H += g[i] * g[j].transpose() * l[3 - i - j];
        }
      }
    }
    return Eigen::Matrix2d(27.0 * H);
  };

  ManufacturedProblem p;
  p.u = [lambda, c](const Vec2 &x) {
    const auto l = lambda(x);
    return Vec2(27.0 * l[0] * l[1] * l[2] * c);
  };
  // rot u = c_y b_x - c_x b_y
  p.rot_u = [grad_b, c](const Vec2 &x) {
    const Vec2 gb = grad_b(x);
    return c.y() * gb.x() - c.x() * gb.y();
  };
  // curl r = (r_y, -r_x)
  p.f = [hess_b, c, kappa, u = p.u](const Vec2 &x) {
    const Eigen::Matrix2d H = hess_b(x);
    const double r_x = c.y() * H(0, 0) - c.x() * H(1, 0);
    const double r_y = c.y() * H(0, 1) - c.x() * H(1, 1);
    return Vec2(Vec2(r_y, -r_x) + kappa * u(x));
  };
  return p;
}

ManufacturedProblem zero_problem()
{
  ManufacturedProblem p;
  p.u = [](const Vec2 &) { return Vec2(0.0, 0.0); };
  p.rot_u = [](const Vec2 &) { return 0.0; };
  p.f = p.u;
  return p;
}

namespace
{

double rot_norm_error(const DualMesh &dual, const EdgeDofMap &dofs, const Eigen::VectorXd &coeff,
                      const ManufacturedProblem &problem, double kappa)
{
  static const auto rule = triangle_rule_gauss(5);
  const auto &mesh = dual.mesh;
  double sum = 0.0;
  for (int k = 0; k < mesh.num_triangles(); ++k)
  {
    const auto &x = mesh.corners[k];
    const double area = dual.triangle_area[k];
    const double rot_h = evaluate_edge_rot(dual, dofs, coeff, k);
    for (const auto &qp : rule)
    {
      const Vec2 pt = qp.bary[0] * x[0] + qp.bary[1] * x[1] + qp.bary[2] * x[2];
      const Vec2 du = problem.u(pt) - evaluate_edge_function(dual, dofs, coeff, k, qp.bary);
      const double dr = problem.rot_u(pt) - rot_h;
      sum += qp.weight * area * (dr * dr + kappa * du.squaredNorm());
    }
  }
  return std::sqrt(sum);
}

}  // namespace

std::vector<ConvergenceRow> manufactured_convergence(double alpha, double beta, double kappa,
                                                     int level_min, int level_max,
                                                     const ManufacturedProblem &problem)
{
  if (level_min < 1 || level_max < level_min)
  {
    throw std::invalid_argument("need 1 <= level_min <= level_max");
  }
  std::vector<ConvergenceRow> rows;
  TriMesh mesh = build_structured_mesh(alpha, beta, level_min);
  for (int level = level_min; level <= level_max; ++level)
  {
    if (level > level_min)
    {
      mesh = refine_regular(mesh).fine;
    }
    const DualMesh dual = compute_dual(mesh);
    const auto dofs = EdgeDofMap::interior(dual.mesh);
    const MfdSystem mfd = assemble_curlrot_mfd(dual, kappa, dofs);
    const Eigen::VectorXd b_fd =
        assemble_rhs_mfd(dual, problem.f, RhsMode::Consistent, dofs).values;
    const Eigen::VectorXd u_fd = solve_mfd(mfd, b_fd);

    LinearSystem fe = assemble_nedelec(dual, kappa, dofs);
    fe.rhs = assemble_load(dual, problem.f, dofs);
    const Eigen::VectorXd u_fe = direct_solve(fe.matrix, fe.rhs);

    ConvergenceRow row;
    row.level = level;
    row.h = *std::max_element(dual.edge_length.begin(), dual.edge_length.end());
    row.dofs = dofs.size();
    row.error_rot =
        rot_norm_error(dual, dofs, fe_coefficients_from_mfd(u_fd, mfd.scaling), problem, kappa);
    row.error_rot_fe = rot_norm_error(dual, dofs, u_fe, problem, kappa);
    if (!rows.empty() && rows.back().error_rot > 0.0 && row.error_rot > 0.0)
    {
      row.observed_order =
          std::log(rows.back().error_rot / row.error_rot) / std::log(rows.back().h / row.h);
    }
    rows.push_back(row);
  }
  return rows;
}

void write_convergence_csv(std::ostream &out, const std::vector<ConvergenceRow> &rows)
{
  out << "level,h,dofs,error_rot,observed_order\n" << std::setprecision(10);
  for (const auto &r : rows)
  {
    out << r.level << ',' << r.h << ',' << r.dofs << ',' << r.error_rot << ','
        << r.observed_order << '\n';
  }
}

}  // namespace mfdmg
