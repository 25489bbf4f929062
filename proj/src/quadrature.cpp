#include "mfdmg/quadrature.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace mfdmg
{

const std::vector<TriangleQuadPoint> &triangle_rule_degree2()
{
  static const std::vector<TriangleQuadPoint> rule = {
      {{2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0}, 1.0 / 3.0},
      {{1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0}, 1.0 / 3.0},
      {{1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0}, 1.0 / 3.0},
  };
  return rule;
}

void gauss_legendre01(int order, std::vector<double> &nodes, std::vector<double> &weights)
{
  if (order < 1)
  {
    throw std::invalid_argument("Gauss-Legendre order must be positive");
  }
  // Golub-Welsch on the Jacobi matrix of the Legendre recurrence.
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(order, order);
  for (int i = 1; i < order; ++i)
  {
    const double b = i / std::sqrt(4.0 * i * i - 1.0);
    J(i, i - 1) = J(i - 1, i) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(J);
  nodes.resize(order);
  weights.resize(order);
  for (int i = 0; i < order; ++i)
  {
    nodes[i] = 0.5 * (eig.eigenvalues()(i) + 1.0);
    const double v = eig.eigenvectors()(0, i);
    weights[i] = v * v;  // sums to 1 on [0, 1]
  }
}

std::vector<TriangleQuadPoint> triangle_rule_gauss(int order)
{
  std::vector<double> x, w;
  gauss_legendre01(order, x, w);
  std::vector<TriangleQuadPoint> rule;
  rule.reserve(order * order);
  for (int i = 0; i < order; ++i)
  {
    for (int j = 0; j < order; ++j)
    {
      // (s, t) on the unit square -> (s, (1 - s) t) on the reference triangle.
      const double s = x[i], t = (1.0 - s) * x[j];
      rule.push_back({{1.0 - s - t, s, t}, 2.0 * w[i] * w[j] * (1.0 - s)});
    }
  }
  return rule;
}

}  // namespace mfdmg
