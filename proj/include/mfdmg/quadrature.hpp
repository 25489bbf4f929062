#ifndef MFDMG_QUADRATURE_HPP
#define MFDMG_QUADRATURE_HPP

#include <array>
#include <vector>

namespace mfdmg
{

// Quadrature point in barycentric coordinates; weights sum to 1 (multiply by the area).
struct TriangleQuadPoint
{
  std::array<double, 3> bary;
  double weight;
};

// Symmetric 3-point interior rule, exact for polynomials of degree 2.
const std::vector<TriangleQuadPoint> &triangle_rule_degree2();

// Collapsed (Duffy) Gauss-Legendre rule with `order` points per direction, exact for
// polynomials of degree 2*order - 2 on the triangle.
std::vector<TriangleQuadPoint> triangle_rule_gauss(int order);

// Gauss-Legendre nodes and weights on [0, 1].
void gauss_legendre01(int order, std::vector<double> &nodes, std::vector<double> &weights);

}  // namespace mfdmg

#endif  // MFDMG_QUADRATURE_HPP
