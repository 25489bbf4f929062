#ifndef MFDMG_TESTS_SUPPORT_HPP
#define MFDMG_TESTS_SUPPORT_HPP

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mfdmg/geometry.hpp"

namespace mfdmg::test
{

struct MeshCase
{
  double alpha, beta;
  int level;

  std::string name() const
  {
    return std::to_string(static_cast<int>(alpha)) + "_" + std::to_string(static_cast<int>(beta)) +
           "_L" + std::to_string(level);
  }
};

inline std::vector<MeshCase> test_meshes()
{
  return {{60, 60, 1}, {60, 60, 2}, {60, 60, 3}, {60, 60, 4}, {80, 80, 3},
          {70, 60, 3}, {50, 65, 3}, {45, 75, 2}, {55, 80, 3}};
}

inline DualMesh dual_of(const MeshCase &c)
{
  return compute_dual(build_structured_mesh(c.alpha, c.beta, c.level));
}

// Barycentric coordinates of x in the triangle with the given corners.
inline std::array<double, 3> barycentric(const std::array<Vec2, 3> &x, const Vec2 &p)
{
  Eigen::Matrix2d B;
  B.col(0) = x[1] - x[0];
  B.col(1) = x[2] - x[0];
  const Eigen::Vector2d s = B.inverse() * (p - x[0]);
  return {1.0 - s.x() - s.y(), s.x(), s.y()};
}

}  // namespace mfdmg::test

#endif  // MFDMG_TESTS_SUPPORT_HPP
