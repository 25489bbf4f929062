#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include "mfdmg/geometry.hpp"
#include "support.hpp"

using namespace mfdmg;

namespace
{

double rad(double d)
{
  return d * std::numbers::pi / 180.0;
}

double cross(const Vec2 &a, const Vec2 &b)
{
  return a.x() * b.y() - a.y() * b.x();
}

}  // namespace

TEST(Mesh, CountsFollowRegularRefinement)
{
  for (int L = 0; L <= 5; ++L)
  {
    const TriMesh m = build_structured_mesh(60, 60, L);
    const int n = 1 << L;
    EXPECT_EQ(m.num_triangles(), n * n);
    EXPECT_EQ(m.num_edges(), 3 * n * (n + 1) / 2);
    EXPECT_EQ(m.num_vertices(), (n + 1) * (n + 2) / 2);
    EXPECT_EQ(m.num_edges() - m.num_interior_edges(), 3 * n);
    EXPECT_EQ(m.level, L);
    EXPECT_NO_THROW(m.validate());
  }
  EXPECT_EQ(build_structured_mesh(60, 60, 1).num_interior_edges(), 3);
  EXPECT_EQ(build_structured_mesh(60, 60, 2).num_interior_edges(), 18);
  EXPECT_EQ(build_structured_mesh(60, 60, 3).num_interior_edges(), 84);

  const TriMesh m = build_structured_mesh(80, 80, 3);
  EXPECT_EQ(m.num_triangles(), 64);
  EXPECT_EQ(m.num_vertices(), 45);
  EXPECT_EQ(m.num_edges(), 108);
}

TEST(Mesh, EveryTriangleIsSimilarToTheGenerator)
{
  for (const auto &c : test::test_meshes())
  {
    const TriMesh m = build_structured_mesh(c.alpha, c.beta, c.level);
    std::array<double, 3> want{c.alpha, c.beta, 180.0 - c.alpha - c.beta};
    std::sort(want.begin(), want.end());
    for (int k = 0; k < m.num_triangles(); ++k)
    {
      auto a = triangle_angles(m, k);
      std::sort(a.begin(), a.end());
      for (int i = 0; i < 3; ++i)
      {
        EXPECT_NEAR(a[i], want[i], 1e-9) << c.name() << " triangle " << k;
      }
      const auto &x = m.corners[k];
      EXPECT_GT(cross(x[1] - x[0], x[2] - x[0]), 0.0);
    }
  }
}

TEST(Mesh, GeneratorVerticesAndEdgeOrientation)
{
  const TriMesh m = build_structured_mesh(70, 60, 2);
  const double side = std::sin(rad(60)) / std::sin(rad(130));
  const Vec2 apex(side * std::cos(rad(70)), side * std::sin(rad(70)));
  auto has_vertex = [&](const Vec2 &p) {
    return std::any_of(m.vertices.begin(), m.vertices.end(),
                       [&](const Vec2 &v) { return (v - p).norm() < 1e-12; });
  };
  EXPECT_TRUE(has_vertex(Vec2(0, 0)));
  EXPECT_TRUE(has_vertex(Vec2(1, 0)));
  EXPECT_TRUE(has_vertex(apex));
  for (const auto &e : m.edges)
  {
    EXPECT_LT(e[0], e[1]);
  }
}

TEST(Mesh, AcutenessIsEnforced)
{
  const TriMesh obtuse = build_structured_mesh(95, 40, 1);
  EXPECT_FALSE(check_acute(obtuse).pass);
  EXPECT_THROW(compute_dual(obtuse), AcutenessError);

  const TriMesh right90 = build_structured_mesh(90, 45, 2);
  const AcuteReport all = check_acute(right90);
  EXPECT_FALSE(all.pass);
  EXPECT_EQ(static_cast<int>(all.offending.size()), right90.num_triangles());
  const TriMesh right = build_structured_mesh(45, 45, 1);
  const AcuteReport r = check_acute(right);
  EXPECT_FALSE(r.pass);
  EXPECT_NEAR(r.max_angle, 90.0, 1e-9);
  EXPECT_THROW(compute_dual(right), AcutenessError);

  const TriMesh m = build_structured_mesh(80, 80, 1);
  EXPECT_TRUE(check_acute(m).pass);
  EXPECT_FALSE(check_acute(m, 15.0).pass);
  try
  {
    compute_dual(m, 15.0);
    FAIL() << "expected AcutenessError";
  }
  catch (const AcutenessError &e)
  {
    EXPECT_NEAR(e.max_angle(), 80.0, 1e-9);
  }
}

TEST(Dual, CircumcentersAreEquidistant)
{
  for (const auto &c : test::test_meshes())
  {
    const DualMesh d = test::dual_of(c);
    for (int k = 0; k < d.mesh.num_triangles(); ++k)
    {
      const auto &x = d.mesh.corners[k];
      const double r0 = (d.circumcenters[k] - x[0]).norm();
      EXPECT_NEAR((d.circumcenters[k] - x[1]).norm(), r0, 1e-13);
      EXPECT_NEAR((d.circumcenters[k] - x[2]).norm(), r0, 1e-13);
      // Acute triangles contain their circumcenter.
      const auto b = test::barycentric(x, d.circumcenters[k]);
      for (double v : b)
      {
        EXPECT_GT(v, 0.0);
      }
    }
  }
}

TEST(Dual, EquilateralLengths)
{
  for (int L = 1; L <= 4; ++L)
  {
    const DualMesh d = compute_dual(build_structured_mesh(60, 60, L));
    const double h = 1.0 / (1 << L);
    for (int e = 0; e < d.mesh.num_edges(); ++e)
    {
      EXPECT_NEAR(d.edge_length[e], h, 1e-14);
      const double lv = d.mesh.boundary_edge[e] ? h / (2.0 * std::sqrt(3.0)) : h / std::sqrt(3.0);
      EXPECT_NEAR(d.dual_length[e], lv, 1e-14);
    }
    for (int k = 0; k < d.mesh.num_triangles(); ++k)
    {
      EXPECT_NEAR(d.triangle_area[k], std::sqrt(3.0) / 4.0 * h * h, 1e-15);
    }
    for (int i = 0; i < d.mesh.num_vertices(); ++i)
    {
      if (!d.mesh.boundary_vertex[i])
      {
        EXPECT_NEAR(d.cell_measure[i], std::sqrt(3.0) / 2.0 * h * h, 1e-14);
      }
    }
  }
}

TEST(Dual, DualLengthsFromMidpointDistances)
{
  for (const auto &c : test::test_meshes())
  {
    const DualMesh d = test::dual_of(c);
    for (int e = 0; e < d.mesh.num_edges(); ++e)
    {
      double want = 0.0;
      for (int k : d.mesh.edge_triangles[e])
      {
        if (k >= 0)
        {
          const int le = d.mesh.local_edge(k, e);
          const auto &x = d.mesh.corners[k];
          const Vec2 mid = 0.5 * (x[(le + 1) % 3] + x[(le + 2) % 3]);
          want += (d.circumcenters[k] - mid).norm();
        }
      }
      EXPECT_NEAR(d.dual_length[e], want, 1e-13) << c.name();
      const Vec2 t = d.mesh.vertices[d.mesh.edges[e][1]] - d.mesh.vertices[d.mesh.edges[e][0]];
      EXPECT_NEAR(d.edge_length[e], t.norm(), 1e-14);
      EXPECT_NEAR((d.edge_tangent[e] - t / t.norm()).norm(), 0.0, 1e-14);
    }
  }
}

TEST(Dual, CellMeasuresTileTheDomain)
{
  for (const auto &c : test::test_meshes())
  {
    const DualMesh d = test::dual_of(c);
    const double side = std::sin(rad(c.beta)) / std::sin(rad(c.alpha + c.beta));
    const double area = 0.5 * side * std::sin(rad(c.alpha));
    double sum = 0.0, tri = 0.0;
    for (double v : d.cell_measure)
    {
      sum += v;
    }
    for (double v : d.triangle_area)
    {
      tri += v;
    }
    EXPECT_NEAR(sum, area, 1e-13) << c.name();
    EXPECT_NEAR(tri, area, 1e-13) << c.name();
    EXPECT_NEAR(d.domain_area(), area, 1e-13);
  }
}

TEST(Dual, InteriorCellIsTheCircumcenterPolygon)
{
  for (const auto &c : test::test_meshes())
  {
    const DualMesh d = test::dual_of(c);
    const TriMesh &m = d.mesh;
    for (int i = 0; i < m.num_vertices(); ++i)
    {
      if (m.boundary_vertex[i])
      {
        continue;
      }
      std::vector<Vec2> poly;
      for (int k = 0; k < m.num_triangles(); ++k)
      {
        const auto &t = m.triangles[k];
        if (t[0] == i || t[1] == i || t[2] == i)
        {
          poly.push_back(d.circumcenters[k]);
        }
      }
      const Vec2 p = m.vertices[i];
      std::sort(poly.begin(), poly.end(), [&](const Vec2 &a, const Vec2 &b) {
        return std::atan2(a.y() - p.y(), a.x() - p.x()) < std::atan2(b.y() - p.y(), b.x() - p.x());
      });
      double shoelace = 0.0;
      for (std::size_t j = 0; j < poly.size(); ++j)
      {
        shoelace += cross(poly[j], poly[(j + 1) % poly.size()]);
      }
      EXPECT_NEAR(d.cell_measure[i], 0.5 * shoelace, 1e-13) << c.name() << " vertex " << i;
    }
  }
}

TEST(Dual, EtaSignsPointFromTailToHead)
{
  for (const auto &c : test::test_meshes())
  {
    const DualMesh d = test::dual_of(c);
    const EtaTable eta = orient_edges(d);
    for (int e = 0; e < d.mesh.num_edges(); ++e)
    {
      EXPECT_EQ(eta.eta(d.mesh.edges[e][0], e), 1);
      EXPECT_EQ(eta.eta(d.mesh.edges[e][1], e), -1);
    }
    for (int i = 0; i < d.mesh.num_vertices(); ++i)
    {
      for (const auto &[e, s] : eta.incident[i])
      {
        const Vec2 out = d.mesh.vertices[d.mesh.edges[e][s > 0 ? 1 : 0]] - d.mesh.vertices[i];
        EXPECT_GT(s * out.dot(d.edge_tangent[e]), 0.0);
      }
    }
  }
}

TEST(Refinement, ChildrenTileTheirParent)
{
  const TriMesh coarse = build_structured_mesh(70, 60, 2);
  const Refinement r = refine_regular(coarse);
  const DualMesh dc = compute_dual(coarse), df = compute_dual(r.fine);
  ASSERT_EQ(r.fine.num_triangles(), 4 * coarse.num_triangles());
  for (int k = 0; k < coarse.num_triangles(); ++k)
  {
    double area = 0.0;
    for (int child : r.map.children[k])
    {
      EXPECT_EQ(r.map.parent_triangle[child], k);
      area += df.triangle_area[child];
      const auto &x = r.fine.corners[child];
      const Vec2 centroid = (x[0] + x[1] + x[2]) / 3.0;
      for (double b : test::barycentric(coarse.corners[k], centroid))
      {
        EXPECT_GT(b, 0.0);
      }
    }
    EXPECT_NEAR(area, dc.triangle_area[k], 1e-15);
  }
  for (int e = 0; e < coarse.num_edges(); ++e)
  {
    const Vec2 mid = r.fine.vertices[r.map.midpoint_vertex[e]];
    EXPECT_NEAR((mid - dc.edge_midpoint[e]).norm(), 0.0, 1e-15);
    for (int h = 0; h < 2; ++h)
    {
      const auto &fe = r.fine.edges[r.map.edge_children[e][h]];
      EXPECT_NEAR(df.edge_length[r.map.edge_children[e][h]], 0.5 * dc.edge_length[e], 1e-15);
      std::set<int> ends{fe[0], fe[1]};
      EXPECT_TRUE(ends.count(r.map.midpoint_vertex[e]));
      EXPECT_TRUE(ends.count(coarse.edges[e][h]));
    }
  }
}

TEST(Refinement, StructuredMeshEqualsRepeatedRefinement)
{
  TriMesh m = build_structured_mesh(50, 65, 0);
  for (int L = 1; L <= 3; ++L)
  {
    m = refine_regular(m).fine;
    const TriMesh direct = build_structured_mesh(50, 65, L);
    ASSERT_EQ(m.num_vertices(), direct.num_vertices());
    for (int i = 0; i < m.num_vertices(); ++i)
    {
      EXPECT_NEAR((m.vertices[i] - direct.vertices[i]).norm(), 0.0, 1e-14);
    }
    EXPECT_EQ(m.triangles, direct.triangles);
  }
}

TEST(Periodic, TorusTopology)
{
  for (int n : {4, 8, 16})
  {
    const TriMesh m = build_periodic_mesh(70, 60, n, 0.1);
    EXPECT_TRUE(m.is_periodic());
    EXPECT_EQ(m.num_edges(), 3 * n * n);
    EXPECT_EQ(m.num_triangles(), 2 * n * n);
    EXPECT_EQ(m.num_vertices(), n * n);
    EXPECT_EQ(m.num_interior_edges(), m.num_edges());
    std::vector<int> valence(m.num_vertices(), 0);
    for (const auto &e : m.edges)
    {
      ++valence[e[0]];
      ++valence[e[1]];
    }
    for (int v : valence)
    {
      EXPECT_EQ(v, 6);
    }
    for (int e = 0; e < m.num_edges(); ++e)
    {
      EXPECT_GE(m.edge_triangles[e][0], 0);
      EXPECT_GE(m.edge_triangles[e][1], 0);
    }
    const DualMesh d = compute_dual(m);
    double area = 0.0;
    for (double v : d.cell_measure)
    {
      area += v;
    }
    double tri = 0.0;
    for (double v : d.triangle_area)
    {
      tri += v;
    }
    EXPECT_NEAR(area, tri, 1e-12);
  }
}

TEST(Periodic, EdgeClassesAreTranslationInvariant)
{
  const int n = 8;
  const DualMesh d = compute_dual(build_periodic_mesh(80, 55, n, 1.0));
  for (int e = 0; e < d.mesh.num_edges(); ++e)
  {
    const int c = e % 3;
    EXPECT_NEAR(d.edge_length[e], d.edge_length[c], 1e-13);
    EXPECT_NEAR(d.dual_length[e], d.dual_length[c], 1e-13);
    EXPECT_NEAR((d.edge_tangent[e] - d.edge_tangent[c]).norm(), 0.0, 1e-13);
  }
}

TEST(Periodic, ParentsContainChildren)
{
  const int n = 8;
  const std::vector<int> parents = periodic_parents(n);
  const TriMesh fine = build_periodic_mesh(60, 70, n, 1.0);
  const TriMesh coarse = build_periodic_mesh(60, 70, n / 2, 2.0);
  ASSERT_EQ(static_cast<int>(parents.size()), fine.num_triangles());
  std::map<int, int> count;
  for (int k = 0; k < fine.num_triangles(); ++k)
  {
    ++count[parents[k]];
    const auto &x = fine.corners[k];
    const Vec2 centroid = (x[0] + x[1] + x[2]) / 3.0;
    // Compare modulo the coarse lattice: shift the parent by lattice periods.
    const auto &p = coarse.corners[parents[k]];
    const Vec2 u = coarse.corners[0][1] - coarse.corners[0][0];
    const Vec2 v = coarse.corners[0][2] - coarse.corners[0][0];
    bool inside = false;
    for (int a = -1; a <= 1 && !inside; ++a)
    {
      for (int b = -1; b <= 1 && !inside; ++b)
      {
        const Vec2 shift = (n / 2) * (a * u + b * v);
        const auto bary = test::barycentric({p[0] + shift, p[1] + shift, p[2] + shift}, centroid);
        inside = bary[0] > 0 && bary[1] > 0 && bary[2] > 0;
      }
    }
    EXPECT_TRUE(inside) << "fine triangle " << k;
  }
  EXPECT_EQ(static_cast<int>(count.size()), coarse.num_triangles());
  for (const auto &[k, c] : count)
  {
    EXPECT_EQ(c, 4);
  }
}

TEST(MeshIO, RoundTrip)
{
  const TriMesh m = build_structured_mesh(70, 60, 3);
  std::stringstream ss;
  write_mesh(ss, m);
  const TriMesh r = read_mesh(ss);
  ASSERT_EQ(r.num_vertices(), m.num_vertices());
  ASSERT_EQ(r.num_edges(), m.num_edges());
  EXPECT_EQ(r.triangles, m.triangles);
  EXPECT_EQ(r.edges, m.edges);
  for (int i = 0; i < m.num_vertices(); ++i)
  {
    EXPECT_EQ(r.vertices[i], m.vertices[i]);
  }
  EXPECT_DOUBLE_EQ(r.alpha, 70.0);
  EXPECT_EQ(r.level, 3);
}

TEST(MeshIO, RejectsGarbage)
{
  std::stringstream ss("3 2 1 60 60 0\n0 0\n");
  EXPECT_ANY_THROW(read_mesh(ss));
}

TEST(Geometry, CircumcenterOfRightTriangleIsHypotenuseMidpoint)
{
  const Vec2 c = circumcenter(Vec2(0, 0), Vec2(2, 0), Vec2(0, 2));
  EXPECT_NEAR((c - Vec2(1, 1)).norm(), 0.0, 1e-15);
}

TEST(Dual, UnitEquilateralCircumcenterIsTheCentroid)
{
  const DualMesh d = compute_dual(build_structured_mesh(60, 60, 0));
  const auto &x = d.mesh.corners[0];
  const Vec2 centroid = (x[0] + x[1] + x[2]) / 3.0;
  EXPECT_NEAR((d.circumcenters[0] - centroid).norm(), 0.0, 1e-15);
  EXPECT_NEAR((d.circumcenters[0] - x[0]).norm(), 1.0 / std::sqrt(3.0), 1e-15);
}

TEST(Dual, VoronoiEdgesAreOrthogonalToDelaunayEdges)
{
  for (const auto &c : test::test_meshes())
  {
    const DualMesh d = test::dual_of(c);
    for (int e = 0; e < d.mesh.num_edges(); ++e)
    {
      const auto &t = d.mesh.edge_triangles[e];
      if (t[0] < 0 || t[1] < 0)
      {
        continue;
      }
      const Vec2 v = d.circumcenters[t[1]] - d.circumcenters[t[0]];
      EXPECT_NEAR(v.norm(), d.dual_length[e], 1e-13);
      EXPECT_LE(std::abs(v.normalized().dot(d.edge_tangent[e])), 1e-12) << c.name();
    }
  }
}
