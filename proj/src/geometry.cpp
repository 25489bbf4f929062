#include "mfdmg/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>

namespace mfdmg
{

namespace
{

constexpr double kDeg = std::numbers::pi / 180.0;

double cross(const Vec2 &u, const Vec2 &v)
{
  return u.x() * v.y() - u.y() * v.x();
}

// Distance from p to the line through a and b.
double line_distance(const Vec2 &p, const Vec2 &a, const Vec2 &b)
{
  const Vec2 t = b - a;
  return std::abs(cross(t, p - a)) / t.norm();
}

void build_edges(TriMesh &mesh)
{
  std::map<std::pair<int, int>, int> index;
  const int nt = mesh.num_triangles();
  mesh.triangle_edges.assign(nt, {-1, -1, -1});
  mesh.triangle_edge_signs.assign(nt, {0, 0, 0});
  mesh.edges.clear();
  mesh.edge_triangles.clear();
  for (int k = 0; k < nt; ++k)
  {
    const auto &t = mesh.triangles[k];
    for (int c = 0; c < 3; ++c)
    {
      const int a = t[(c + 1) % 3], b = t[(c + 2) % 3];
      const auto key = std::minmax(a, b);
      auto [it, inserted] = index.try_emplace({key.first, key.second},
                                              static_cast<int>(mesh.edges.size()));
      if (inserted)
      {
        mesh.edges.push_back({key.first, key.second});
        mesh.edge_triangles.push_back({k, -1});
      }
      else
      {
        auto &adj = mesh.edge_triangles[it->second];
        if (adj[1] >= 0)
        {
          throw GeometryError("edge (" + std::to_string(key.first) + ", " +
                              std::to_string(key.second) + ") shared by more than two triangles");
        }
        adj[1] = k;
      }
      mesh.triangle_edges[k][c] = it->second;
      mesh.triangle_edge_signs[k][c] = (a == key.first) ? 1 : -1;
    }
  }
  mesh.boundary_edge.assign(mesh.edges.size(), false);
  mesh.boundary_vertex.assign(mesh.vertices.size(), false);
  for (int e = 0; e < mesh.num_edges(); ++e)
  {
    if (mesh.edge_triangles[e][1] < 0)
    {
      mesh.boundary_edge[e] = true;
      mesh.boundary_vertex[mesh.edges[e][0]] = true;
      mesh.boundary_vertex[mesh.edges[e][1]] = true;
    }
  }
}

void check_angles(double alpha, double beta)
{
  if (!(alpha > 0.0) || !(beta > 0.0) || !(alpha + beta < 180.0) || !std::isfinite(alpha) ||
      !std::isfinite(beta))
  {
    std::ostringstream msg;
    msg << "invalid generating angles (" << alpha << ", " << beta << ")";
    throw GeometryError(msg.str());
  }
}

}  // namespace

AcutenessError::AcutenessError(int triangle, double max_angle_deg)
  : GeometryError("triangle " + std::to_string(triangle) + " is not acute (max angle " +
                  std::to_string(max_angle_deg) + " deg)"),
    triangle_(triangle), max_angle_(max_angle_deg)
{
}

int TriMesh::num_interior_edges() const
{
  return static_cast<int>(std::count(boundary_edge.begin(), boundary_edge.end(), false));
}

int TriMesh::local_edge(int k, int e) const
{
  for (int c = 0; c < 3; ++c)
  {
    if (triangle_edges[k][c] == e)
    {
      return c;
    }
  }
  return -1;
}

void TriMesh::validate() const
{
  const int nv = num_vertices();
  if (corners.size() != triangles.size())
  {
    throw GeometryError("corner table size mismatch");
  }
  for (int k = 0; k < num_triangles(); ++k)
  {
    const auto &t = triangles[k];
    for (int c = 0; c < 3; ++c)
    {
      if (t[c] < 0 || t[c] >= nv)
      {
        throw GeometryError("triangle " + std::to_string(k) + " has an out-of-range vertex");
      }
    }
    if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2])
    {
      throw GeometryError("triangle " + std::to_string(k) + " has repeated vertices");
    }
    const auto &x = corners[k];
    if (!(cross(x[1] - x[0], x[2] - x[0]) > 0.0))
    {
      throw GeometryError("triangle " + std::to_string(k) + " has non-positive area");
    }
  }
  for (int e = 0; e < num_edges(); ++e)
  {
    const auto &adj = edge_triangles[e];
    if (adj[0] < 0)
    {
      throw GeometryError("edge " + std::to_string(e) + " has no adjacent triangle");
    }
    if (!is_periodic() && edges[e][0] >= edges[e][1])
    {
      throw GeometryError("edge " + std::to_string(e) + " not stored smaller index first");
    }
    if (is_periodic() && adj[1] < 0)
    {
      throw GeometryError("periodic mesh has a boundary edge");
    }
  }
}

TriMesh make_mesh(std::vector<Vec2> vertices, std::vector<std::array<int, 3>> triangles)
{
  TriMesh mesh;
  mesh.vertices = std::move(vertices);
  mesh.triangles = std::move(triangles);
  mesh.corners.resize(mesh.triangles.size());
  const int nv = mesh.num_vertices();
  for (int k = 0; k < mesh.num_triangles(); ++k)
  {
    auto &t = mesh.triangles[k];
    for (int c = 0; c < 3; ++c)
    {
      if (t[c] < 0 || t[c] >= nv)
      {
        throw GeometryError("triangle " + std::to_string(k) + " has an out-of-range vertex");
      }
    }
    if (cross(mesh.vertices[t[1]] - mesh.vertices[t[0]],
              mesh.vertices[t[2]] - mesh.vertices[t[0]]) < 0.0)
    {
      std::swap(t[1], t[2]);
    }
    for (int c = 0; c < 3; ++c)
    {
      mesh.corners[k][c] = mesh.vertices[t[c]];
    }
  }
  build_edges(mesh);
  mesh.validate();
  return mesh;
}

TriMesh build_structured_mesh(double alpha, double beta, int levels, double base)
{
  check_angles(alpha, beta);
  if (levels < 0)
  {
    throw GeometryError("refinement level must be non-negative");
  }
  if (!(base > 0.0))
  {
    throw GeometryError("base length must be positive");
  }
  const double a = alpha * kDeg, b = beta * kDeg;
  const double side = base * std::sin(b) / std::sin(a + b);
  TriMesh mesh = make_mesh({Vec2(0.0, 0.0), Vec2(base, 0.0),
                            Vec2(side * std::cos(a), side * std::sin(a))},
                           {{0, 1, 2}});
  mesh.alpha = alpha;
  mesh.beta = beta;
  for (int l = 0; l < levels; ++l)
  {
    mesh = refine_regular(mesh).fine;
  }
  return mesh;
}

Refinement refine_regular(const TriMesh &mesh)
{
  if (mesh.is_periodic())
  {
    throw GeometryError("refine_regular expects a bounded mesh; use build_periodic_mesh");
  }
  Refinement out;
  auto &map = out.map;
  const int nv = mesh.num_vertices(), ne = mesh.num_edges(), nt = mesh.num_triangles();

  std::vector<Vec2> vertices = mesh.vertices;
  vertices.reserve(nv + ne);
  map.midpoint_vertex.resize(ne);
  for (int e = 0; e < ne; ++e)
  {
    const auto [i, j] = mesh.edges[e];
    map.midpoint_vertex[e] = static_cast<int>(vertices.size());
    vertices.push_back(0.5 * (mesh.vertices[i] + mesh.vertices[j]));
  }

  std::vector<std::array<int, 3>> triangles;
  triangles.reserve(4 * nt);
  map.children.resize(nt);
  map.parent_triangle.resize(4 * nt);
  for (int k = 0; k < nt; ++k)
  {
    const auto &t = mesh.triangles[k];
    const auto &te = mesh.triangle_edges[k];
    const int m0 = map.midpoint_vertex[te[0]];
    const int m1 = map.midpoint_vertex[te[1]];
    const int m2 = map.midpoint_vertex[te[2]];
    const std::array<std::array<int, 3>, 4> kids = {
        {{t[0], m2, m1}, {m2, t[1], m0}, {m1, m0, t[2]}, {m0, m1, m2}}};
    for (int c = 0; c < 4; ++c)
    {
      map.children[k][c] = static_cast<int>(triangles.size());
      map.parent_triangle[triangles.size()] = k;
      triangles.push_back(kids[c]);
    }
  }

  out.fine = make_mesh(std::move(vertices), std::move(triangles));
  out.fine.alpha = mesh.alpha;
  out.fine.beta = mesh.beta;
  out.fine.level = mesh.level + 1;

  std::map<std::pair<int, int>, int> index;
  for (int e = 0; e < out.fine.num_edges(); ++e)
  {
    index[{out.fine.edges[e][0], out.fine.edges[e][1]}] = e;
  }
  auto find = [&](int a, int b) {
    const auto key = std::minmax(a, b);
    return index.at({key.first, key.second});
  };
  map.edge_children.resize(ne);
  for (int e = 0; e < ne; ++e)
  {
    const auto [i, j] = mesh.edges[e];
    const int m = map.midpoint_vertex[e];
    map.edge_children[e] = {find(i, m), find(m, j)};
  }
  return out;
}

std::array<double, 3> triangle_angles(const TriMesh &mesh, int k)
{
  const auto &x = mesh.corners[k];
  std::array<double, 3> ang{};
  for (int c = 0; c < 3; ++c)
  {
    const Vec2 u = x[(c + 1) % 3] - x[c];
    const Vec2 v = x[(c + 2) % 3] - x[c];
    ang[c] = std::atan2(std::abs(cross(u, v)), u.dot(v)) / kDeg;
  }
  return ang;
}

AcuteReport check_acute(const TriMesh &mesh, double margin_deg)
{
  AcuteReport report;
  const double limit = 90.0 - margin_deg;
  for (int k = 0; k < mesh.num_triangles(); ++k)
  {
    const auto ang = triangle_angles(mesh, k);
    const double amax = *std::max_element(ang.begin(), ang.end());
    report.max_angle = std::max(report.max_angle, amax);
    if (!(amax < limit - 1e-12))
    {
      report.pass = false;
      report.offending.push_back(k);
    }
  }
  return report;
}

Vec2 circumcenter(const Vec2 &a, const Vec2 &b, const Vec2 &c)
{
  const Vec2 u = b - a, v = c - a;
  const double d = 2.0 * cross(u, v);
  const double uu = u.squaredNorm(), vv = v.squaredNorm();
  return a + Vec2(v.y() * uu - u.y() * vv, u.x() * vv - v.x() * uu) / d;
}

double DualMesh::domain_area() const
{
  double s = 0.0;
  for (double a : triangle_area)
  {
    s += a;
  }
  return s;
}

DualMesh compute_dual(TriMesh mesh, double margin_deg)
{
  const auto report = check_acute(mesh, margin_deg);
  if (!report.pass)
  {
    const int k = report.offending.front();
    const auto ang = triangle_angles(mesh, k);
    throw AcutenessError(k, *std::max_element(ang.begin(), ang.end()));
  }

  DualMesh dual;
  const int nt = mesh.num_triangles(), ne = mesh.num_edges(), nv = mesh.num_vertices();
  dual.circumcenters.resize(nt);
  dual.triangle_area.resize(nt);
  dual.edge_length.assign(ne, 0.0);
  dual.dual_length.assign(ne, 0.0);
  dual.cell_measure.assign(nv, 0.0);
  dual.edge_tangent.resize(ne);
  dual.edge_midpoint.resize(ne);
  std::vector<bool> seen(ne, false);

  for (int k = 0; k < nt; ++k)
  {
    const auto &x = mesh.corners[k];
    const Vec2 cc = circumcenter(x[0], x[1], x[2]);
    dual.circumcenters[k] = cc;
    dual.triangle_area[k] = 0.5 * cross(x[1] - x[0], x[2] - x[0]);

    std::array<double, 3> dist{}, len{};
    for (int c = 0; c < 3; ++c)
    {
      const Vec2 &p = x[(c + 1) % 3], &q = x[(c + 2) % 3];
      const int e = mesh.triangle_edges[k][c];
      dist[c] = line_distance(cc, p, q);
      len[c] = (q - p).norm();
      dual.dual_length[e] += dist[c];
      if (!seen[e])
      {
        seen[e] = true;
        dual.edge_length[e] = len[c];
        const int s = mesh.triangle_edge_signs[k][c];
        dual.edge_tangent[e] = s * (q - p) / len[c];
        dual.edge_midpoint[e] = 0.5 * (p + q);
      }
    }
    // Kite at corner c is bounded by the half edges c+2 (corner c to c+1) and c+1.
    for (int c = 0; c < 3; ++c)
    {
      const int e1 = (c + 1) % 3, e2 = (c + 2) % 3;
      dual.cell_measure[mesh.triangles[k][c]] +=
          0.25 * (len[e1] * dist[e1] + len[e2] * dist[e2]);
    }
  }
  dual.mesh = std::move(mesh);
  return dual;
}

int EtaTable::eta(int vertex, int edge) const
{
  for (const auto &[e, s] : incident.at(vertex))
  {
    if (e == edge)
    {
      return s;
    }
  }
  throw GeometryError("edge " + std::to_string(edge) + " is not incident to vertex " +
                      std::to_string(vertex));
}

EtaTable orient_edges(const DualMesh &dual)
{
  const auto &mesh = dual.mesh;
  EtaTable table;
  table.incident.resize(mesh.num_vertices());
  for (int e = 0; e < mesh.num_edges(); ++e)
  {
    // The face of V_tail dual to e has outward normal along e^D.
    table.incident[mesh.edges[e][0]].emplace_back(e, +1);
    table.incident[mesh.edges[e][1]].emplace_back(e, -1);
  }
  return table;
}

TriMesh build_periodic_mesh(double alpha, double beta, int n, double spacing)
{
  check_angles(alpha, beta);
  if (n < 3)
  {
    throw GeometryError("periodic lattice needs at least 3 cells per direction");
  }
  const double a = alpha * kDeg, b = beta * kDeg;
  const Vec2 u(spacing, 0.0);
  const double side = spacing * std::sin(b) / std::sin(a + b);
  const Vec2 v(side * std::cos(a), side * std::sin(a));

  TriMesh mesh;
  mesh.alpha = alpha;
  mesh.beta = beta;
  mesh.period = n;
  auto vid = [n](int i, int j) { return ((i % n + n) % n) + n * ((j % n + n) % n); };
  auto pos = [&](int i, int j) -> Vec2 { return i * u + j * v; };

  mesh.vertices.resize(n * n);
  mesh.lattice.resize(n * n);
  for (int j = 0; j < n; ++j)
  {
    for (int i = 0; i < n; ++i)
    {
      mesh.vertices[vid(i, j)] = pos(i, j);
      mesh.lattice[vid(i, j)] = {i, j};
    }
  }

  mesh.edges.resize(3 * n * n);
  mesh.edge_triangles.assign(3 * n * n, {-1, -1});
  mesh.triangles.resize(2 * n * n);
  mesh.corners.resize(2 * n * n);
  mesh.triangle_edges.resize(2 * n * n);
  mesh.triangle_edge_signs.resize(2 * n * n);
  auto eid = [n](int i, int j, int c) {
    return 3 * (((i % n + n) % n) + n * ((j % n + n) % n)) + c;
  };
  for (int j = 0; j < n; ++j)
  {
    for (int i = 0; i < n; ++i)
    {
      mesh.edges[eid(i, j, 0)] = {vid(i, j), vid(i + 1, j)};
      mesh.edges[eid(i, j, 1)] = {vid(i, j), vid(i, j + 1)};
      mesh.edges[eid(i, j, 2)] = {vid(i + 1, j), vid(i, j + 1)};

      const int lower = 2 * (i + n * j), upper = lower + 1;
      mesh.triangles[lower] = {vid(i, j), vid(i + 1, j), vid(i, j + 1)};
      mesh.corners[lower] = {pos(i, j), pos(i + 1, j), pos(i, j + 1)};
      // Opposite (i,j): diagonal, runs ccw. Opposite (i+1,j): c1 reversed. Opposite
      // (i,j+1): c0 runs ccw.
      mesh.triangle_edges[lower] = {eid(i, j, 2), eid(i, j, 1), eid(i, j, 0)};
      mesh.triangle_edge_signs[lower] = {1, -1, 1};

      mesh.triangles[upper] = {vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)};
      mesh.corners[upper] = {pos(i + 1, j), pos(i + 1, j + 1), pos(i, j + 1)};
      // Opposite (i+1,j): top edge c0 of cell (i,j+1), runs reversed. Opposite
      // (i+1,j+1): diagonal, reversed. Opposite (i,j+1): c1 of cell (i+1,j), runs ccw.
      mesh.triangle_edges[upper] = {eid(i, j + 1, 0), eid(i, j, 2), eid(i + 1, j, 1)};
      mesh.triangle_edge_signs[upper] = {-1, -1, 1};
    }
  }
  for (int k = 0; k < mesh.num_triangles(); ++k)
  {
    for (int c = 0; c < 3; ++c)
    {
      auto &adj = mesh.edge_triangles[mesh.triangle_edges[k][c]];
      (adj[0] < 0 ? adj[0] : adj[1]) = k;
    }
  }
  mesh.boundary_edge.assign(mesh.edges.size(), false);
  mesh.boundary_vertex.assign(mesh.vertices.size(), false);
  mesh.validate();
  return mesh;
}

std::vector<int> periodic_parents(int n_fine)
{
  if (n_fine < 6 || n_fine % 2 != 0)
  {
    throw GeometryError("periodic coarsening needs an even lattice size >= 6");
  }
  const int nc = n_fine / 2;
  std::vector<int> parent(2 * n_fine * n_fine);
  for (int j = 0; j < n_fine; ++j)
  {
    for (int i = 0; i < n_fine; ++i)
    {
      const int cell = (i / 2) + nc * (j / 2);
      const bool odd_i = i % 2 == 1, odd_j = j % 2 == 1;
      const int lower = 2 * (i + n_fine * j);
      parent[lower] = 2 * cell + ((odd_i && odd_j) ? 1 : 0);
      parent[lower + 1] = 2 * cell + ((!odd_i && !odd_j) ? 0 : 1);
    }
  }
  return parent;
}

void write_mesh(std::ostream &out, const TriMesh &mesh)
{
  if (mesh.is_periodic())
  {
    throw GeometryError("periodic meshes are not exported");
  }
  out << mesh.num_vertices() << ' ' << mesh.num_triangles() << ' ' << mesh.num_edges() << ' '
      << std::setprecision(17) << mesh.alpha << ' ' << mesh.beta << ' ' << mesh.level << '\n';
  for (const auto &x : mesh.vertices)
  {
    out << x.x() << ' ' << x.y() << '\n';
  }
  for (const auto &t : mesh.triangles)
  {
    out << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  }
  for (const auto &e : mesh.edges)
  {
    out << e[0] << ' ' << e[1] << '\n';
  }
}

TriMesh read_mesh(std::istream &in)
{
  int nv = 0, nt = 0, ne = 0, level = 0;
  double alpha = 0.0, beta = 0.0;
  if (!(in >> nv >> nt >> ne >> alpha >> beta >> level) || nv < 3 || nt < 1 || ne < 3)
  {
    throw GeometryError("malformed mesh header");
  }
  std::vector<Vec2> vertices(nv);
  for (auto &x : vertices)
  {
    if (!(in >> x.x() >> x.y()))
    {
      throw GeometryError("malformed vertex record");
    }
  }
  std::vector<std::array<int, 3>> triangles(nt);
  for (auto &t : triangles)
  {
    if (!(in >> t[0] >> t[1] >> t[2]))
    {
      throw GeometryError("malformed triangle record");
    }
  }
  std::vector<std::array<int, 2>> edges(ne);
  for (auto &e : edges)
  {
    if (!(in >> e[0] >> e[1]))
    {
      throw GeometryError("malformed edge record");
    }
  }
  TriMesh mesh = make_mesh(std::move(vertices), std::move(triangles));
  if (mesh.edges != edges)
  {
    throw GeometryError("edge records do not match the triangle topology");
  }
  mesh.alpha = alpha;
  mesh.beta = beta;
  mesh.level = level;
  return mesh;
}

}  // namespace mfdmg
