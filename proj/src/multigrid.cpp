#include "mfdmg/multigrid.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <random>
#include <stdexcept>

#include "mfdmg/mfd_system.hpp"

namespace mfdmg
{

PatchOrdering parse_ordering(const std::string &name)
{
  if (name == "yx" || name == "lex")
  {
    return PatchOrdering::LexicographicYX;
  }
  if (name == "xy")
  {
    return PatchOrdering::LexicographicXY;
  }
  if (name == "natural")
  {
    return PatchOrdering::Natural;
  }
  throw std::invalid_argument("unknown patch ordering '" + name + "'");
}

std::string to_string(PatchOrdering ordering)
{
  switch (ordering)
  {
    case PatchOrdering::LexicographicYX:
      return "yx";
    case PatchOrdering::LexicographicXY:
      return "xy";
    case PatchOrdering::Natural:
      return "natural";
  }
  return "?";
}

std::vector<int> ordered_vertices(const TriMesh &mesh, PatchOrdering ordering)
{
  std::vector<int> order(mesh.num_vertices());
  std::iota(order.begin(), order.end(), 0);
  if (ordering == PatchOrdering::Natural)
  {
    return order;
  }
  // Coordinates on structured grids repeat exactly up to rounding; compare with a
  // tolerance relative to the smallest edge.
  double hmin = std::numeric_limits<double>::max();
  for (const auto &e : mesh.edges)
  {
    hmin = std::min(hmin, (mesh.vertices[e[0]] - mesh.vertices[e[1]]).norm());
  }
  const double tol = 1e-6 * hmin;
  const bool y_major = ordering == PatchOrdering::LexicographicYX;
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    const Vec2 &pa = mesh.vertices[a], &pb = mesh.vertices[b];
    const double major = y_major ? pa.y() - pb.y() : pa.x() - pb.x();
    if (std::abs(major) > tol)
    {
      return major < 0.0;
    }
    const double minor = y_major ? pa.x() - pb.x() : pa.y() - pb.y();
    return std::abs(minor) > tol && minor < 0.0;
  });
  return order;
}

std::vector<SmootherPatch> build_patches(const DualMesh &dual, const EdgeDofMap &dofs,
                                         const SparseOperator &A, const PatchOptions &options)
{
  const auto &mesh = dual.mesh;
  const EtaTable star = orient_edges(dual);
  std::vector<SmootherPatch> patches;
  for (int v : ordered_vertices(mesh, options.ordering))
  {
    if (mesh.boundary_vertex[v] && !options.include_boundary_vertices)
    {
      continue;
    }
    SmootherPatch p;
    p.anchor = v;
    for (const auto &[e, s] : star.incident[v])
    {
      if (dofs.dof_of_edge[e] >= 0)
      {
        p.dofs.push_back(dofs.dof_of_edge[e]);
      }
    }
    if (p.dofs.empty())
    {
      continue;
    }
    std::sort(p.dofs.begin(), p.dofs.end());
    const int n = static_cast<int>(p.dofs.size());
    Eigen::MatrixXd block(n, n);
    for (int i = 0; i < n; ++i)
    {
      for (int j = 0; j < n; ++j)
      {
        block(i, j) = A.coeff(p.dofs[i], p.dofs[j]);
      }
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(block);
    if (!lu.isInvertible())
    {
      throw std::runtime_error("singular smoother block at vertex " + std::to_string(v));
    }
    p.block_inverse = lu.inverse();
    patches.push_back(std::move(p));
  }
  return patches;
}

void schwarz_step(const SparseOperator &A, const Eigen::VectorXd &b, Eigen::VectorXd &x,
                  const std::vector<SmootherPatch> &patches, double omega)
{
  Eigen::VectorXd r, dx;
  for (const auto &p : patches)
  {
    const int n = static_cast<int>(p.dofs.size());
    r.resize(n);
    for (int i = 0; i < n; ++i)
    {
      const int row = p.dofs[i];
      double s = b(row);
      for (SparseOperator::InnerIterator it(A, row); it; ++it)
      {
        s -= it.value() * x(it.col());
      }
      r(i) = s;
    }
    dx.noalias() = p.block_inverse * r;
    for (int i = 0; i < n; ++i)
    {
      x(p.dofs[i]) += omega * dx(i);
    }
  }
}

SparseOperator nedelec_prolongation(const DualMesh &coarse, const EdgeDofMap &coarse_dofs,
                                    const DualMesh &fine, const EdgeDofMap &fine_dofs,
                                    const std::vector<int> &parents)
{
  const auto &fm = fine.mesh;
  const auto &cm = coarse.mesh;
  if (static_cast<int>(parents.size()) != fm.num_triangles() ||
      fm.num_triangles() != 4 * cm.num_triangles())
  {
    throw GeometryError("fine mesh is not a regular refinement of the coarse mesh");
  }
  Triplets t;
  std::vector<bool> done(fm.num_edges(), false);
  for (int k = 0; k < fm.num_triangles(); ++k)
  {
    const int K = parents[k];
    if (K < 0 || K >= cm.num_triangles())
    {
      throw GeometryError("parent triangle out of range");
    }
    const LocalNedelec parent(cm.corners[K]);
    const auto &xc = cm.corners[K];
    const auto &xf = fm.corners[k];
    for (int c = 0; c < 3; ++c)
    {
      const int f = fm.triangle_edges[k][c];
      const int row = fine_dofs.dof_of_edge[f];
      if (row < 0 || done[f])
      {
        continue;
      }
      done[f] = true;
      const Vec2 &p = xf[(c + 1) % 3], &q = xf[(c + 2) % 3];
      const Vec2 mid = 0.5 * (p + q);
      const Vec2 vec = fm.triangle_edge_signs[k][c] * (q - p);
      std::array<double, 3> bary{};
      for (int i = 0; i < 3; ++i)
      {
        bary[i] = (i == 0 ? 1.0 : 0.0) + parent.grad_lambda[i].dot(mid - xc[0]);
        if (bary[i] < -1e-10 || bary[i] > 1.0 + 1e-10)
        {
          throw GeometryError("fine triangle " + std::to_string(k) +
                              " lies outside its parent triangle");
        }
      }
      // The tangential component of a lowest-order edge function is linear along the
      // edge, so the midpoint rule gives the exact moment.
      const auto phi = parent.basis(bary);
      for (int d = 0; d < 3; ++d)
      {
        const int col = coarse_dofs.dof_of_edge[cm.triangle_edges[K][d]];
        if (col < 0)
        {
          continue;
        }
        const double w = cm.triangle_edge_signs[K][d] * phi[d].dot(vec);
        if (std::abs(w) > 1e-13)
        {
          t.emplace_back(row, col, w);
        }
      }
    }
  }
  return from_triplets(fine_dofs.size(), coarse_dofs.size(), t);
}

TransferPair rescale_transfers(const SparseOperator &PN, const ScalingPair &coarse,
                               const ScalingPair &fine)
{
  TransferPair out;
  out.P = fine.d2.cwiseInverse().asDiagonal() * PN * coarse.d2.asDiagonal();
  SparseOperator PNt = PN.transpose();
  out.R = coarse.d1.asDiagonal() * PNt * fine.d1.cwiseInverse().asDiagonal();
  out.P.makeCompressed();
  out.R.makeCompressed();
  return out;
}

MGHierarchy::MGHierarchy(const HierarchyOptions &options) : options_(options)
{
  if (options.fine_level < 2)
  {
    throw std::invalid_argument("multigrid needs at least 2 refinement levels");
  }
  // Collect meshes from level 1 upwards (level 0 has no interior edges).
  std::vector<TriMesh> meshes;
  std::vector<RefinementMap> maps;  // maps[i]: meshes[i] -> meshes[i+1]
  meshes.push_back(build_structured_mesh(options.alpha, options.beta, 1));
  while (meshes.back().level < options.fine_level)
  {
    auto ref = refine_regular(meshes.back());
    maps.push_back(std::move(ref.map));
    meshes.push_back(std::move(ref.fine));
  }
  int first = 0;
  if (options.coarsest_level >= 1)
  {
    first = std::min(options.coarsest_level, options.fine_level - 1) - 1;
  }
  else
  {
    while (first < static_cast<int>(meshes.size()) - 2 &&
           meshes[first].num_interior_edges() < options.min_coarse_dofs)
    {
      ++first;
    }
  }

  for (int i = first; i < static_cast<int>(meshes.size()); ++i)
  {
    MGLevel lvl;
    lvl.dual = compute_dual(std::move(meshes[i]));
    lvl.dofs = EdgeDofMap::interior(lvl.dual.mesh);
    MfdSystem sys = assemble_curlrot_mfd(lvl.dual, options.kappa, lvl.dofs);
    lvl.scaling = std::move(sys.scaling);
    lvl.A = std::move(sys.system.matrix);
    if (!levels_.empty())
    {
      const MGLevel &c = levels_.back();
      lvl.PN = nedelec_prolongation(c.dual, c.dofs, lvl.dual, lvl.dofs,
                                    maps[i - 1].parent_triangle);
      auto tr = rescale_transfers(lvl.PN, c.scaling, lvl.scaling);
      lvl.P = std::move(tr.P);
      lvl.R = std::move(tr.R);
    }
    levels_.push_back(std::move(lvl));
  }

  if (options.coarse_operator == CoarseOperator::Galerkin)
  {
    for (int l = num_levels() - 1; l > 0; --l)
    {
      SparseOperator RAP = levels_[l].R * levels_[l].A * levels_[l].P;
      RAP.prune(0.0, 0.0);
      RAP.makeCompressed();
      levels_[l - 1].A = std::move(RAP);
    }
  }
  for (int l = 1; l < num_levels(); ++l)
  {
    levels_[l].patches = build_patches(levels_[l].dual, levels_[l].dofs, levels_[l].A,
                                       options.patches);
  }
  coarse_lu_.compute(Eigen::MatrixXd(levels_.front().A));
}

Eigen::VectorXd MGHierarchy::coarse_solve(const Eigen::VectorXd &b) const
{
  return coarse_lu_.solve(b);
}

void cycle(const MGHierarchy &hier, const Eigen::VectorXd &b, Eigen::VectorXd &x,
           const CycleOptions &options, int l)
{
  if (l < 0)
  {
    l = hier.num_levels() - 1;
  }
  if (l == 0)
  {
    x = hier.coarse_solve(b);
    return;
  }
  const MGLevel &lvl = hier.level(l);
  for (int s = 0; s < options.nu1; ++s)
  {
    schwarz_step(lvl.A, b, x, lvl.patches, options.omega);
  }
  const Eigen::VectorXd rc = lvl.R * (b - lvl.A * x);
  Eigen::VectorXd ec = Eigen::VectorXd::Zero(rc.size());
  const int visits = (l == 1) ? 1 : options.gamma;
  for (int g = 0; g < visits; ++g)
  {
    cycle(hier, rc, ec, options, l - 1);
  }
  x += lvl.P * ec;
  for (int s = 0; s < options.nu2; ++s)
  {
    schwarz_step(lvl.A, b, x, lvl.patches, options.omega);
  }
}

namespace
{

ConvergenceReport make_report(const MGHierarchy &hier, const CycleOptions &cycle)
{
  ConvergenceReport rep;
  rep.cycle = cycle;
  rep.alpha = hier.options().alpha;
  rep.beta = hier.options().beta;
  rep.kappa = hier.options().kappa;
  rep.fine_level = hier.options().fine_level;
  rep.num_levels = hier.num_levels();
  return rep;
}

double tail_geometric_mean(const std::vector<double> &values, int count)
{
  const int n = static_cast<int>(values.size());
  if (n < 2)
  {
    return 0.0;
  }
  const int m = std::min(count, n - 1);
  if (values[n - 1 - m] <= 0.0 || values[n - 1] <= 0.0)
  {
    return 0.0;
  }
  return std::pow(values[n - 1] / values[n - 1 - m], 1.0 / m);
}

}  // namespace

ConvergenceReport solve(const MGHierarchy &hier, const Eigen::VectorXd &b, Eigen::VectorXd &x,
                        const SolveOptions &options)
{
  if (!(options.tol > 0.0))
  {
    throw std::invalid_argument("tolerance must be positive");
  }
  const MGLevel &fine = hier.finest();
  if (x.size() == 0)
  {
    x = Eigen::VectorXd::Zero(fine.size());
  }
  ConvergenceReport rep = make_report(hier, options.cycle);
  const double r0 = (b - fine.A * x).norm();
  rep.residuals.push_back(r0);
  if (r0 == 0.0)
  {
    rep.converged = true;
    return rep;
  }
  while (rep.iterations < options.max_iters)
  {
    cycle(hier, b, x, options.cycle);
    ++rep.iterations;
    rep.residuals.push_back((b - fine.A * x).norm());
    if (rep.residuals.back() <= options.tol * r0)
    {
      rep.converged = true;
      break;
    }
  }
  rep.factor = tail_geometric_mean(rep.residuals, 5);
  if (!rep.converged)
  {
    throw DivergenceError("multigrid did not reach the tolerance within " +
                              std::to_string(options.max_iters) + " iterations",
                          rep);
  }
  return rep;
}

double asymptotic_factor(const MGHierarchy &hier, const CycleOptions &cycle_options,
                         const PowerOptions &options)
{
  const MGLevel &fine = hier.finest();
  const Eigen::VectorXd w = fine.scaling.d1.cwiseInverse().cwiseProduct(fine.scaling.d2);
  auto norm = [&w](const Eigen::VectorXd &v) { return std::sqrt(v.cwiseProduct(w).dot(v)); };

  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Eigen::VectorXd x(fine.size());
  for (Eigen::Index i = 0; i < x.size(); ++i)
  {
    x(i) = dist(rng);
  }
  x /= norm(x);
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(fine.size());
  std::vector<double> log_ratios;
  for (int it = 0; it < options.iterations; ++it)
  {
    cycle(hier, zero, x, cycle_options);
    const double n = norm(x);
    if (n == 0.0)
    {
      return 0.0;
    }
    log_ratios.push_back(std::log(n));
    x /= n;
  }
  const int m = std::min<int>(options.average_over, static_cast<int>(log_ratios.size()));
  double s = 0.0;
  for (int i = static_cast<int>(log_ratios.size()) - m; i < static_cast<int>(log_ratios.size());
       ++i)
  {
    s += log_ratios[i];
  }
  return std::exp(s / m);
}

void write_residual_csv(std::ostream &out, const ConvergenceReport &report)
{
  out << "iteration,residual\n" << std::setprecision(17);
  for (std::size_t i = 0; i < report.residuals.size(); ++i)
  {
    out << i << ',' << report.residuals[i] << '\n';
  }
}

void write_summary(std::ostream &out, const ConvergenceReport &report)
{
  out << std::setprecision(10) << "{\"alpha\":" << report.alpha << ",\"beta\":" << report.beta
      << ",\"kappa\":" << report.kappa << ",\"fine_level\":" << report.fine_level
      << ",\"num_levels\":" << report.num_levels << ",\"nu1\":" << report.cycle.nu1
      << ",\"nu2\":" << report.cycle.nu2 << ",\"gamma\":" << report.cycle.gamma
      << ",\"omega\":" << report.cycle.omega << ",\"iterations\":" << report.iterations
      << ",\"converged\":" << (report.converged ? "true" : "false")
      << ",\"factor\":" << report.factor << "}\n";
}

}  // namespace mfdmg
