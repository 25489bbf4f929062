#include "mfdmg/lfa.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "mfdmg/mfd_system.hpp"

namespace mfdmg
{

namespace
{

constexpr double kPi = std::numbers::pi;
const Complex kI(0.0, 1.0);

bool is_power_of_two(int n)
{
  return n > 0 && (n & (n - 1)) == 0;
}

int wrap(int d, int n)
{
  d = ((d % n) + n) % n;
  return d > n / 2 ? d - n : d;
}

struct EdgeInfo
{
  Eigen::Vector2i cell;  // minimal-image offset from cell (0, 0)
  int cls;
};

EdgeInfo edge_info(int e, int n)
{
  const int cell = e / 3;
  return {Eigen::Vector2i(wrap(cell % n, n), wrap(cell / n, n)), e % 3};
}

// Lattice coordinates of the endpoints of an edge anchored at `cell`.
std::array<Eigen::Vector2i, 2> endpoints(const EdgeInfo &info)
{
  const Eigen::Vector2i &c = info.cell;
  switch (info.cls)
  {
    case 0:
      return {c, c + Eigen::Vector2i(1, 0)};
    case 1:
      return {c, c + Eigen::Vector2i(0, 1)};
    default:
      return {c + Eigen::Vector2i(1, 0), c + Eigen::Vector2i(0, 1)};
  }
}

Complex phase(const Eigen::Vector2d &theta, const Eigen::Vector2i &d)
{
  return std::exp(kI * (theta.x() * d.x() + theta.y() * d.y()));
}

struct StencilEntry
{
  int row_cls;
  int col_cls;
  Eigen::Vector2i offset;
  double value;
};

// Everything needed to evaluate the smoother symbol of one level.
struct PatchStencil
{
  struct Row
  {
    EdgeInfo edge;
    int state;  // 0: not yet updated when the origin patch runs, 1: updated once
    std::vector<std::pair<EdgeInfo, double>> entries;
    std::vector<int> entry_state;
  };
  std::vector<Row> rows;
  Eigen::MatrixXd block_inverse;
};

class Precedence
{
public:
  Precedence(const PeriodicLevel &level, PatchOrdering ordering) : ordering_(ordering)
  {
    if (ordering == PatchOrdering::Natural)
    {
      throw std::invalid_argument("natural ordering is not translation invariant");
    }
    const auto &x = level.dual.mesh.corners[0];
    u_ = x[1] - x[0];
    v_ = x[2] - x[0];
    tol_ = 1e-9 * u_.norm();
  }

  // Does the patch of lattice vertex w run before the patch of the origin?
  bool before_origin(const Eigen::Vector2i &w) const
  {
    const Vec2 p = w.x() * u_ + w.y() * v_;
    const bool y_major = ordering_ == PatchOrdering::LexicographicYX;
    const double major = y_major ? p.y() : p.x();
    if (std::abs(major) > tol_)
    {
      return major < 0.0;
    }
    const double minor = y_major ? p.x() : p.y();
    return minor < -tol_;
  }

private:
  PatchOrdering ordering_;
  Vec2 u_, v_;
  double tol_;
};

PatchStencil make_patch_stencil(const PeriodicLevel &level, PatchOrdering ordering)
{
  const Precedence prec(level, ordering);
  const int n = level.n;
  const auto &mesh = level.dual.mesh;
  auto state_of = [&](const EdgeInfo &info) {
    int s = 0;
    for (const auto &w : endpoints(info))
    {
      if (w != Eigen::Vector2i::Zero() && prec.before_origin(w))
      {
        ++s;
      }
    }
    return s;
  };

  PatchStencil ps;
  std::vector<int> patch_edges;
  for (int e = 0; e < mesh.num_edges(); ++e)
  {
    if (mesh.edges[e][0] == 0 || mesh.edges[e][1] == 0)
    {
      patch_edges.push_back(e);
    }
  }
  const int m = static_cast<int>(patch_edges.size());
  Eigen::MatrixXd block(m, m);
  for (int i = 0; i < m; ++i)
  {
    PatchStencil::Row row;
    row.edge = edge_info(patch_edges[i], n);
    row.state = state_of(row.edge);
    for (SparseOperator::InnerIterator it(level.A, patch_edges[i]); it; ++it)
    {
      const EdgeInfo col = edge_info(static_cast<int>(it.col()), n);
      row.entries.emplace_back(col, it.value());
      row.entry_state.push_back(state_of(col));
    }
    for (int j = 0; j < m; ++j)
    {
      block(i, j) = level.A.coeff(patch_edges[i], patch_edges[j]);
    }
    ps.rows.push_back(std::move(row));
  }
  ps.block_inverse = block.inverse();
  return ps;
}

std::vector<StencilEntry> make_stencil(const PeriodicLevel &level)
{
  std::vector<StencilEntry> out;
  for (int c = 0; c < 3; ++c)
  {
    for (SparseOperator::InnerIterator it(level.A, c); it; ++it)
    {
      const EdgeInfo col = edge_info(static_cast<int>(it.col()), level.n);
      out.push_back({c, col.cls, col.cell, it.value()});
    }
  }
  return out;
}

Eigen::Matrix3cd eval_stencil(const std::vector<StencilEntry> &st, const Eigen::Vector2d &theta)
{
  Eigen::Matrix3cd s = Eigen::Matrix3cd::Zero();
  for (const auto &e : st)
  {
    s(e.row_cls, e.col_cls) += e.value * phase(theta, e.offset);
  }
  return s;
}

Eigen::Matrix3cd eval_smoother(const PatchStencil &ps, const Eigen::Vector2d &theta, double omega)
{
  const int m = static_cast<int>(ps.rows.size());
  if (m != 6)
  {
    throw std::logic_error("periodic vertex patch must hold six edges");
  }
  // Unknowns: intermediate (state 1) and new (state 2) amplitudes per class; state 0 is
  // the given old amplitude.
  Eigen::Matrix<Complex, 6, 6> M = Eigen::Matrix<Complex, 6, 6>::Zero();
  Eigen::Matrix<Complex, 6, 3> N = Eigen::Matrix<Complex, 6, 3>::Zero();
  auto add = [&](int eq, Complex coef, int state, int cls) {
    if (state == 0)
    {
      N(eq, cls) -= coef;
    }
    else
    {
      M(eq, 3 * (state - 1) + cls) += coef;
    }
  };
  std::vector<Complex> residual_row;
  for (int j = 0; j < m; ++j)
  {
    const auto &row = ps.rows[j];
    const Complex pj = phase(theta, row.edge.cell);
    add(j, pj, row.state + 1, row.edge.cls);
    add(j, -pj, row.state, row.edge.cls);
    for (int k = 0; k < m; ++k)
    {
      const double b = omega * ps.block_inverse(j, k);
      if (b == 0.0)
      {
        continue;
      }
      const auto &rk = ps.rows[k];
      for (std::size_t f = 0; f < rk.entries.size(); ++f)
      {
        const auto &[col, a] = rk.entries[f];
        add(j, b * a * phase(theta, col.cell), rk.entry_state[f], col.cls);
      }
    }
  }
  const Eigen::Matrix<Complex, 6, 3> Z = M.partialPivLu().solve(N);
  return Z.bottomRows<3>();
}

struct LevelCache
{
  std::vector<StencilEntry> stencil;
  PatchStencil patch;
};

std::vector<LevelCache> make_caches(const PeriodicProblem &prob, int count)
{
  if (static_cast<int>(prob.levels.size()) < count)
  {
    throw std::invalid_argument("periodic problem has too few levels");
  }
  std::vector<LevelCache> caches;
  for (int l = 0; l < count; ++l)
  {
    LevelCache c;
    c.stencil = make_stencil(prob.levels[l]);
    c.patch = make_patch_stencil(prob.levels[l], prob.ordering);
    caches.push_back(std::move(c));
  }
  return caches;
}

Eigen::MatrixXcd power(const Eigen::MatrixXcd &m, int p)
{
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Identity(m.rows(), m.cols());
  for (int i = 0; i < p; ++i)
  {
    out = m * out;
  }
  return out;
}

struct TwoGridParts
{
  Eigen::MatrixXcd A, S, P, R;
  Eigen::Matrix3cd Ac;
};

TwoGridParts two_grid_parts(const PeriodicProblem &prob, const std::vector<LevelCache> &caches,
                            int fine, const Eigen::Vector2d &theta, double omega)
{
  TwoGridParts parts;
  parts.A = Eigen::MatrixXcd::Zero(12, 12);
  parts.S = Eigen::MatrixXcd::Zero(12, 12);
  const auto th = harmonics(theta);
  for (int h = 0; h < 4; ++h)
  {
    parts.A.block<3, 3>(3 * h, 3 * h) = eval_stencil(caches[fine].stencil, th[h]);
    parts.S.block<3, 3>(3 * h, 3 * h) = eval_smoother(caches[fine].patch, th[h], omega);
  }
  parts.P = prolongation_symbol(prob.levels[fine], theta);
  parts.R = restriction_symbol(prob.levels[fine], theta);
  parts.Ac = eval_stencil(caches[fine + 1].stencil, 2.0 * theta);
  return parts;
}

Eigen::MatrixXcd two_grid_from_parts(const TwoGridParts &p, int nu1, int nu2)
{
  const Eigen::MatrixXcd K = Eigen::MatrixXcd::Identity(12, 12) -
                             p.P * p.Ac.partialPivLu().solve(p.R * p.A);
  return power(p.S, nu2) * K * power(p.S, nu1);
}

Eigen::MatrixXcd three_grid_cached(const PeriodicProblem &prob,
                                   const std::vector<LevelCache> &caches,
                                   const Eigen::Vector2d &theta, int nu1, int nu2, int gamma,
                                   double omega)
{
  Eigen::MatrixXcd Af = Eigen::MatrixXcd::Zero(48, 48);
  Eigen::MatrixXcd Sf = Eigen::MatrixXcd::Zero(48, 48);
  Eigen::MatrixXcd Pf = Eigen::MatrixXcd::Zero(48, 12);
  Eigen::MatrixXcd Rf = Eigen::MatrixXcd::Zero(12, 48);
  Eigen::MatrixXcd Am = Eigen::MatrixXcd::Zero(12, 12);
  // Middle-level frequencies theta + (pi/2) g in fine units, ordered like harmonics().
  const auto mid = harmonics(2.0 * theta);
  for (int g = 0; g < 4; ++g)
  {
    const Eigen::Vector2d theta_g = 0.5 * mid[g];
    const auto th = harmonics(theta_g);
    for (int h = 0; h < 4; ++h)
    {
      const int b = 12 * g + 3 * h;
      Af.block<3, 3>(b, b) = eval_stencil(caches[0].stencil, th[h]);
      Sf.block<3, 3>(b, b) = eval_smoother(caches[0].patch, th[h], omega);
    }
    Pf.block(12 * g, 3 * g, 12, 3) = prolongation_symbol(prob.levels[0], theta_g);
    Rf.block(3 * g, 12 * g, 3, 12) = restriction_symbol(prob.levels[0], theta_g);
    Am.block<3, 3>(3 * g, 3 * g) = eval_stencil(caches[1].stencil, mid[g]);
  }
  const TwoGridParts coarse = two_grid_parts(prob, caches, 1, 2.0 * theta, omega);
  const Eigen::MatrixXcd Em = two_grid_from_parts(coarse, nu1, nu2);
  const Eigen::MatrixXcd inner =
      (Eigen::MatrixXcd::Identity(12, 12) - power(Em, gamma)) * Am.partialPivLu().solve(Rf * Af);
  const Eigen::MatrixXcd K = Eigen::MatrixXcd::Identity(48, 48) - Pf * inner;
  return power(Sf, nu2) * K * power(Sf, nu1);
}

void check_grid(int n, int min_n)
{
  if (!is_power_of_two(n) || n < min_n)
  {
    throw std::invalid_argument("torus size must be a power of two >= " + std::to_string(min_n));
  }
}

}  // namespace

PeriodicProblem build_periodic(double alpha, double beta, double kappa, int n, int levels,
                               PatchOrdering ordering, double spacing)
{
  check_grid(n, 8);
  if (levels < 1 || (n >> (levels - 1)) < 4)
  {
    throw std::invalid_argument("too many periodic levels for this torus size");
  }
  PeriodicProblem prob;
  prob.alpha = alpha;
  prob.beta = beta;
  prob.kappa = kappa;
  prob.n = n;
  prob.spacing = spacing > 0.0 ? spacing : 1.0 / 64.0;
  prob.ordering = ordering;

  double h = prob.spacing;
  int m = n;
  for (int l = 0; l < levels; ++l)
  {
    PeriodicLevel lvl;
    lvl.n = m;
    lvl.dual = compute_dual(build_periodic_mesh(alpha, beta, m, h));
    lvl.dofs = EdgeDofMap::all(lvl.dual.mesh);
    MfdSystem sys = assemble_curlrot_mfd(lvl.dual, kappa, lvl.dofs);
    lvl.scaling = std::move(sys.scaling);
    lvl.A = std::move(sys.system.matrix);
    prob.levels.push_back(std::move(lvl));
    h *= 2.0;
    m /= 2;
  }
  for (int l = 0; l + 1 < levels; ++l)
  {
    auto &f = prob.levels[l];
    const auto &c = prob.levels[l + 1];
    const SparseOperator PN =
        nedelec_prolongation(c.dual, c.dofs, f.dual, f.dofs, periodic_parents(f.n));
    auto tr = rescale_transfers(PN, c.scaling, f.scaling);
    f.P = std::move(tr.P);
    f.R = std::move(tr.R);
    f.Pt = f.P.transpose();
  }
  return prob;
}

Eigen::Matrix3cd stencil_symbol(const PeriodicLevel &level, const Eigen::Vector2d &theta)
{
  return eval_stencil(make_stencil(level), theta);
}

Eigen::Matrix3cd smoother_symbol(const PeriodicLevel &level, const Eigen::Vector2d &theta,
                                 double omega, PatchOrdering ordering)
{
  return eval_smoother(make_patch_stencil(level, ordering), theta, omega);
}

std::array<Eigen::Vector2d, 4> harmonics(const Eigen::Vector2d &theta)
{
  return {theta, theta + Eigen::Vector2d(kPi, 0.0), theta + Eigen::Vector2d(0.0, kPi),
          theta + Eigen::Vector2d(kPi, kPi)};
}

Eigen::MatrixXcd prolongation_symbol(const PeriodicLevel &fine, const Eigen::Vector2d &theta)
{
  if (fine.Pt.rows() == 0)
  {
    throw std::invalid_argument("level has no coarser neighbour");
  }
  const auto th = harmonics(theta);
  Eigen::MatrixXcd P = Eigen::MatrixXcd::Zero(12, 3);
  for (int c = 0; c < 3; ++c)
  {
    for (SparseOperator::InnerIterator it(fine.Pt, c); it; ++it)
    {
      const EdgeInfo row = edge_info(static_cast<int>(it.col()), fine.n);
      for (int h = 0; h < 4; ++h)
      {
        P(3 * h + row.cls, c) += 0.25 * it.value() * phase(th[h], -row.cell);
      }
    }
  }
  return P;
}

Eigen::MatrixXcd restriction_symbol(const PeriodicLevel &fine, const Eigen::Vector2d &theta)
{
  if (fine.R.rows() == 0)
  {
    throw std::invalid_argument("level has no coarser neighbour");
  }
  const auto th = harmonics(theta);
  Eigen::MatrixXcd R = Eigen::MatrixXcd::Zero(3, 12);
  for (int c = 0; c < 3; ++c)
  {
    for (SparseOperator::InnerIterator it(fine.R, c); it; ++it)
    {
      const EdgeInfo col = edge_info(static_cast<int>(it.col()), fine.n);
      for (int h = 0; h < 4; ++h)
      {
        R(c, 3 * h + col.cls) += it.value() * phase(th[h], col.cell);
      }
    }
  }
  return R;
}

double spectral_radius(const Eigen::MatrixXcd &m)
{
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> eig(m, false);
  if (eig.info() != Eigen::Success)
  {
    return std::numeric_limits<double>::quiet_NaN();
  }
  return eig.eigenvalues().cwiseAbs().maxCoeff();
}

Eigen::MatrixXcd two_grid_symbol(const PeriodicProblem &prob, const Eigen::Vector2d &theta,
                                 int nu1, int nu2, double omega)
{
  const auto caches = make_caches(prob, 2);
  return two_grid_from_parts(two_grid_parts(prob, caches, 0, theta, omega), nu1, nu2);
}

Eigen::MatrixXcd three_grid_symbol(const PeriodicProblem &prob, const Eigen::Vector2d &theta,
                                   int nu1, int nu2, int gamma, double omega)
{
  const auto caches = make_caches(prob, 3);
  return three_grid_cached(prob, caches, theta, nu1, nu2, gamma, omega);
}

namespace
{

constexpr int kSmoothingResolution = 128;

bool all_frequencies(const Eigen::Vector2d &)
{
  return true;
}

}  // namespace

bool is_high_frequency(const PeriodicLevel &level, const Eigen::Vector2d &theta)
{
  const auto &x = level.dual.mesh.corners[0];
  Eigen::Matrix2d B;
  B.col(0) = x[1] - x[0];
  B.col(1) = x[2] - x[0];
  const Eigen::Matrix2d metric = (B.transpose() * B).inverse();
  auto dist = [&](const Eigen::Vector2d &t) { return t.dot(metric * t); };
  const double d0 = dist(theta);
  for (int gy = -2; gy <= 2; ++gy)
  {
    for (int gx = -2; gx <= 2; ++gx)
    {
      if ((gx != 0 || gy != 0) &&
          dist(theta - kPi * Eigen::Vector2d(gx, gy)) <= d0 * (1.0 + 1e-12) + 1e-14)
      {
        return true;
      }
    }
  }
  return false;
}

namespace
{

template <typename Keep, typename F>
SpectralResult sup_over(int n, int kmin, int kmax, Keep &&keep, F &&radius)
{
  SpectralResult res;
  res.n = n;
  res.factor = 0.0;
  for (int ky = kmin; ky < kmax; ++ky)
  {
    for (int kx = kmin; kx < kmax; ++kx)
    {
      if (kx == 0 && ky == 0)
      {
        continue;
      }
      const Eigen::Vector2d theta(2.0 * kPi * kx / n, 2.0 * kPi * ky / n);
      if (!keep(theta))
      {
        continue;
      }
      const double r = radius(theta);
      if (!std::isfinite(r))
      {
        res.converged = false;
        continue;
      }
      if (r > res.factor)
      {
        res.factor = r;
        res.dominant_theta = theta;
      }
    }
  }
  return res;
}

}  // namespace

SpectralResult smoothing_factor(const PeriodicProblem &prob, int nu, double omega)
{
  if (nu < 1)
  {
    throw std::invalid_argument("nu must be at least 1");
  }
  check_grid(prob.n, 8);
  const PatchStencil ps = make_patch_stencil(prob.levels[0], prob.ordering);
  const int res_n = std::max(prob.n, kSmoothingResolution);
  SpectralResult res = sup_over(res_n, -res_n / 2, res_n / 2,
                                [&](const Eigen::Vector2d &theta) {
                                  return is_high_frequency(prob.levels[0], theta);
                                },
                                [&](const Eigen::Vector2d &theta) {
                                  return spectral_radius(eval_smoother(ps, theta, omega));
                                });
  res.n = prob.n;
  res.factor = std::pow(res.factor, nu);
  res.nu1 = nu;
  res.omega = omega;
  return res;
}

SpectralResult two_grid_factor(const PeriodicProblem &prob, int nu1, int nu2, double omega)
{
  check_grid(prob.n, 8);
  const auto caches = make_caches(prob, 2);
  SpectralResult res = sup_over(prob.n, -prob.n / 4, prob.n / 4, all_frequencies,
                                [&](const Eigen::Vector2d &theta) {
                                  return spectral_radius(two_grid_from_parts(
                                      two_grid_parts(prob, caches, 0, theta, omega), nu1, nu2));
                                });
  res.nu1 = nu1;
  res.nu2 = nu2;
  res.gamma = 1;
  res.omega = omega;
  return res;
}

SpectralResult three_grid_factor(const PeriodicProblem &prob, int nu1, int nu2, int gamma,
                                 double omega)
{
  check_grid(prob.n, 16);
  if (gamma < 1)
  {
    throw std::invalid_argument("gamma must be at least 1");
  }
  const auto caches = make_caches(prob, 3);
  SpectralResult res = sup_over(prob.n, -prob.n / 8, prob.n / 8, all_frequencies,
                                [&](const Eigen::Vector2d &theta) {
                                  return spectral_radius(three_grid_cached(
                                      prob, caches, theta, nu1, nu2, gamma, omega));
                                });
  res.nu1 = nu1;
  res.nu2 = nu2;
  res.gamma = gamma;
  res.omega = omega;
  return res;
}

std::vector<SweepPoint> angle_sweep(const std::vector<double> &alphas,
                                    const std::vector<double> &betas, double kappa, int nu,
                                    int gamma, double omega, int n)
{
  std::vector<SweepPoint> out;
  for (double a : alphas)
  {
    for (double b : betas)
    {
      SweepPoint p;
      p.alpha = a;
      p.beta = b;
      p.kappa = kappa;
      p.nu = nu;
      p.gamma = gamma;
      p.omega = omega;
      p.n = n;
      const double c = 180.0 - a - b;
      if (!(a > 0.0 && b > 0.0 && c > 0.0 && a < 90.0 && b < 90.0 && c < 90.0))
      {
        p.factor = std::numeric_limits<double>::quiet_NaN();
        p.converged = false;
        out.push_back(p);
        continue;
      }
      const PeriodicProblem prob = build_periodic(a, b, kappa, n, 3);
      const SpectralResult r = three_grid_factor(prob, nu - nu / 2, nu / 2, gamma, omega);
      p.factor = r.factor;
      p.converged = r.converged;
      out.push_back(p);
    }
  }
  return out;
}

void write_sweep_csv(std::ostream &out, const std::vector<SweepPoint> &points)
{
  out << "alpha,beta,kappa,nu,gamma,omega,factor,n,converged_flag\n" << std::setprecision(10);
  for (const auto &p : points)
  {
    out << p.alpha << ',' << p.beta << ',' << p.kappa << ',' << p.nu << ',' << p.gamma << ','
        << p.omega << ',' << p.factor << ',' << p.n << ',' << (p.converged ? 1 : 0) << '\n';
  }
}

OmegaOptimum optimize_omega(const PeriodicProblem &prob, int nu1, int nu2, int gamma,
                            double omega_lo, double omega_hi, int scan_points)
{
  if (omega_hi < omega_lo)
  {
    throw std::invalid_argument("empty omega range");
  }
  auto rho = [&](double w) { return three_grid_factor(prob, nu1, nu2, gamma, w).factor; };
  OmegaOptimum best;
  if (omega_hi == omega_lo)
  {
    best.omega = omega_lo;
    best.factor = rho(omega_lo);
    return best;
  }
  scan_points = std::max(scan_points, 3);
  std::vector<double> w(scan_points), f(scan_points);
  int imin = 0;
  for (int i = 0; i < scan_points; ++i)
  {
    w[i] = omega_lo + (omega_hi - omega_lo) * i / (scan_points - 1);
    f[i] = rho(w[i]);
    if (f[i] < f[imin])
    {
      imin = i;
    }
  }
  int local_minima = 0;
  for (int i = 0; i < scan_points; ++i)
  {
    const bool left = i == 0 || f[i] < f[i - 1];
    const bool right = i == scan_points - 1 || f[i] < f[i + 1];
    if (left && right)
    {
      ++local_minima;
    }
  }
  best.omega = w[imin];
  best.factor = f[imin];
  if (local_minima > 1)
  {
    best.unimodal = false;
    return best;
  }
  // Golden-section refinement inside the scan bracket.
  double a = w[std::max(imin - 1, 0)], b = w[std::min(imin + 1, scan_points - 1)];
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = rho(c), fd = rho(d);
  while (b - a > 1e-3)
  {
    if (fc < fd)
    {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = rho(c);
    }
    else
    {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = rho(d);
    }
  }
  const double wm = 0.5 * (a + b), fm = rho(wm);
  if (fm < best.factor)
  {
    best.omega = wm;
    best.factor = fm;
  }
  return best;
}

}  // namespace mfdmg
