#ifndef MFDMG_LFA_HPP
#define MFDMG_LFA_HPP

#include <complex>
#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

#include "mfdmg/multigrid.hpp"

namespace mfdmg
{

using Complex = std::complex<double>;

//
// One level of a doubly periodic problem: n x n lattice cells, three edge classes per
// cell (see build_periodic_mesh), A^FD assembled exactly as on bounded meshes, and the
// rescaled canonical transfers to the next coarser torus.
//
struct PeriodicLevel
{
  int n = 0;
  DualMesh dual;
  EdgeDofMap dofs;
  ScalingPair scaling;
  SparseOperator A;
  SparseOperator P;   // to the next coarser level (empty on the last level)
  SparseOperator Pt;  // transpose of P, row access per coarse edge
  SparseOperator R;
};

struct PeriodicProblem
{
  double alpha = 60.0, beta = 60.0, kappa = 1.0;
  int n = 32;
  double spacing = 0.0;
  PatchOrdering ordering = PatchOrdering::LexicographicYX;
  std::vector<PeriodicLevel> levels;  // 0 = finest (n), then n/2, n/4
};

// n: power of two >= 8. `levels` tori are built (2 for two-grid, 3 for three-grid).
// spacing <= 0 selects the default fine mesh size 2^-6; only kappa h^2 enters, and this
// keeps it above roundoff for kappa down to 1e-8.
PeriodicProblem build_periodic(double alpha, double beta, double kappa, int n, int levels = 3,
                               PatchOrdering ordering = PatchOrdering::LexicographicYX,
                               double spacing = 0.0);

// Fourier symbols. Frequencies are in units of the level's own lattice.
Eigen::Matrix3cd stencil_symbol(const PeriodicLevel &level, const Eigen::Vector2d &theta);

// Symbol of one multiplicative vertex-patch sweep on the infinite lattice. Each edge is
// updated by the patches of both endpoints; the ansatz carries old, intermediate and new
// amplitudes per edge class.
Eigen::Matrix3cd smoother_symbol(const PeriodicLevel &level, const Eigen::Vector2d &theta,
                                 double omega, PatchOrdering ordering);

// Harmonics theta + pi h, h in {(0,0), (1,0), (0,1), (1,1)}, in fine lattice units.
std::array<Eigen::Vector2d, 4> harmonics(const Eigen::Vector2d &theta);

// 12 x 3 and 3 x 12 transfer symbols between `fine` and the next coarser level, for the
// low frequency theta (fine units).
Eigen::MatrixXcd prolongation_symbol(const PeriodicLevel &fine, const Eigen::Vector2d &theta);
Eigen::MatrixXcd restriction_symbol(const PeriodicLevel &fine, const Eigen::Vector2d &theta);

struct SpectralResult
{
  double factor = 0.0;
  Eigen::Vector2d dominant_theta = Eigen::Vector2d::Zero();
  int n = 0;
  int nu1 = 0, nu2 = 0, gamma = 0;
  double omega = 1.0;
  bool converged = true;
};

// Low frequencies form the Brillouin zone of the coarse lattice: theta is low when it is
// strictly closer to 0 than to every other point of pi Z^2 in the metric dual to the
// lattice vectors. Ties count as high.
bool is_high_frequency(const PeriodicLevel &level, const Eigen::Vector2d &theta);

// mu: supremum over high frequencies of the one-sweep smoother spectral radius, sampled
// on a frequency grid of at least 128 points per direction; the result's factor is mu^nu.
SpectralResult smoothing_factor(const PeriodicProblem &prob, int nu, double omega = 1.0);

SpectralResult two_grid_factor(const PeriodicProblem &prob, int nu1, int nu2, double omega = 1.0);

SpectralResult three_grid_factor(const PeriodicProblem &prob, int nu1, int nu2, int gamma,
                                 double omega = 1.0);

// Error propagation symbols for one frequency (exposed for testing).
Eigen::MatrixXcd two_grid_symbol(const PeriodicProblem &prob, const Eigen::Vector2d &theta,
                                 int nu1, int nu2, double omega);
Eigen::MatrixXcd three_grid_symbol(const PeriodicProblem &prob, const Eigen::Vector2d &theta,
                                   int nu1, int nu2, int gamma, double omega);

double spectral_radius(const Eigen::MatrixXcd &m);

struct SweepPoint
{
  double alpha = 0.0, beta = 0.0, kappa = 0.0;
  int nu = 0, gamma = 0;
  double omega = 1.0;
  double factor = 0.0;
  int n = 0;
  bool converged = false;  // false: skipped (non-acute) or failed
};

// Three-grid factors with (nu1, nu2) = (nu - nu/2, nu/2) over a grid of angles.
std::vector<SweepPoint> angle_sweep(const std::vector<double> &alphas,
                                    const std::vector<double> &betas, double kappa, int nu,
                                    int gamma, double omega, int n);

void write_sweep_csv(std::ostream &out, const std::vector<SweepPoint> &points);

struct OmegaOptimum
{
  double omega = 1.0;
  double factor = 0.0;
  bool unimodal = true;  // false: grid-scan minimum returned
};

OmegaOptimum optimize_omega(const PeriodicProblem &prob, int nu1, int nu2, int gamma,
                            double omega_lo, double omega_hi, int scan_points = 21);

}  // namespace mfdmg

#endif  // MFDMG_LFA_HPP
