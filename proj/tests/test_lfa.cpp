#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "mfdmg/lfa.hpp"

using namespace mfdmg;

namespace
{

constexpr double kPi = std::numbers::pi;

using VectorXc = Eigen::VectorXcd;

// Edge e = 3 (a + n b) + c carries amp[c] exp(i theta . (a, b)).
VectorXc fourier_mode(const PeriodicLevel &lvl, const Eigen::Vector2d &theta,
                      const Eigen::Vector3cd &amp)
{
  const int n = lvl.n;
  VectorXc u(lvl.dofs.size());
  for (int i = 0; i < lvl.dofs.size(); ++i)
  {
    const int e = lvl.dofs.edge_of_dof[i];
    const int cell = e / 3;
    const double ph = theta.x() * (cell % n) + theta.y() * (cell / n);
    u[i] = amp[e % 3] * std::exp(Complex(0.0, ph));
  }
  return u;
}

VectorXc harmonic_mode(const PeriodicLevel &lvl, const Eigen::Vector2d &theta, const VectorXc &v)
{
  const auto th = harmonics(theta);
  VectorXc u = VectorXc::Zero(lvl.dofs.size());
  for (int h = 0; h < 4; ++h)
  {
    u += fourier_mode(lvl, th[h], v.segment<3>(3 * h));
  }
  return u;
}

VectorXc apply_real(const SparseOperator &A, const VectorXc &u)
{
  return A.cast<Complex>() * u;
}

VectorXc random_complex(int n, std::mt19937_64 &rng)
{
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  VectorXc v(n);
  for (auto &x : v)
  {
    x = Complex(d(rng), d(rng));
  }
  return v;
}

Eigen::Vector2d torus_frequency(int kx, int ky, int n)
{
  return Eigen::Vector2d(2.0 * kPi * kx / n, 2.0 * kPi * ky / n);
}

}  // namespace

TEST(Lfa, StencilSymbolActsOnFourierModes)
{
  std::mt19937_64 rng(1);
  for (auto [alpha, beta] : {std::pair{60.0, 60.0}, {80.0, 80.0}, {55.0, 80.0}})
  {
    const PeriodicProblem prob = build_periodic(alpha, beta, 0.3, 16, 1);
    const PeriodicLevel &lvl = prob.levels[0];
    for (auto [kx, ky] : {std::pair{0, 0}, {1, 0}, {3, -2}, {-8, 5}, {7, 7}})
    {
      const Eigen::Vector2d theta = torus_frequency(kx, ky, lvl.n);
      const Eigen::Vector3cd v = random_complex(3, rng);
      const VectorXc got = apply_real(lvl.A, fourier_mode(lvl, theta, v));
      const VectorXc want = fourier_mode(lvl, theta, stencil_symbol(lvl, theta) * v);
      EXPECT_LE((got - want).cwiseAbs().maxCoeff(), 1e-10 * want.cwiseAbs().maxCoeff())
          << alpha << " " << beta << " k " << kx << "," << ky;
    }
  }
}

TEST(Lfa, PeriodicRowsAreShiftIdentical)
{
  const PeriodicProblem prob = build_periodic(70, 60, 1.0, 8, 1);
  const PeriodicLevel &lvl = prob.levels[0];
  const int n = lvl.n;
  const Eigen::MatrixXd A = Eigen::MatrixXd(lvl.A);
  auto shift = [&](int e, int da, int db) {
    const int cell = e / 3;
    const int a = (cell % n + da + n) % n, b = (cell / n + db + n) % n;
    return 3 * (a + n * b) + e % 3;
  };
  for (int c = 0; c < 3; ++c)
  {
    for (int da = 0; da < n; ++da)
    {
      for (int db = 0; db < n; ++db)
      {
        const int row = shift(c, da, db);
        for (int e = 0; e < 3 * n * n; ++e)
        {
          EXPECT_NEAR(A(row, shift(e, da, db)), A(c, e), 1e-9 * A.cwiseAbs().maxCoeff());
        }
      }
    }
  }
}

TEST(Lfa, TransferSymbolsActOnModes)
{
  std::mt19937_64 rng(2);
  const PeriodicProblem prob = build_periodic(80, 80, 1.0, 16, 2);
  const PeriodicLevel &fine = prob.levels[0], &coarse = prob.levels[1];
  for (auto [kx, ky] : {std::pair{0, 0}, {1, 0}, {-3, 2}, {2, -4}})
  {
    const Eigen::Vector2d theta = torus_frequency(kx, ky, fine.n);
    const Eigen::Vector3cd c = random_complex(3, rng);
    const VectorXc pu = apply_real(fine.P, fourier_mode(coarse, 2.0 * theta, c));
    const VectorXc want = harmonic_mode(fine, theta, prolongation_symbol(fine, theta) * c);
    EXPECT_LE((pu - want).cwiseAbs().maxCoeff(), 1e-12 * want.cwiseAbs().maxCoeff());

    const VectorXc v = random_complex(12, rng);
    const VectorXc ru = apply_real(fine.R, harmonic_mode(fine, theta, v));
    const VectorXc rwant = fourier_mode(coarse, 2.0 * theta, restriction_symbol(fine, theta) * v);
    EXPECT_LE((ru - rwant).cwiseAbs().maxCoeff(), 1e-12 * rwant.cwiseAbs().maxCoeff());
  }
}

TEST(Lfa, CoarseGridCorrectionMatchesTorusOperator)
{
  std::mt19937_64 rng(3);
  for (auto [alpha, beta] : {std::pair{60.0, 60.0}, {70.0, 60.0}})
  {
    const PeriodicProblem prob =
        build_periodic(alpha, beta, 1.0, 8, 2, PatchOrdering::LexicographicYX, 0.125);
    const PeriodicLevel &fine = prob.levels[0];
    const Eigen::MatrixXd A = Eigen::MatrixXd(fine.A);
    const Eigen::MatrixXd Ac = Eigen::MatrixXd(prob.levels[1].A);
    const Eigen::MatrixXd P = Eigen::MatrixXd(fine.P), R = Eigen::MatrixXd(fine.R);
    const Eigen::MatrixXcd K =
        (Eigen::MatrixXd::Identity(A.rows(), A.cols()) - P * Ac.inverse() * R * A).cast<Complex>();
    for (int kx = -2; kx < 2; ++kx)
    {
      for (int ky = -2; ky < 2; ++ky)
      {
        const Eigen::Vector2d theta = torus_frequency(kx, ky, fine.n);
        const VectorXc v = random_complex(12, rng);
        const VectorXc got = K * harmonic_mode(fine, theta, v);
        const VectorXc want =
            harmonic_mode(fine, theta, two_grid_symbol(prob, theta, 0, 0, 1.0) * v);
        EXPECT_LE((got - want).cwiseAbs().maxCoeff(), 1e-10 * v.cwiseAbs().maxCoeff())
            << alpha << " " << beta << " k " << kx << "," << ky;
      }
    }
  }
}

TEST(Lfa, CoarseGridCorrectionIsAProjection)
{
  const PeriodicProblem prob = build_periodic(60, 60, 1.0, 16, 2);
  const Eigen::MatrixXcd K = two_grid_symbol(prob, Eigen::Vector2d(0.3, -0.7), 0, 0, 1.0);
  EXPECT_LE((K * K - K).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_NEAR(K.trace().real(), 9.0, 1e-9);
}

TEST(Lfa, SmootherSymbolMatchesTorusSweepAwayFromSeams)
{
  const PeriodicProblem prob = build_periodic(60, 60, 1.0, 64, 1);
  const PeriodicLevel &lvl = prob.levels[0];
  const auto patches = build_patches(lvl.dual, lvl.dofs, lvl.A);
  const int n = lvl.n;
  for (auto [kx, ky] : {std::pair{16, 0}, {32, 32}, {-20, 9}})
  {
    const Eigen::Vector2d theta = torus_frequency(kx, ky, n);
    const Eigen::Vector3cd v(1.0, Complex(0.3, -0.2), -0.5);
    const VectorXc u = fourier_mode(lvl, theta, v);
    Eigen::VectorXd re = u.real(), im = u.imag();
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(u.size());
    schwarz_step(lvl.A, zero, re, patches, 1.0);
    schwarz_step(lvl.A, zero, im, patches, 1.0);
    const VectorXc want = fourier_mode(lvl, theta, smoother_symbol(lvl, theta, 1.0,
                                                                  PatchOrdering::LexicographicYX) * v);
    double worst = 0.0;
    for (int b = n / 2 - 2; b <= n / 2 + 2; ++b)
    {
      for (int a = n / 2 - 2; a <= n / 2 + 2; ++a)
      {
        for (int c = 0; c < 3; ++c)
        {
          const int i = lvl.dofs.dof_of_edge[3 * (a + n * b) + c];
          worst = std::max(worst, std::abs(Complex(re[i], im[i]) - want[i]));
        }
      }
    }
    EXPECT_LE(worst, 1e-6) << "k " << kx << "," << ky;
  }
}

TEST(Lfa, SmootherIsTheIdentityForZeroDamping)
{
  const PeriodicProblem prob = build_periodic(70, 60, 1.0, 16, 1);
  const Eigen::Matrix3cd S =
      smoother_symbol(prob.levels[0], Eigen::Vector2d(1.0, 2.0), 0.0, PatchOrdering::LexicographicYX);
  EXPECT_LE((S - Eigen::Matrix3cd::Identity()).cwiseAbs().maxCoeff(), 1e-14);
  const PeriodicProblem small = build_periodic(60, 60, 1.0, 16, 2);
  EXPECT_GT(smoothing_factor(small, 1, 1e-3).factor, 0.99);
}

TEST(Lfa, NaturalOrderingIsRejected)
{
  const PeriodicProblem prob = build_periodic(60, 60, 1.0, 16, 1);
  EXPECT_THROW(smoother_symbol(prob.levels[0], Eigen::Vector2d(1.0, 0.0), 1.0, PatchOrdering::Natural),
               std::invalid_argument);
}

TEST(Lfa, NonAcuteTriangleIsRejected)
{
  EXPECT_THROW(build_periodic(95, 40, 1.0, 16, 2), AcutenessError);
  const auto pts = angle_sweep({95.0, 60.0}, {40.0}, 1.0, 1, 1, 1.0, 16);
  ASSERT_EQ(pts.size(), 2u);
  EXPECT_FALSE(pts[0].converged);
  EXPECT_TRUE(std::isnan(pts[0].factor));
  EXPECT_TRUE(pts[1].converged);
  EXPECT_GT(pts[1].factor, 0.0);
  EXPECT_LT(pts[1].factor, 1.0);
}

TEST(Lfa, InvalidGridSizesAreRejected)
{
  EXPECT_THROW(build_periodic(60, 60, 1.0, 12, 1), std::invalid_argument);
  EXPECT_THROW(build_periodic(60, 60, 1.0, 8, 3), std::invalid_argument);
}

TEST(Lfa, HighFrequencyClassification)
{
  const PeriodicProblem prob = build_periodic(60, 60, 1.0, 16, 2);
  const PeriodicLevel &lvl = prob.levels[0];
  EXPECT_FALSE(is_high_frequency(lvl, Eigen::Vector2d(0.0, 0.0)));
  EXPECT_FALSE(is_high_frequency(lvl, Eigen::Vector2d(0.1, -0.2)));
  EXPECT_TRUE(is_high_frequency(lvl, Eigen::Vector2d(kPi, 0.0)));
  EXPECT_TRUE(is_high_frequency(lvl, Eigen::Vector2d(kPi, kPi)));
  EXPECT_TRUE(is_high_frequency(lvl, Eigen::Vector2d(-kPi, 0.5)));
  // Exactly one point of a generic coset theta + pi Z^2 is low.
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> d(-kPi, kPi);
  for (int t = 0; t < 200; ++t)
  {
    const Eigen::Vector2d theta(d(rng), d(rng));
    int low = 0;
    for (int gy = -3; gy <= 3; ++gy)
    {
      for (int gx = -3; gx <= 3; ++gx)
      {
        low += is_high_frequency(lvl, theta + kPi * Eigen::Vector2d(gx, gy)) ? 0 : 1;
      }
    }
    EXPECT_EQ(low, 1);
  }
}

TEST(Lfa, SpectralRadiusOfKnownMatrix)
{
  Eigen::MatrixXcd m(2, 2);
  m << 0.0, 2.0, 0.5, 0.0;
  EXPECT_NEAR(spectral_radius(m), 1.0, 1e-14);
  m << Complex(0.0, 0.3), 5.0, 0.0, -0.2;
  EXPECT_NEAR(spectral_radius(m), 0.3, 1e-14);
}

TEST(Lfa, SmoothingFactorBoundsTwoGridFactor)
{
  const PeriodicProblem prob = build_periodic(60, 60, 1.0, 16, 2);
  for (int nu = 1; nu <= 3; ++nu)
  {
    const double mu_nu = smoothing_factor(prob, nu).factor;
    const double rho = two_grid_factor(prob, nu - nu / 2, nu / 2).factor;
    EXPECT_GT(mu_nu, rho) << nu;
    EXPECT_GT(rho, 0.0);
  }
  const double mu1 = smoothing_factor(prob, 1).factor;
  EXPECT_NEAR(smoothing_factor(prob, 3).factor, mu1 * mu1 * mu1, 1e-12);
}

TEST(Lfa, ThreeGridWithExactMiddleSolveIsBoundedByTwoGrid)
{
  const PeriodicProblem prob = build_periodic(70, 60, 1.0, 16, 3);
  const double rho2 = two_grid_factor(prob, 2, 1).factor;
  const SpectralResult v = three_grid_factor(prob, 2, 1, 1);
  const SpectralResult w = three_grid_factor(prob, 2, 1, 2);
  EXPECT_GE(v.factor, w.factor - 1e-9);
  EXPECT_GE(w.factor, rho2 - 0.02);
  EXPECT_LT(v.factor, 0.2);
  EXPECT_EQ(v.gamma, 1);
  EXPECT_EQ(w.gamma, 2);
}

TEST(Lfa, SymbolsAreInvariantUnderLatticeShift)
{
  const PeriodicProblem prob = build_periodic(80, 80, 1.0, 16, 2);
  const Eigen::Vector2d theta(0.4, -1.1);
  const Eigen::Vector2d shifted = theta + Eigen::Vector2d(2.0 * kPi, -2.0 * kPi);
  EXPECT_LE((stencil_symbol(prob.levels[0], theta) - stencil_symbol(prob.levels[0], shifted))
                .cwiseAbs()
                .maxCoeff(),
            1e-9);
}

TEST(Lfa, DegenerateOmegaRange)
{
  const PeriodicProblem prob = build_periodic(60, 60, 1.0, 16, 3);
  const OmegaOptimum opt = optimize_omega(prob, 2, 1, 1, 1.0, 1.0);
  EXPECT_DOUBLE_EQ(opt.omega, 1.0);
  EXPECT_NEAR(opt.factor, three_grid_factor(prob, 2, 1, 1, 1.0).factor, 1e-12);
}

TEST(Lfa, OptimizedOmegaImprovesFlatMeshes)
{
  const PeriodicProblem prob = build_periodic(80, 80, 1.0, 16, 3);
  const double base = three_grid_factor(prob, 2, 1, 1, 1.0).factor;
  const OmegaOptimum opt = optimize_omega(prob, 2, 1, 1, 0.8, 1.8, 11);
  EXPECT_GT(opt.omega, 1.0);
  EXPECT_LT(opt.factor, base);
}

TEST(Lfa, SweepCsvFormat)
{
  const auto pts = angle_sweep({60.0}, {60.0, 70.0}, 1.0, 2, 1, 1.0, 16);
  std::ostringstream out;
  write_sweep_csv(out, pts);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "alpha,beta,kappa,nu,gamma,omega,factor,n,converged_flag");
  int rows = 0;
  while (std::getline(in, line))
  {
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 8);
    ++rows;
  }
  EXPECT_EQ(rows, 2);
}
