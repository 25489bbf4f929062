#ifndef MFDMG_MULTIGRID_HPP
#define MFDMG_MULTIGRID_HPP

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mfdmg/geometry.hpp"
#include "mfdmg/nedelec.hpp"

namespace mfdmg
{

enum class PatchOrdering
{
  LexicographicYX,  // rows of increasing y, increasing x within a row
  LexicographicXY,
  Natural           // vertex index order
};

PatchOrdering parse_ordering(const std::string &name);
std::string to_string(PatchOrdering ordering);

//
// Vertex star of the overlapping Schwarz smoother: all active edges incident to the
// anchor vertex, with the inverse of the corresponding block of A.
//
struct SmootherPatch
{
  int anchor = -1;
  std::vector<int> dofs;
  Eigen::MatrixXd block_inverse;
};

struct PatchOptions
{
  bool include_boundary_vertices = true;
  PatchOrdering ordering = PatchOrdering::LexicographicYX;
};

std::vector<SmootherPatch> build_patches(const DualMesh &dual, const EdgeDofMap &dofs,
                                         const SparseOperator &A, const PatchOptions &options = {});

// Vertex visiting order used by build_patches.
std::vector<int> ordered_vertices(const TriMesh &mesh, PatchOrdering ordering);

// One multiplicative sweep over the patches: x_p += omega A_pp^{-1} (b - A x)_p.
void schwarz_step(const SparseOperator &A, const Eigen::VectorXd &b, Eigen::VectorXd &x,
                  const std::vector<SmootherPatch> &patches, double omega = 1.0);

// (P^N)_{f,e} = tangential moment on fine edge f of the coarse basis function of edge e.
// `parents` maps each fine triangle to the coarse triangle containing it.
SparseOperator nedelec_prolongation(const DualMesh &coarse, const EdgeDofMap &coarse_dofs,
                                    const DualMesh &fine, const EdgeDofMap &fine_dofs,
                                    const std::vector<int> &parents);

struct TransferPair
{
  SparseOperator P;  // D2h^{-1} P^N D2H
  SparseOperator R;  // D1H (P^N)^T D1h^{-1}
};

TransferPair rescale_transfers(const SparseOperator &PN, const ScalingPair &coarse,
                               const ScalingPair &fine);

enum class CoarseOperator
{
  Direct,   // rediscretize on every level
  Galerkin  // R A P
};

struct HierarchyOptions
{
  double alpha = 60.0;
  double beta = 60.0;
  double kappa = 1.0;
  int fine_level = 6;        // refinements of the generating triangle
  int min_coarse_dofs = 50;  // coarsest level: first with at least this many unknowns
  int coarsest_level = -1;   // overrides min_coarse_dofs when >= 1
  CoarseOperator coarse_operator = CoarseOperator::Direct;
  PatchOptions patches;
};

struct MGLevel
{
  DualMesh dual;
  EdgeDofMap dofs;
  ScalingPair scaling;
  SparseOperator A;
  // Transfers to the next coarser level; empty on the coarsest level.
  SparseOperator PN;
  SparseOperator P;
  SparseOperator R;
  std::vector<SmootherPatch> patches;

  int size() const { return dofs.size(); }
};

class MGHierarchy
{
public:
  explicit MGHierarchy(const HierarchyOptions &options);

  const HierarchyOptions &options() const { return options_; }
  int num_levels() const { return static_cast<int>(levels_.size()); }
  const MGLevel &level(int l) const { return levels_.at(l); }  // 0 = coarsest
  const MGLevel &finest() const { return levels_.back(); }
  int mesh_level(int l) const { return levels_.at(l).dual.mesh.level; }

  Eigen::VectorXd coarse_solve(const Eigen::VectorXd &b) const;

private:
  HierarchyOptions options_;
  std::vector<MGLevel> levels_;
  Eigen::PartialPivLU<Eigen::MatrixXd> coarse_lu_;
};

struct CycleOptions
{
  int nu1 = 2;
  int nu2 = 1;
  int gamma = 1;  // 1: V-cycle, 2: W-cycle
  double omega = 1.0;
};

// One cycle on level `l` (default: finest), updating x in place.
void cycle(const MGHierarchy &hier, const Eigen::VectorXd &b, Eigen::VectorXd &x,
           const CycleOptions &options, int l = -1);

struct ConvergenceReport
{
  std::vector<double> residuals;  // Euclidean residual norms, entry 0 is the initial one
  int iterations = 0;
  bool converged = false;
  double factor = 0.0;  // geometric mean of the last five residual ratios

  CycleOptions cycle;
  double alpha = 0.0, beta = 0.0, kappa = 0.0;
  int fine_level = 0;
  int num_levels = 0;
};

struct SolveOptions
{
  CycleOptions cycle;
  double tol = 1e-10;  // relative residual reduction
  int max_iters = 100;
};

class DivergenceError : public std::runtime_error
{
public:
  DivergenceError(const std::string &what, ConvergenceReport report)
    : std::runtime_error(what), report_(std::move(report))
  {
  }
  const ConvergenceReport &report() const { return report_; }

private:
  ConvergenceReport report_;
};

// Iterates cycles from x (zero if empty) until ||b - A x|| <= tol ||b - A x0||.
// Throws DivergenceError if max_iters is exceeded.
ConvergenceReport solve(const MGHierarchy &hier, const Eigen::VectorXd &b, Eigen::VectorXd &x,
                        const SolveOptions &options);

struct PowerOptions
{
  int iterations = 60;
  int average_over = 10;
  std::uint64_t seed = 12345;
};

// Asymptotic factor of the cycle: homogeneous problem (b = 0) from a random start,
// normalized every iteration in the D1^{-1} D2 weighted norm; geometric mean of the last
// `average_over` ratios.
double asymptotic_factor(const MGHierarchy &hier, const CycleOptions &cycle,
                         const PowerOptions &options = {});

void write_residual_csv(std::ostream &out, const ConvergenceReport &report);
void write_summary(std::ostream &out, const ConvergenceReport &report);

}  // namespace mfdmg

#endif  // MFDMG_MULTIGRID_HPP
