#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "tracefem/assembly.hpp"

namespace tracefem {

struct SolverFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Slab systems may be singular but consistent (the trace DOFs form a frame,
/// not a basis); any residual-small solution carries the same trace. The
/// sparse path retries with a diagonal shift when the factorization breaks
/// down or the residual check fails; the dense path shifts individual pivots
/// below the threshold and can permute rows to probe solution non-uniqueness.
struct SolverPolicy {
  enum class Backend { sparse_lu, dense_lu };
  Backend backend = Backend::sparse_lu;
  double tol_rel = 1e-10;
  double shift_scale = 1e-12;  // threshold/shift = shift_scale * max |diag A|
  int max_retries = 3;
  unsigned permutation_seed = 0;  // dense backend only
};

struct SolveReport {
  double residual_rel = 0.0;
  double shift_used = 0.0;
  int retries = 0;
};

Eigen::VectorXd solve_slab(const SlabSystem& sys, const SolverPolicy& policy,
                           SolveReport* report = nullptr);

struct SlabSolution {
  TraceSpaceSlab space;
  Eigen::VectorXd coeffs;
};

struct MarchOptions {
  AssemblyOptions assembly;
  SolverPolicy solver;
  double small_cut_threshold = 0.0;
  bool keep_systems = false;
  std::string checkpoint_path;  // write per-slab coefficients when non-empty
};

struct MarchResult {
  std::vector<SlabSolution> slabs;       // [0] is slab 1
  std::vector<SurfacePatchSet> patches;  // per slab, kept for post-processing
  std::vector<SlabSystem> systems;       // only with keep_systems
  std::vector<double> assemble_seconds, solve_seconds;
  std::vector<int> dof_counts;
};

MarchResult run_march(const DiscreteLevelSet& dls, const ProblemSpec& problem,
                      const MarchOptions& opts);

/// Continues a march whose slabs 1..start-1 are already solved (restart from
/// a checkpoint); `state` must hold at least start-1 slabs.
MarchResult resume_march(const DiscreteLevelSet& dls, const ProblemSpec& problem,
                         const MarchOptions& opts, MarchResult state, int start);

/// Value (and optionally spatial gradient) of the slab function with the
/// given coefficients on prism `tri` at (x, t); no point location.
double eval_element(const BackgroundMesh& mesh, const TraceSpaceSlab& space,
                    const Eigen::VectorXd& coeffs, int tri, const Vector2d& x, double t,
                    Vector2d* grad = nullptr);

/// Read-only view over a finished march for point evaluation.
struct SolutionTrace {
  const DiscreteLevelSet* dls = nullptr;
  const MarchResult* result = nullptr;

  /// u_h at (x, t) with t assigned to the slab whose half-open interval
  /// contains it; zero (inside=false) outside the active support.
  double eval(const Vector2d& x, double t, bool* inside = nullptr) const;
  double eval_in_slab(const Vector2d& x, double t, int slab, bool* inside = nullptr) const;
  /// One-sided limits at the slab boundary t_n.
  double eval_minus(const Vector2d& x, int n) const;
  double eval_plus(const Vector2d& x, int n) const;
  double jump(const Vector2d& x, int n) const { return eval_plus(x, n) - eval_minus(x, n); }

  /// Integral of u_h over the discrete cross-section at time t (one-sided
  /// from the given slab).
  double curve_integral(double t, int slab, int quad_degree = 2) const;

  double max_abs_coeff() const;
};

}  // namespace tracefem
