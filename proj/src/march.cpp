#include "tracefem/march.hpp"

#include <chrono>
#include <cmath>
#include <numeric>
#include <random>

#include <Eigen/SparseLU>

#include "tracefem/io.hpp"

namespace tracefem {

namespace {

double rel_residual(const SparseMat& A, const Eigen::VectorXd& x, const Eigen::VectorXd& b) {
  double denom = b.norm();
  return (A * x - b).norm() / (denom > 0.0 ? denom : 1.0);
}

double max_abs_diag(const SparseMat& A) {
  double m = 0.0;
  for (int k = 0; k < A.outerSize(); ++k)
    for (SparseMat::InnerIterator it(A, k); it; ++it)
      if (it.row() == it.col()) m = std::max(m, std::abs(it.value()));
  return m;
}

Eigen::VectorXd dense_lu_solve(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                               double pivot_eps, unsigned seed) {
  const int n = static_cast<int>(A.rows());
  Eigen::MatrixXd M = A;
  Eigen::VectorXd y = b;
  std::vector<int> row(n);
  std::iota(row.begin(), row.end(), 0);
  if (seed != 0) {
    std::mt19937 rng(seed);
    std::shuffle(row.begin(), row.end(), rng);
  }
  for (int k = 0; k < n; ++k) {
    int p = k;
    for (int i = k + 1; i < n; ++i)
      if (std::abs(M(row[i], k)) > std::abs(M(row[p], k))) p = i;
    std::swap(row[k], row[p]);
    double piv = M(row[k], k);
    if (std::abs(piv) < pivot_eps) {
      piv = piv >= 0.0 ? pivot_eps : -pivot_eps;
      M(row[k], k) = piv;
    }
    for (int i = k + 1; i < n; ++i) {
      double f = M(row[i], k) / piv;
      if (f == 0.0) continue;
      M.row(row[i]).tail(n - k - 1) -= f * M.row(row[k]).tail(n - k - 1);
      y[row[i]] -= f * y[row[k]];
    }
  }
  Eigen::VectorXd x(n);
  for (int k = n - 1; k >= 0; --k) {
    double s = y[row[k]];
    for (int j = k + 1; j < n; ++j) s -= M(row[k], j) * x[j];
    x[k] = s / M(row[k], k);
  }
  return x;
}

}  // namespace

Eigen::VectorXd solve_slab(const SlabSystem& sys, const SolverPolicy& policy,
                           SolveReport* report) {
  const double diag_scale = max_abs_diag(sys.A);
  const double eps0 = policy.shift_scale * (diag_scale > 0.0 ? diag_scale : 1.0);

  Eigen::VectorXd best;
  double best_res = std::numeric_limits<double>::infinity();
  double shift_used = 0.0;
  int retries = 0;

  if (policy.backend == SolverPolicy::Backend::dense_lu) {
    Eigen::MatrixXd dense(sys.A);
    best = dense_lu_solve(dense, sys.b, eps0, policy.permutation_seed);
    best_res = rel_residual(sys.A, best, sys.b);
    shift_used = eps0;
  } else {
    // Shift only the diagonal entries below the threshold. Trace DOFs whose
    // hats barely touch the surface produce near-zero rows with consistent
    // right-hand sides; the shift pins their otherwise arbitrary (and
    // arbitrarily large) components without disturbing regular pivots.
    SparseMat shifted = sys.A;
    for (int i = 0; i < sys.n_dof; ++i) {
      double d = shifted.coeff(i, i);
      if (std::abs(d) < eps0) {
        shifted.coeffRef(i, i) = d + eps0;
        shift_used = eps0;
      }
    }
    Eigen::SparseLU<SparseMat, Eigen::COLAMDOrdering<int>> lu;
    lu.compute(shifted);
    if (lu.info() == Eigen::Success) {
      Eigen::VectorXd x = lu.solve(sys.b);
      double res = rel_residual(sys.A, x, sys.b);
      if (res < best_res) {
        best = std::move(x);
        best_res = res;
      }
    }
    // escalate to full diagonal shifts if the factorization still broke down
    double eps = eps0;
    while (best_res > policy.tol_rel && retries < policy.max_retries) {
      ++retries;
      SparseMat eye(sys.n_dof, sys.n_dof);
      eye.setIdentity();
      SparseMat full = sys.A + eps * eye;
      lu.compute(full);
      if (lu.info() == Eigen::Success) {
        Eigen::VectorXd x = lu.solve(sys.b);
        double res = rel_residual(sys.A, x, sys.b);
        if (res < best_res) {
          best = std::move(x);
          best_res = res;
          shift_used = eps;
        }
      }
      eps *= 100.0;
    }
  }

  if (!(best_res <= policy.tol_rel)) {
    throw SolverFailure("solve_slab: residual " + std::to_string(best_res) + " above tolerance " +
                        std::to_string(policy.tol_rel) + " (slab " + std::to_string(sys.slab) +
                        ", n_dof " + std::to_string(sys.n_dof) + ", max diag " +
                        std::to_string(diag_scale) + ")");
  }
  if (report) {
    report->residual_rel = best_res;
    report->shift_used = shift_used;
    report->retries = retries;
  }
  return best;
}

namespace {

MarchResult march_impl(const DiscreteLevelSet& dls, const ProblemSpec& problem,
                       const MarchOptions& opts, MarchResult result, int start) {
  using clock = std::chrono::steady_clock;
  const BackgroundMesh& mesh = dls.outer_mesh;
  const int N = dls.outer.n_slabs;

  for (int n = start; n <= N; ++n) {
    auto tic = clock::now();
    SurfacePatchSet patches;
    TraceSpaceSlab space;
    SlabSystem sys;
    const TraceSpaceSlab* prev_space = nullptr;
    const Eigen::VectorXd* prev_coeffs = nullptr;
    if (n > 1) {
      prev_space = &result.slabs[n - 2].space;
      prev_coeffs = &result.slabs[n - 2].coeffs;
    }
    try {
      patches = extract_patches(dls, n);
      ActiveSets active =
          mark_active(mesh, patches, opts.small_cut_threshold, mesh.h, dls.outer.dt);
      space = build_dofs(mesh, active, n);
      sys = assemble_slab(dls, space, patches, problem, prev_space, prev_coeffs, opts.assembly);
    } catch (const GeometryError& err) {
      throw GeometryError("slab " + std::to_string(n) + ": " + err.what());
    }
    auto mid = clock::now();

    Eigen::VectorXd x;
    try {
      x = solve_slab(sys, opts.solver);
    } catch (const SolverFailure& err) {
      throw SolverFailure("slab " + std::to_string(n) + ": " + err.what());
    }
    auto toc = clock::now();

    result.assemble_seconds.push_back(std::chrono::duration<double>(mid - tic).count());
    result.solve_seconds.push_back(std::chrono::duration<double>(toc - mid).count());
    result.dof_counts.push_back(space.n_dof);
    result.patches.push_back(std::move(patches));
    if (opts.keep_systems) result.systems.push_back(std::move(sys));
    result.slabs.push_back({std::move(space), std::move(x)});
  }

  if (!opts.checkpoint_path.empty()) write_checkpoint(opts.checkpoint_path, result);
  return result;
}

}  // namespace

MarchResult run_march(const DiscreteLevelSet& dls, const ProblemSpec& problem,
                      const MarchOptions& opts) {
  return march_impl(dls, problem, opts, MarchResult{}, 1);
}

MarchResult resume_march(const DiscreteLevelSet& dls, const ProblemSpec& problem,
                         const MarchOptions& opts, MarchResult state, int start) {
  if (static_cast<int>(state.slabs.size()) < start - 1)
    throw std::invalid_argument("resume_march: checkpoint does not reach the requested slab");
  state.slabs.resize(start - 1);
  if (!state.patches.empty()) state.patches.resize(std::min<size_t>(state.patches.size(), start - 1));
  return march_impl(dls, problem, opts, std::move(state), start);
}

double eval_element(const BackgroundMesh& mesh, const TraceSpaceSlab& space,
                    const Eigen::VectorXd& coeffs, int tri, const Vector2d& x, double t,
                    Vector2d* grad) {
  ElementBasis eb = eval_element_basis(mesh, tri, x, t);
  auto dofs = space.element_dofs(mesh, tri);
  double v = 0.0;
  Vector2d g = Vector2d::Zero();
  for (int i = 0; i < 6; ++i) {
    v += coeffs[dofs[i]] * eb.value[i];
    if (grad) g += coeffs[dofs[i]] * eb.grad[i];
  }
  if (grad) *grad = g;
  return v;
}

double SolutionTrace::eval_in_slab(const Vector2d& x, double t, int slab, bool* inside) const {
  const BackgroundMesh& mesh = dls->outer_mesh;
  const SlabSolution& s = result->slabs[slab - 1];
  int tri = mesh.locate(x);
  if (tri < 0 || !s.space.is_active(tri)) {
    if (inside) *inside = false;
    return 0.0;
  }
  if (inside) *inside = true;
  return eval_element(mesh, s.space, s.coeffs, tri, x, t);
}

double SolutionTrace::eval(const Vector2d& x, double t, bool* inside) const {
  return eval_in_slab(x, t, dls->outer.slab_of(t), inside);
}

double SolutionTrace::eval_minus(const Vector2d& x, int n) const {
  return eval_in_slab(x, dls->outer.boundaries[n], n);
}

double SolutionTrace::eval_plus(const Vector2d& x, int n) const {
  return eval_in_slab(x, dls->outer.boundaries[n], n + 1);
}

double SolutionTrace::curve_integral(double t, int slab, int quad_degree) const {
  // evaluate on the segment owners: unlike point location this stays correct
  // when a segment lies exactly on a triangle edge
  const SlabSolution& s = result->slabs[slab - 1];
  CrossSection cs = extract_cross_section(*dls, t, slab);
  double total = 0.0;
  for (const auto& seg : cs.segments) {
    if (!s.space.is_active(seg.owner))
      throw GeometryError("curve_integral: cross-section segment in an inactive prism");
    for (const auto& qp : segment_quadrature(seg, quad_degree))
      total += qp.w * eval_element(dls->outer_mesh, s.space, s.coeffs, seg.owner, qp.x, t);
  }
  return total;
}

double SolutionTrace::max_abs_coeff() const {
  double m = 0.0;
  for (const auto& s : result->slabs)
    if (s.coeffs.size() > 0) m = std::max(m, s.coeffs.cwiseAbs().maxCoeff());
  return m;
}

}  // namespace tracefem
