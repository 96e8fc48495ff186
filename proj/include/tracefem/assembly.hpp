#pragma once

#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "tracefem/cutgeom.hpp"
#include "tracefem/levelset.hpp"
#include "tracefem/surface.hpp"
#include "tracefem/tracespace.hpp"

namespace tracefem {

using SparseMat = Eigen::SparseMatrix<double>;

/// One rank-one piece of the stabilization, alpha * z z^T with
/// z_i = integral of basis i over the cross-section at one quadrature node.
struct RankOneTerm {
  double alpha = 0.0;
  double node = 0.0;  // time of the cross-section
  Eigen::VectorXd z;
};

/// Linear system of one time slab. A = M_mat + nu K + C + J + S with the
/// same quadrature in every component; M0, Jminus and Jcross are kept for
/// diagnostics (norms, jumps, coupling terms of the global bilinear form).
struct SlabSystem {
  int slab = 1;
  int n_dof = 0;
  double nu = 1.0;
  SparseMat A;
  SparseMat M_mat;   // material-derivative term
  SparseMat K;       // tangential-gradient gram (unscaled by nu)
  SparseMat C;       // div_Gamma w reaction
  SparseMat J;       // cross-section mass at the slab start, both sides new
  SparseMat M0;      // L2 mass over the slab's surface patches
  SparseMat Jminus;  // cross-section mass at the slab end
  SparseMat Jcross;  // (prev dof) x (dof) mass at the slab start; empty for slab 1
  std::vector<RankOneTerm> S;
  Eigen::VectorXd b, b_load, b_inflow;

  /// A explicitly recomposed from the components (for verification).
  SparseMat recompose() const;
};

struct AssemblyOptions {
  int quad_degree = 2;
  int stab_nodes = 2;
};

std::vector<RankOneTerm> assemble_stabilization(const DiscreteLevelSet& dls,
                                                const TraceSpaceSlab& space, double sigma,
                                                int k_nodes, int quad_degree);

/// prev_space/prev_coeffs carry the upwind trace from the previous slab;
/// both null on the first slab, where the initial data enters the right-hand
/// side directly. The spatial mesh is shared by all slabs: Jcross couples the
/// two slabs' DOFs on the same triangles, which is the one place that would
/// need cross-mesh evaluation if meshes ever varied per slab.
SlabSystem assemble_slab(const DiscreteLevelSet& dls, const TraceSpaceSlab& space,
                         const SurfacePatchSet& patches, const ProblemSpec& problem,
                         const TraceSpaceSlab* prev_space, const Eigen::VectorXd* prev_coeffs,
                         const AssemblyOptions& opts);

}  // namespace tracefem
