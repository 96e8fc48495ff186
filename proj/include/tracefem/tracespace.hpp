#pragma once

#include <array>
#include <vector>

#include <Eigen/Dense>

#include "tracefem/cutgeom.hpp"
#include "tracefem/mesh.hpp"

namespace tracefem {

struct ActiveSets {
  std::vector<int> triangles;  // ascending
  std::vector<int> vertices;   // ascending
};

/// Prisms owning at least one cut patch of positive area. A positive
/// threshold drops prisms whose weighted cut measure is below
/// threshold * h * dt (off by default; the stability theory needs no cut-size
/// condition).
ActiveSets mark_active(const BackgroundMesh& mesh, const SurfacePatchSet& patches,
                       double small_cut_threshold = 0.0, double h = 0.0, double dt = 0.0);

/// Trace-space DOF map for one slab. Every active vertex carries two
/// coefficients: family 0 multiplies hat(x), family 1 multiplies t * hat(x)
/// (global time). The resulting set spans the trace space but need not be
/// independent on it.
struct TraceSpaceSlab {
  int slab = 1;
  std::vector<int> active_triangles;
  std::vector<char> triangle_active;  // size n_triangles
  std::vector<int> active_vertices;
  std::vector<int> vertex_local;  // global vertex -> rank among active, or -1
  int n_dof = 0;

  bool is_active(int tri) const { return triangle_active[tri] != 0; }
  int dof_of(int vertex, int family) const { return 2 * vertex_local[vertex] + family; }

  /// Global DOF ids of triangle tri, ordered corner-major:
  /// [c0 f0, c0 f1, c1 f0, c1 f1, c2 f0, c2 f1].
  std::array<int, 6> element_dofs(const BackgroundMesh& mesh, int tri) const;
};

TraceSpaceSlab build_dofs(const BackgroundMesh& mesh, const ActiveSets& active, int slab);

/// Values, spatial gradients and time derivatives of the six basis functions
/// of one prism at (x, t), ordered as in element_dofs.
struct ElementBasis {
  std::array<double, 6> value;
  std::array<Vector2d, 6> grad;
  std::array<double, 6> dt;
};

ElementBasis eval_element_basis(const BackgroundMesh& mesh, int tri, const Vector2d& x, double t);

struct BasisEval {
  double value = 0.0;
  Vector2d grad{0, 0};
  double dt = 0.0;
  bool inside = false;  // false when x lies outside the active support
};

BasisEval eval_basis(const BackgroundMesh& mesh, const TraceSpaceSlab& space, int dof,
                     const Vector2d& x, double t);

}  // namespace tracefem
