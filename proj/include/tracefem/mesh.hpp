#pragma once

#include <array>
#include <vector>

#include <Eigen/Dense>

namespace tracefem {

using Eigen::Vector2d;
using Eigen::Vector3d;

struct Rect {
  Vector2d lo;
  Vector2d hi;

  double width() const { return hi.x() - lo.x(); }
  double height() const { return hi.y() - lo.y(); }
};

/// Structured triangulation of a rectangle. Each grid cell is split into two
/// triangles along the lower-left/upper-right diagonal, so the mesh is
/// conforming and all triangles are counterclockwise.
struct BackgroundMesh {
  Rect bounds;
  double h = 0.0;  // requested target size
  int nx = 0, ny = 0;
  std::vector<Vector2d> vertices;
  std::vector<std::array<int, 3>> triangles;

  int n_vertices() const { return static_cast<int>(vertices.size()); }
  int n_triangles() const { return static_cast<int>(triangles.size()); }

  double cell_dx() const { return bounds.width() / nx; }
  double cell_dy() const { return bounds.height() / ny; }

  double triangle_area(int t) const;

  /// Index of the triangle containing x, or -1 if x is outside the rectangle.
  /// Constant time via the structured layout.
  int locate(const Vector2d& x) const;

  /// Barycentric coordinates of x with respect to triangle t.
  Vector3d barycentric(int t, const Vector2d& x) const;

  /// Gradients of the three P1 hat functions on triangle t (constant).
  std::array<Vector2d, 3> hat_gradients(int t) const;

  /// Triangle sharing edge (a, b) with t, or -1 on the boundary.
  int neighbor_across(int t, int a, int b) const;
};

BackgroundMesh build_uniform_mesh(const Rect& bounds, double h);

/// Midpoint refinement; for the structured generator this is again a uniform
/// mesh at half the spacing. parent[k] is the coarse triangle containing fine
/// triangle k.
struct RefinedMesh {
  BackgroundMesh mesh;
  std::vector<int> parent;
};

RefinedMesh refine_uniform(const BackgroundMesh& coarse);

struct TimePartition {
  double T = 0.0;
  int n_slabs = 0;
  double dt = 0.0;
  std::vector<double> boundaries;  // t_0 .. t_N

  /// Slab index in 1..N whose half-open interval (t_{n-1}, t_n] contains t;
  /// t = 0 maps to slab 1.
  int slab_of(double t) const;
};

TimePartition build_time_partition(double T, int n_slabs);

/// Spatial triangle extruded over one time slab.
struct Prism {
  int triangle = -1;
  int slab = -1;  // 1-based
};

struct Tetrahedron {
  std::array<Vector3d, 4> v;  // (x, y, t)
  double volume() const;
};

/// Subdivision of triangle x (t0, t1] into three tetrahedra. Diagonals on the
/// vertical quad faces run from the bottom copy of the lower-numbered vertex
/// to the top copy of the higher-numbered one, so two prisms sharing a face
/// subdivide it identically. vertex_ids are global spatial indices used only
/// for that ordering rule.
std::array<Tetrahedron, 3> prism_to_tetrahedra(const std::array<Vector2d, 3>& corners,
                                               const std::array<int, 3>& vertex_ids,
                                               double t0, double t1);

/// Combinatorial form of the same subdivision: each node is (corner, level)
/// with corner in 0..2 referring to the prism's triangle and level 0 (bottom)
/// or 1 (top).
using PrismTetNodes = std::array<std::array<std::pair<int, int>, 4>, 3>;
PrismTetNodes prism_tet_nodes(const std::array<int, 3>& vertex_ids);

}  // namespace tracefem
