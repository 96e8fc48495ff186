#pragma once

#include <functional>

#include <Eigen/Dense>

#include "tracefem/mesh.hpp"
#include "tracefem/surface.hpp"

namespace tracefem {

/// Nodal interpolant of the level set on the once-refined space-time grid
/// (spatial size h/2, time step dt/2). Within a slab the reconstruction is P1
/// in space on the refined mesh and affine in time between adjacent levels;
/// slab-boundary levels are shared, so both neighboring slabs see the same
/// cross-section geometry.
struct DiscreteLevelSet {
  BackgroundMesh outer_mesh;
  RefinedMesh refined;
  TimePartition outer;
  std::vector<double> level_times;  // 2N + 1 entries, spacing dt/2
  Eigen::MatrixXd values;           // (2N + 1) x n_fine_vertices
  std::vector<double> level_scale;  // max |values| per level

  int n_levels() const { return static_cast<int>(level_times.size()); }

  /// Bracketing levels (la, lb) and interpolation fraction for time t within
  /// the given slab; at slab boundaries the fraction is exactly 0 or 1.
  void time_bracket(double t, int slab, int& la, int& lb, double& frac) const;

  /// Nodal value at fine vertex v, time t, seen from the given slab.
  double nodal_value(int v, double t, int slab) const;

  /// Reconstruction at an arbitrary point (diagnostics and tests).
  double evaluate(const Vector2d& x, double t, int slab) const;
};

DiscreteLevelSet interpolate_levelset(const std::function<double(const Vector2d&, double)>& phi,
                                      const BackgroundMesh& mesh, const TimePartition& partition);

DiscreteLevelSet interpolate_levelset(const EvolvingSurface& surface, const BackgroundMesh& mesh,
                                      const TimePartition& partition);

}  // namespace tracefem
