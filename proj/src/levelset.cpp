#include "tracefem/levelset.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tracefem {

void DiscreteLevelSet::time_bracket(double t, int slab, int& la, int& lb, double& frac) const {
  const double t0 = outer.boundaries[slab - 1];
  const double half = 0.5 * outer.dt;
  double local = (t - t0) / half;  // in [0, 2]
  int sub = local < 1.0 ? 0 : 1;
  la = 2 * (slab - 1) + sub;
  lb = la + 1;
  frac = std::clamp(local - sub, 0.0, 1.0);
}

double DiscreteLevelSet::nodal_value(int v, double t, int slab) const {
  int la, lb;
  double frac;
  time_bracket(t, slab, la, lb, frac);
  return (1.0 - frac) * values(la, v) + frac * values(lb, v);
}

double DiscreteLevelSet::evaluate(const Vector2d& x, double t, int slab) const {
  int tri = refined.mesh.locate(x);
  if (tri < 0) throw std::invalid_argument("DiscreteLevelSet::evaluate: point outside domain");
  Vector3d lam = refined.mesh.barycentric(tri, x);
  const auto& tv = refined.mesh.triangles[tri];
  double val = 0.0;
  for (int i = 0; i < 3; ++i) val += lam[i] * nodal_value(tv[i], t, slab);
  return val;
}

DiscreteLevelSet interpolate_levelset(const std::function<double(const Vector2d&, double)>& phi,
                                      const BackgroundMesh& mesh, const TimePartition& partition) {
  DiscreteLevelSet d;
  d.outer_mesh = mesh;
  d.refined = refine_uniform(mesh);
  d.outer = partition;
  const int levels = 2 * partition.n_slabs + 1;
  d.level_times.resize(levels);
  for (int l = 0; l < levels; ++l) d.level_times[l] = 0.5 * l * partition.dt;
  d.level_times.back() = partition.T;

  const int nv = d.refined.mesh.n_vertices();
  d.values.resize(levels, nv);
  d.level_scale.assign(levels, 0.0);
  for (int l = 0; l < levels; ++l) {
    double t = d.level_times[l];
    for (int v = 0; v < nv; ++v) {
      double val = phi(d.refined.mesh.vertices[v], t);
      d.values(l, v) = val;
      d.level_scale[l] = std::max(d.level_scale[l], std::abs(val));
    }
  }
  return d;
}

DiscreteLevelSet interpolate_levelset(const EvolvingSurface& surface, const BackgroundMesh& mesh,
                                      const TimePartition& partition) {
  return interpolate_levelset(surface.phi, mesh, partition);
}

}  // namespace tracefem
