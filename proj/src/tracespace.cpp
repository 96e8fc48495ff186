#include "tracefem/tracespace.hpp"

#include <algorithm>
#include <map>

namespace tracefem {

ActiveSets mark_active(const BackgroundMesh& mesh, const SurfacePatchSet& patches,
                       double small_cut_threshold, double h, double dt) {
  std::map<int, double> measure;  // owner -> weighted cut measure
  for (const auto& p : patches.patches)
    if (p.area > 0.0) measure[p.owner] += p.area * p.mu;

  ActiveSets active;
  const double cutoff = small_cut_threshold * h * dt;
  std::vector<char> vertex_seen(mesh.n_vertices(), 0);
  for (const auto& [tri, m] : measure) {
    if (small_cut_threshold > 0.0 && m < cutoff) continue;
    active.triangles.push_back(tri);
    for (int v : mesh.triangles[tri]) vertex_seen[v] = 1;
  }
  if (active.triangles.empty())
    throw GeometryError("mark_active: no prism is intersected; the surface left the domain");
  for (int v = 0; v < mesh.n_vertices(); ++v)
    if (vertex_seen[v]) active.vertices.push_back(v);
  return active;
}

TraceSpaceSlab build_dofs(const BackgroundMesh& mesh, const ActiveSets& active, int slab) {
  TraceSpaceSlab s;
  s.slab = slab;
  s.active_triangles = active.triangles;
  s.triangle_active.assign(mesh.n_triangles(), 0);
  for (int t : active.triangles) s.triangle_active[t] = 1;
  s.active_vertices = active.vertices;
  s.vertex_local.assign(mesh.n_vertices(), -1);
  for (size_t i = 0; i < active.vertices.size(); ++i) s.vertex_local[active.vertices[i]] = i;
  s.n_dof = 2 * static_cast<int>(active.vertices.size());
  return s;
}

std::array<int, 6> TraceSpaceSlab::element_dofs(const BackgroundMesh& mesh, int tri) const {
  const auto& tv = mesh.triangles[tri];
  std::array<int, 6> dofs;
  for (int i = 0; i < 3; ++i) {
    dofs[2 * i] = dof_of(tv[i], 0);
    dofs[2 * i + 1] = dof_of(tv[i], 1);
  }
  return dofs;
}

ElementBasis eval_element_basis(const BackgroundMesh& mesh, int tri, const Vector2d& x, double t) {
  Vector3d lam = mesh.barycentric(tri, x);
  auto grads = mesh.hat_gradients(tri);
  ElementBasis b;
  for (int i = 0; i < 3; ++i) {
    b.value[2 * i] = lam[i];
    b.grad[2 * i] = grads[i];
    b.dt[2 * i] = 0.0;
    b.value[2 * i + 1] = t * lam[i];
    b.grad[2 * i + 1] = t * grads[i];
    b.dt[2 * i + 1] = lam[i];
  }
  return b;
}

BasisEval eval_basis(const BackgroundMesh& mesh, const TraceSpaceSlab& space, int dof,
                     const Vector2d& x, double t) {
  BasisEval r;
  int tri = mesh.locate(x);
  if (tri < 0 || !space.is_active(tri)) return r;
  r.inside = true;
  int vertex = space.active_vertices[dof / 2];
  const auto& tv = mesh.triangles[tri];
  int corner = -1;
  for (int i = 0; i < 3; ++i)
    if (tv[i] == vertex) corner = i;
  if (corner < 0) return r;  // inside the active region but outside this hat's support
  ElementBasis eb = eval_element_basis(mesh, tri, x, t);
  int local = 2 * corner + (dof % 2);
  r.value = eb.value[local];
  r.grad = eb.grad[local];
  r.dt = eb.dt[local];
  return r;
}

}  // namespace tracefem
