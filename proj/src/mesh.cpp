#include "tracefem/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tracefem {

namespace {

double cross2(const Vector2d& a, const Vector2d& b) {
  return a.x() * b.y() - a.y() * b.x();
}

BackgroundMesh build_grid(const Rect& b, int nx, int ny, double h) {
  BackgroundMesh m;
  m.bounds = b;
  m.h = h;
  m.nx = nx;
  m.ny = ny;
  const double dx = b.width() / nx, dy = b.height() / ny;
  m.vertices.reserve((nx + 1) * (ny + 1));
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i)
      m.vertices.emplace_back(b.lo.x() + i * dx, b.lo.y() + j * dy);
  auto vid = [&](int i, int j) { return j * (nx + 1) + i; };
  m.triangles.reserve(2 * nx * ny);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      m.triangles.push_back({vid(i, j), vid(i + 1, j), vid(i + 1, j + 1)});
      m.triangles.push_back({vid(i, j), vid(i + 1, j + 1), vid(i, j + 1)});
    }
  return m;
}

}  // namespace

double BackgroundMesh::triangle_area(int t) const {
  const auto& tri = triangles[t];
  const Vector2d& p0 = vertices[tri[0]];
  return 0.5 * cross2(vertices[tri[1]] - p0, vertices[tri[2]] - p0);
}

int BackgroundMesh::locate(const Vector2d& x) const {
  const double dx = cell_dx(), dy = cell_dy();
  double fx = (x.x() - bounds.lo.x()) / dx;
  double fy = (x.y() - bounds.lo.y()) / dy;
  if (fx < 0.0 || fy < 0.0 || fx > nx || fy > ny) return -1;
  int i = std::min(static_cast<int>(fx), nx - 1);
  int j = std::min(static_cast<int>(fy), ny - 1);
  // lower triangle covers the part of the cell below the diagonal
  double lx = fx - i, ly = fy - j;
  int local = (ly <= lx) ? 0 : 1;
  return 2 * (j * nx + i) + local;
}

Vector3d BackgroundMesh::barycentric(int t, const Vector2d& x) const {
  const auto& tri = triangles[t];
  const Vector2d& p0 = vertices[tri[0]];
  Eigen::Matrix2d B;
  B.col(0) = vertices[tri[1]] - p0;
  B.col(1) = vertices[tri[2]] - p0;
  Vector2d lam = B.inverse() * (x - p0);
  return Vector3d(1.0 - lam.x() - lam.y(), lam.x(), lam.y());
}

std::array<Vector2d, 3> BackgroundMesh::hat_gradients(int t) const {
  const auto& tri = triangles[t];
  const Vector2d& p0 = vertices[tri[0]];
  Eigen::Matrix2d B;
  B.col(0) = vertices[tri[1]] - p0;
  B.col(1) = vertices[tri[2]] - p0;
  Eigen::Matrix2d Binv_t = B.inverse().transpose();
  Vector2d g1 = Binv_t.col(0);
  Vector2d g2 = Binv_t.col(1);
  return {Vector2d(-g1 - g2), g1, g2};
}

int BackgroundMesh::neighbor_across(int t, int a, int b) const {
  // Candidates share a grid cell edge or the cell diagonal; scan the up to
  // eight triangles of the two cells adjacent to the edge midpoint.
  Vector2d mid = 0.5 * (vertices[a] + vertices[b]);
  const double dx = cell_dx(), dy = cell_dy();
  int ci = static_cast<int>(std::floor((mid.x() - bounds.lo.x()) / dx - 0.25));
  int cj = static_cast<int>(std::floor((mid.y() - bounds.lo.y()) / dy - 0.25));
  for (int j = cj; j <= cj + 1; ++j) {
    for (int i = ci; i <= ci + 1; ++i) {
      if (i < 0 || j < 0 || i >= nx || j >= ny) continue;
      for (int local = 0; local < 2; ++local) {
        int cand = 2 * (j * nx + i) + local;
        if (cand == t) continue;
        const auto& tri = triangles[cand];
        int hits = 0;
        for (int v : tri) hits += (v == a) + (v == b);
        if (hits == 2) return cand;
      }
    }
  }
  return -1;
}

BackgroundMesh build_uniform_mesh(const Rect& bounds, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("build_uniform_mesh: h must be positive");
  if (!(bounds.width() > 0.0) || !(bounds.height() > 0.0))
    throw std::invalid_argument("build_uniform_mesh: degenerate bounds");
  int nx = std::max(1, static_cast<int>(std::ceil(bounds.width() / h - 1e-12)));
  int ny = std::max(1, static_cast<int>(std::ceil(bounds.height() / h - 1e-12)));
  return build_grid(bounds, nx, ny, h);
}

RefinedMesh refine_uniform(const BackgroundMesh& coarse) {
  RefinedMesh r;
  r.mesh = build_grid(coarse.bounds, 2 * coarse.nx, 2 * coarse.ny, 0.5 * coarse.h);
  r.parent.resize(r.mesh.n_triangles());
  for (int k = 0; k < r.mesh.n_triangles(); ++k) {
    const auto& tri = r.mesh.triangles[k];
    Vector2d c =
        (r.mesh.vertices[tri[0]] + r.mesh.vertices[tri[1]] + r.mesh.vertices[tri[2]]) / 3.0;
    r.parent[k] = coarse.locate(c);
  }
  return r;
}

int TimePartition::slab_of(double t) const {
  if (t <= boundaries.front()) return 1;
  int n = static_cast<int>(std::ceil((t - boundaries.front()) / dt - 1e-12));
  return std::clamp(n, 1, n_slabs);
}

TimePartition build_time_partition(double T, int n_slabs) {
  if (!(T > 0.0)) throw std::invalid_argument("build_time_partition: T must be positive");
  if (n_slabs < 1) throw std::invalid_argument("build_time_partition: need at least one slab");
  TimePartition p;
  p.T = T;
  p.n_slabs = n_slabs;
  p.dt = T / n_slabs;
  p.boundaries.resize(n_slabs + 1);
  for (int k = 0; k <= n_slabs; ++k) p.boundaries[k] = k * T / n_slabs;
  p.boundaries.back() = T;
  return p;
}

double Tetrahedron::volume() const {
  Eigen::Matrix3d M;
  M.col(0) = v[1] - v[0];
  M.col(1) = v[2] - v[0];
  M.col(2) = v[3] - v[0];
  return M.determinant() / 6.0;
}

PrismTetNodes prism_tet_nodes(const std::array<int, 3>& vertex_ids) {
  // Sort corners by global id; the subdivision depends only on that order.
  std::array<int, 3> o = {0, 1, 2};
  std::sort(o.begin(), o.end(), [&](int a, int b) { return vertex_ids[a] < vertex_ids[b]; });
  return PrismTetNodes{{
      {{{o[0], 0}, {o[1], 0}, {o[2], 0}, {o[2], 1}}},
      {{{o[0], 0}, {o[1], 0}, {o[1], 1}, {o[2], 1}}},
      {{{o[0], 0}, {o[0], 1}, {o[1], 1}, {o[2], 1}}},
  }};
}

std::array<Tetrahedron, 3> prism_to_tetrahedra(const std::array<Vector2d, 3>& corners,
                                               const std::array<int, 3>& vertex_ids,
                                               double t0, double t1) {
  PrismTetNodes nodes = prism_tet_nodes(vertex_ids);
  std::array<Tetrahedron, 3> tets;
  for (int k = 0; k < 3; ++k) {
    for (int i = 0; i < 4; ++i) {
      auto [corner, level] = nodes[k][i];
      const Vector2d& p = corners[corner];
      tets[k].v[i] = Vector3d(p.x(), p.y(), level == 0 ? t0 : t1);
    }
    if (tets[k].volume() < 0.0) std::swap(tets[k].v[2], tets[k].v[3]);
  }
  return tets;
}

}  // namespace tracefem
