#include "tracefem/cutgeom.hpp"

#include <cmath>

namespace tracefem {

namespace {

constexpr double kZeroShift = 1e-14;
constexpr double kFaceTol = 1e-11;

double perturb(double value, double scale) {
  // Symbolic perturbation: an exactly-zero nodal value is treated as slightly
  // positive, which makes every sign pattern unambiguous and assigns
  // face-coincident cuts to the prism on the negative side.
  if (value != 0.0) return value;
  return kZeroShift * (scale > 0.0 ? scale : 1.0);
}

Vector3d edge_cut(const Vector3d& pa, double fa, const Vector3d& pb, double fb) {
  double s = fa / (fa - fb);
  return pa + s * (pb - pa);
}

/// Gradient of the linear interpolant on a tetrahedron.
Vector3d tet_gradient(const std::array<Vector3d, 4>& q, const std::array<double, 4>& f) {
  Eigen::Matrix3d M;
  M.row(0) = (q[1] - q[0]).transpose();
  M.row(1) = (q[2] - q[0]).transpose();
  M.row(2) = (q[3] - q[0]).transpose();
  Vector3d rhs(f[1] - f[0], f[2] - f[0], f[3] - f[0]);
  return M.inverse() * rhs;
}

void finalize_patch(SurfacePatch& p, const Vector3d& grad) {
  Vector3d e1 = p.v[1] - p.v[0];
  Vector3d e2 = p.v[2] - p.v[0];
  p.area = 0.5 * e1.cross(e2).norm();
  double gn = grad.norm();
  double gxy = grad.head<2>().norm();
  if (!(gn > 0.0) || gxy <= 1e-12 * gn)
    throw GeometryError("extract_patches: degenerate level-set gradient on a cut element");
  p.normal = grad / gn;
  p.mu = gxy / gn;
  p.normal_velocity = -p.normal.z() / gxy * gn;  // -nu_t / |nu_x|
}

/// Detects a patch lying on a vertical face of its owner triangle and records
/// the sharing triangle; gradient evaluations there average both sides.
void detect_face_coincidence(SurfacePatch& p, const BackgroundMesh& outer) {
  bool candidate[3] = {true, true, true};
  for (const auto& pv : p.v) {
    Vector3d lam = outer.barycentric(p.owner, Vector2d(pv.x(), pv.y()));
    for (int i = 0; i < 3; ++i)
      if (std::abs(lam[i]) > kFaceTol) candidate[i] = false;
  }
  const auto& tri = outer.triangles[p.owner];
  for (int i = 0; i < 3; ++i) {
    if (!candidate[i]) continue;
    int n = outer.neighbor_across(p.owner, tri[(i + 1) % 3], tri[(i + 2) % 3]);
    if (n >= 0) {
      p.neighbor = n;
      return;
    }
  }
}

void march_tet(const std::array<Vector3d, 4>& q, const std::array<double, 4>& f,
               int owner, int refined_tri, const BackgroundMesh* outer,
               std::vector<SurfacePatch>& out) {
  int neg[4], pos[4], nn = 0, np = 0;
  for (int i = 0; i < 4; ++i) (f[i] < 0.0 ? neg[nn++] : pos[np++]) = i;
  if (nn == 0 || np == 0) return;

  Vector3d grad = tet_gradient(q, f);

  auto emit = [&](const Vector3d& a, const Vector3d& b, const Vector3d& c) {
    SurfacePatch p;
    p.v = {a, b, c};
    p.owner = owner;
    p.refined_tri = refined_tri;
    finalize_patch(p, grad);
    if (p.area > 0.0) {
      if (outer) detect_face_coincidence(p, *outer);
      out.push_back(std::move(p));
    }
  };

  if (nn == 1 || np == 1) {
    int lone = (nn == 1) ? neg[0] : pos[0];
    Vector3d pts[3];
    int k = 0;
    for (int i = 0; i < 4; ++i)
      if (i != lone) pts[k++] = edge_cut(q[lone], f[lone], q[i], f[i]);
    emit(pts[0], pts[1], pts[2]);
  } else {
    // 2:2 pattern; the four edge cuts in this order form a planar quad whose
    // consecutive sides lie on tetrahedron faces.
    int a = neg[0], b = neg[1], c = pos[0], d = pos[1];
    Vector3d pac = edge_cut(q[a], f[a], q[c], f[c]);
    Vector3d pad = edge_cut(q[a], f[a], q[d], f[d]);
    Vector3d pbd = edge_cut(q[b], f[b], q[d], f[d]);
    Vector3d pbc = edge_cut(q[b], f[b], q[c], f[c]);
    emit(pac, pad, pbd);
    emit(pac, pbd, pbc);
  }
}

}  // namespace

std::vector<SurfacePatch> march_tetrahedron(const std::array<Vector3d, 4>& corners,
                                            const std::array<double, 4>& values) {
  std::vector<SurfacePatch> out;
  for (double v : values)
    if (v == 0.0) throw std::invalid_argument("march_tetrahedron: zero vertex value");
  march_tet(corners, values, -1, -1, nullptr, out);
  return out;
}

double SurfacePatchSet::weighted_measure() const {
  double m = 0.0;
  for (const auto& p : patches) m += p.area * p.mu;
  return m;
}

SurfacePatchSet extract_patches(const DiscreteLevelSet& dls, int slab) {
  SurfacePatchSet set;
  set.slab = slab;
  const BackgroundMesh& fine = dls.refined.mesh;

  for (int half = 0; half < 2; ++half) {
    const int la = 2 * (slab - 1) + half;
    const int lb = la + 1;
    const double ta = dls.level_times[la], tb = dls.level_times[lb];
    const double scale = std::max(dls.level_scale[la], dls.level_scale[lb]);

    for (int rt = 0; rt < fine.n_triangles(); ++rt) {
      const auto& tri = fine.triangles[rt];
      double fv[3][2];
      bool any_neg = false, any_pos = false;
      for (int i = 0; i < 3; ++i) {
        fv[i][0] = perturb(dls.values(la, tri[i]), scale);
        fv[i][1] = perturb(dls.values(lb, tri[i]), scale);
        any_neg |= fv[i][0] < 0.0 || fv[i][1] < 0.0;
        any_pos |= fv[i][0] >= 0.0 || fv[i][1] >= 0.0;
      }
      if (!any_neg || !any_pos) continue;

      std::array<int, 3> ids = {tri[0], tri[1], tri[2]};
      PrismTetNodes tets = prism_tet_nodes(ids);
      int owner = dls.refined.parent[rt];
      for (const auto& tet : tets) {
        std::array<Vector3d, 4> q;
        std::array<double, 4> f;
        for (int i = 0; i < 4; ++i) {
          auto [corner, level] = tet[i];
          const Vector2d& p = fine.vertices[tri[corner]];
          q[i] = Vector3d(p.x(), p.y(), level == 0 ? ta : tb);
          f[i] = fv[corner][level];
        }
        march_tet(q, f, owner, rt, &dls.outer_mesh, set.patches);
      }
    }
  }
  return set;
}

double CrossSection::total_length() const {
  double l = 0.0;
  for (const auto& s : segments) l += s.length();
  return l;
}

CrossSection extract_cross_section(const DiscreteLevelSet& dls, double t, int slab) {
  CrossSection cs;
  cs.time = t;
  cs.slab = slab;
  const BackgroundMesh& fine = dls.refined.mesh;

  int la, lb;
  double frac;
  dls.time_bracket(t, slab, la, lb, frac);
  const double scale = std::max(dls.level_scale[la], dls.level_scale[lb]);

  for (int rt = 0; rt < fine.n_triangles(); ++rt) {
    const auto& tri = fine.triangles[rt];
    double f[3];
    bool any_neg = false, any_pos = false;
    for (int i = 0; i < 3; ++i) {
      double val = (1.0 - frac) * dls.values(la, tri[i]) + frac * dls.values(lb, tri[i]);
      f[i] = perturb(val, scale);
      (f[i] < 0.0 ? any_neg : any_pos) = true;
    }
    if (!any_neg || !any_pos) continue;

    int lone = -1;
    for (int i = 0; i < 3; ++i) {
      bool s0 = f[i] < 0.0;
      bool s1 = f[(i + 1) % 3] < 0.0, s2 = f[(i + 2) % 3] < 0.0;
      if (s0 != s1 && s0 != s2) lone = i;
    }
    const Vector2d& p0 = fine.vertices[tri[lone]];
    const Vector2d& p1 = fine.vertices[tri[(lone + 1) % 3]];
    const Vector2d& p2 = fine.vertices[tri[(lone + 2) % 3]];
    double s0 = f[lone] / (f[lone] - f[(lone + 1) % 3]);
    double s1 = f[lone] / (f[lone] - f[(lone + 2) % 3]);

    CrossSectionSegment seg;
    seg.a = p0 + s0 * (p1 - p0);
    seg.b = p0 + s1 * (p2 - p0);
    seg.owner = dls.refined.parent[rt];

    auto grads = fine.hat_gradients(rt);
    Vector2d g = f[0] * grads[0] + f[1] * grads[1] + f[2] * grads[2];
    double gn = g.norm();
    if (!(gn > 0.0))
      throw GeometryError("extract_cross_section: degenerate gradient on a cut triangle");
    seg.normal = g / gn;
    if (seg.length() > 0.0) cs.segments.push_back(std::move(seg));
  }
  return cs;
}

namespace {

struct TriRule {
  // barycentric coordinates and weights summing to one
  std::vector<std::array<double, 3>> points;
  std::vector<double> weights;
};

const TriRule& triangle_rule(int degree) {
  static const TriRule deg1{{{1.0 / 3, 1.0 / 3, 1.0 / 3}}, {1.0}};
  static const TriRule deg2{
      {{0.5, 0.5, 0.0}, {0.0, 0.5, 0.5}, {0.5, 0.0, 0.5}},
      {1.0 / 3, 1.0 / 3, 1.0 / 3}};
  // positive 6-point rule (exact through degree 4)
  static const double a1 = 0.816847572980459, b1 = 0.091576213509771,
                      w1 = 0.109951743655322;
  static const double a2 = 0.108103018168070, b2 = 0.445948490915965,
                      w2 = 0.223381589678011;
  static const TriRule deg3{
      {{a1, b1, b1}, {b1, a1, b1}, {b1, b1, a1}, {a2, b2, b2}, {b2, a2, b2}, {b2, b2, a2}},
      {w1, w1, w1, w2, w2, w2}};
  switch (degree) {
    case 1: return deg1;
    case 2: return deg2;
    case 3: return deg3;
    default: throw std::invalid_argument("triangle quadrature: unsupported degree");
  }
}

}  // namespace

const GaussRule& gauss_rule_01(int n) {
  static const GaussRule g1{{0.5}, {1.0}};
  static const double c = 0.5 / std::sqrt(3.0);
  static const GaussRule g2{{0.5 - c, 0.5 + c}, {0.5, 0.5}};
  static const double d = 0.5 * std::sqrt(3.0 / 5.0);
  static const GaussRule g3{{0.5 - d, 0.5, 0.5 + d}, {5.0 / 18, 8.0 / 18, 5.0 / 18}};
  switch (n) {
    case 1: return g1;
    case 2: return g2;
    case 3: return g3;
    default: throw std::invalid_argument("gauss_rule_01: unsupported point count");
  }
}

std::vector<WeightedPoint3> triangle_quadrature(const SurfacePatch& p, int degree) {
  const TriRule& rule = triangle_rule(degree);
  std::vector<WeightedPoint3> out;
  out.reserve(rule.points.size());
  for (size_t k = 0; k < rule.points.size(); ++k) {
    const auto& lam = rule.points[k];
    out.push_back({lam[0] * p.v[0] + lam[1] * p.v[1] + lam[2] * p.v[2],
                   rule.weights[k] * p.area});
  }
  return out;
}

std::vector<WeightedPoint3> quadrature_on_patches(const SurfacePatchSet& patches, int degree) {
  std::vector<WeightedPoint3> out;
  for (size_t k = 0; k < patches.patches.size(); ++k) {
    for (auto& qp : triangle_quadrature(patches.patches[k], degree)) {
      qp.patch = static_cast<int>(k);
      out.push_back(qp);
    }
  }
  return out;
}

std::vector<WeightedPoint2> segment_quadrature(const CrossSectionSegment& s, int degree) {
  int n = degree <= 1 ? 1 : (degree <= 3 ? 2 : 3);
  const GaussRule& rule = gauss_rule_01(n);
  double len = s.length();
  std::vector<WeightedPoint2> out;
  out.reserve(rule.nodes.size());
  for (size_t k = 0; k < rule.nodes.size(); ++k)
    out.push_back({s.a + rule.nodes[k] * (s.b - s.a), rule.weights[k] * len});
  return out;
}

}  // namespace tracefem
