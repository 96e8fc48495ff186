#include "tracefem/assembly.hpp"

#include <cmath>

namespace tracefem {

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

/// Trial-side element of one patch. For a patch coincident with a vertical
/// face shared by two active prisms the convective gradient is the mean of
/// the two one-sided gradients, which couples the neighbor's third vertex;
/// everywhere else this is the plain three-vertex element.
struct PatchElement {
  int n_vert = 3;
  std::array<int, 4> vertex{};
  std::array<int, 8> dof{};
  std::array<Vector2d, 4> grad_conv{};  // averaged, for w . grad u
  std::array<Vector2d, 4> grad_own{};   // owner-sided, for tangential terms
};

PatchElement make_patch_element(const BackgroundMesh& mesh, const TraceSpaceSlab& space,
                                const SurfacePatch& patch) {
  PatchElement e;
  const auto& tk = mesh.triangles[patch.owner];
  auto gk = mesh.hat_gradients(patch.owner);
  for (int i = 0; i < 3; ++i) {
    e.vertex[i] = tk[i];
    e.grad_own[i] = gk[i];
    e.grad_conv[i] = gk[i];
  }
  if (patch.neighbor >= 0 && space.is_active(patch.neighbor)) {
    const auto& tm = mesh.triangles[patch.neighbor];
    auto gm = mesh.hat_gradients(patch.neighbor);
    for (int i = 0; i < 3; ++i) e.grad_conv[i] *= 0.5;
    for (int j = 0; j < 3; ++j) {
      int v = tm[j];
      int pos = -1;
      for (int i = 0; i < 3; ++i)
        if (e.vertex[i] == v) pos = i;
      if (pos >= 0) {
        e.grad_conv[pos] += 0.5 * gm[j];
      } else {
        e.vertex[3] = v;
        e.grad_own[3] = Vector2d::Zero();
        e.grad_conv[3] = 0.5 * gm[j];
        e.n_vert = 4;
      }
    }
  }
  for (int i = 0; i < e.n_vert; ++i) {
    e.dof[2 * i] = space.dof_of(e.vertex[i], 0);
    e.dof[2 * i + 1] = space.dof_of(e.vertex[i], 1);
  }
  return e;
}

SparseMat from_triplets(int rows, int cols, const Triplets& t) {
  SparseMat m(rows, cols);
  m.setFromTriplets(t.begin(), t.end());
  m.makeCompressed();
  return m;
}

}  // namespace

SparseMat SlabSystem::recompose() const {
  SparseMat r = M_mat + nu * K + C + J;
  if (!S.empty()) {
    Eigen::MatrixXd dense = Eigen::MatrixXd(r);
    for (const auto& term : S) dense += term.alpha * term.z * term.z.transpose();
    r = dense.sparseView();
  }
  r.makeCompressed();
  return r;
}

std::vector<RankOneTerm> assemble_stabilization(const DiscreteLevelSet& dls,
                                                const TraceSpaceSlab& space, double sigma,
                                                int k_nodes, int quad_degree) {
  std::vector<RankOneTerm> terms;
  if (sigma <= 0.0) return terms;

  const BackgroundMesh& mesh = dls.outer_mesh;
  const int n = space.slab;
  const double t0 = dls.outer.boundaries[n - 1];
  const double dt = dls.outer.dt;
  const GaussRule& rule = gauss_rule_01(k_nodes);

  for (int r = 0; r < k_nodes; ++r) {
    RankOneTerm term;
    term.node = t0 + rule.nodes[r] * dt;
    term.alpha = sigma * rule.weights[r] * dt;
    term.z = Eigen::VectorXd::Zero(space.n_dof);
    CrossSection cs = extract_cross_section(dls, term.node, n);
    for (const auto& seg : cs.segments) {
      if (!space.is_active(seg.owner))
        throw GeometryError("stabilization: cross-section segment in an inactive prism");
      auto dofs = space.element_dofs(mesh, seg.owner);
      for (const auto& qp : segment_quadrature(seg, quad_degree)) {
        ElementBasis eb = eval_element_basis(mesh, seg.owner, qp.x, term.node);
        for (int i = 0; i < 6; ++i) term.z[dofs[i]] += qp.w * eb.value[i];
      }
    }
    terms.push_back(std::move(term));
  }
  return terms;
}

SlabSystem assemble_slab(const DiscreteLevelSet& dls, const TraceSpaceSlab& space,
                         const SurfacePatchSet& patches, const ProblemSpec& problem,
                         const TraceSpaceSlab* prev_space, const Eigen::VectorXd* prev_coeffs,
                         const AssemblyOptions& opts) {
  const BackgroundMesh& mesh = dls.outer_mesh;
  const int n = space.slab;
  const int ndof = space.n_dof;
  const double t_start = dls.outer.boundaries[n - 1];
  const double t_end = dls.outer.boundaries[n];
  if (n > 1 && (!prev_space || !prev_coeffs))
    throw std::invalid_argument("assemble_slab: missing upwind trace for slab " +
                                std::to_string(n));

  SlabSystem sys;
  sys.slab = n;
  sys.n_dof = ndof;
  sys.nu = problem.nu;
  sys.b_load = Eigen::VectorXd::Zero(ndof);
  sys.b_inflow = Eigen::VectorXd::Zero(ndof);

  Triplets tM, tK, tC, tJ, tM0, tJm, tJx;

  // volume terms on the space-time patches
  for (const auto& patch : patches.patches) {
    if (!space.is_active(patch.owner))
      throw GeometryError("assemble_slab: patch owned by an inactive prism");
    PatchElement el = make_patch_element(mesh, space, patch);
    auto own_dofs = space.element_dofs(mesh, patch.owner);

    Vector2d nh = patch.normal.head<2>().normalized();
    Eigen::Matrix2d proj = Eigen::Matrix2d::Identity() - nh * nh.transpose();

    for (const auto& qp : triangle_quadrature(patch, opts.quad_degree)) {
      const Vector2d x = qp.x.head<2>();
      const double t = qp.x.z();
      const double w = qp.w * patch.mu;

      Vector3d lam = mesh.barycentric(patch.owner, x);
      Vector2d wvec = problem.surface.velocity(x, t);
      double divw = problem.surface.div_gamma_w(x, t);
      double fval = problem.f(x, t);

      // owner-side test/trial data
      double val[8];
      double mdot[8];  // material derivative of trial functions
      Vector2d tgrad[6];
      for (int i = 0; i < el.n_vert; ++i) {
        double hat = i < 3 ? lam[i] : 0.0;
        val[2 * i] = hat;
        val[2 * i + 1] = t * hat;
        double conv = wvec.dot(el.grad_conv[i]);
        mdot[2 * i] = conv;
        mdot[2 * i + 1] = hat + t * conv;
      }
      for (int i = 0; i < 3; ++i) {
        Vector2d tg = proj * el.grad_own[i];
        tgrad[2 * i] = tg;
        tgrad[2 * i + 1] = t * tg;
      }

      for (int i = 0; i < 6; ++i) {
        const int row = own_dofs[i];
        sys.b_load[row] += w * fval * val[i];
        for (int j = 0; j < 2 * el.n_vert; ++j)
          tM.emplace_back(row, el.dof[j], w * mdot[j] * val[i]);
        for (int j = 0; j < 6; ++j) {
          tK.emplace_back(row, own_dofs[j], w * tgrad[j].dot(tgrad[i]));
          tC.emplace_back(row, own_dofs[j], w * divw * val[j] * val[i]);
          tM0.emplace_back(row, own_dofs[j], w * val[j] * val[i]);
        }
      }
    }
  }

  // upwind coupling at the slab start and end-face mass
  CrossSection cs_start = extract_cross_section(dls, t_start, n);
  for (const auto& seg : cs_start.segments) {
    if (!space.is_active(seg.owner))
      throw GeometryError("assemble_slab: start cross-section in an inactive prism");
    auto dofs = space.element_dofs(mesh, seg.owner);
    const TraceSpaceSlab* ps = prev_space;
    std::array<int, 6> pdofs{};
    if (ps) {
      if (!ps->is_active(seg.owner))
        throw GeometryError("assemble_slab: upwind trace undefined on a new prism");
      pdofs = ps->element_dofs(mesh, seg.owner);
    }
    for (const auto& qp : segment_quadrature(seg, opts.quad_degree)) {
      ElementBasis eb = eval_element_basis(mesh, seg.owner, qp.x, t_start);
      for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j)
          tJ.emplace_back(dofs[i], dofs[j], qp.w * eb.value[j] * eb.value[i]);
      if (ps) {
        for (int ip = 0; ip < 6; ++ip)
          for (int j = 0; j < 6; ++j)
            tJx.emplace_back(pdofs[ip], dofs[j], qp.w * eb.value[ip] * eb.value[j]);
      } else {
        double u0v = problem.u0(qp.x);
        for (int i = 0; i < 6; ++i) sys.b_inflow[dofs[i]] += qp.w * u0v * eb.value[i];
      }
    }
  }

  CrossSection cs_end = extract_cross_section(dls, t_end, n);
  for (const auto& seg : cs_end.segments) {
    if (!space.is_active(seg.owner))
      throw GeometryError("assemble_slab: end cross-section in an inactive prism");
    auto dofs = space.element_dofs(mesh, seg.owner);
    for (const auto& qp : segment_quadrature(seg, opts.quad_degree)) {
      ElementBasis eb = eval_element_basis(mesh, seg.owner, qp.x, t_end);
      for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j)
          tJm.emplace_back(dofs[i], dofs[j], qp.w * eb.value[j] * eb.value[i]);
    }
  }

  sys.M_mat = from_triplets(ndof, ndof, tM);
  sys.K = from_triplets(ndof, ndof, tK);
  sys.C = from_triplets(ndof, ndof, tC);
  sys.J = from_triplets(ndof, ndof, tJ);
  sys.M0 = from_triplets(ndof, ndof, tM0);
  sys.Jminus = from_triplets(ndof, ndof, tJm);
  if (prev_space) {
    sys.Jcross = from_triplets(prev_space->n_dof, ndof, tJx);
    sys.b_inflow = sys.Jcross.transpose() * (*prev_coeffs);
  }

  sys.S = assemble_stabilization(dls, space, problem.sigma, opts.stab_nodes, opts.quad_degree);

  SparseMat A = sys.M_mat + problem.nu * sys.K + sys.C + sys.J;
  if (!sys.S.empty()) {
    Triplets tS;
    for (const auto& term : sys.S) {
      for (int i = 0; i < ndof; ++i) {
        if (term.z[i] == 0.0) continue;
        for (int j = 0; j < ndof; ++j) {
          if (term.z[j] == 0.0) continue;
          tS.emplace_back(i, j, term.alpha * term.z[i] * term.z[j]);
        }
      }
    }
    A += from_triplets(ndof, ndof, tS);
  }
  A.makeCompressed();
  sys.A = std::move(A);
  sys.b = sys.b_load + sys.b_inflow;
  return sys;
}

}  // namespace tracefem
