#include "tracefem/analysis.hpp"

#include <cmath>
#include <limits>
#include <random>

namespace tracefem {

ErrorRow compute_errors(const DiscreteLevelSet& dls, const ProblemSpec& problem,
                        const MarchResult& result, int quad_degree) {
  const BackgroundMesh& mesh = dls.outer_mesh;
  const TimePartition& part = dls.outer;
  const int N = part.n_slabs;
  const bool have_exact = problem.exact.has_value();
  const double nan = std::numeric_limits<double>::quiet_NaN();

  ErrorRow row;
  row.h = mesh.h;
  row.dt = part.dt;
  row.n_slabs = N;
  for (int d : result.dof_counts) row.n_dof_total += d;
  for (double s : result.assemble_seconds) row.assemble_seconds += s;
  for (double s : result.solve_seconds) row.solve_seconds += s;

  double e_l2 = 0.0, e_h1 = 0.0, u_l2 = 0.0, u_h1 = 0.0, f_l2 = 0.0;
  for (int n = 1; n <= N; ++n) {
    const SlabSolution& sol = result.slabs[n - 1];
    for (const auto& patch : result.patches[n - 1].patches) {
      Vector2d nh = patch.normal.head<2>().normalized();
      Eigen::Matrix2d proj = Eigen::Matrix2d::Identity() - nh * nh.transpose();
      for (const auto& qp : triangle_quadrature(patch, quad_degree)) {
        const Vector2d x = qp.x.head<2>();
        const double t = qp.x.z();
        const double w = qp.w * patch.mu;
        Vector2d gu;
        double uh = eval_element(mesh, sol.space, sol.coeffs, patch.owner, x, t, &gu);
        row.max_abs_u = std::max(row.max_abs_u, std::abs(uh));
        u_l2 += w * uh * uh;
        u_h1 += w * (proj * gu).squaredNorm();
        double fv = problem.f(x, t);
        f_l2 += w * fv * fv;
        if (have_exact) {
          double e = problem.exact->value(x, t) - uh;
          Vector2d ge = proj * (problem.exact->gradient(x, t) - gu);
          e_l2 += w * e * e;
          e_h1 += w * ge.squaredNorm();
        }
      }
    }
  }

  // cross-section norms: one-sided traces and jumps at the slab boundaries,
  // evaluated through the segment owners (robust for edge-aligned segments)
  double e_max_cross = 0.0, e_jump2 = 0.0;
  double u_max_cross = 0.0, u_jump2 = 0.0;
  SolutionTrace trace{&dls, &result};
  auto eval_side = [&](const CrossSectionSegment& seg, const Vector2d& x, double t, int slab) {
    const SlabSolution& s = result.slabs[slab - 1];
    if (!s.space.is_active(seg.owner))
      throw GeometryError("compute_errors: cross-section segment in an inactive prism");
    return eval_element(mesh, s.space, s.coeffs, seg.owner, x, t);
  };
  for (int n = 0; n <= N; ++n) {
    const double tn = part.boundaries[n];
    if (n >= 1) {
      CrossSection cs = extract_cross_section(dls, tn, n);
      double e2 = 0.0, u2 = 0.0;
      for (const auto& seg : cs.segments) {
        for (const auto& qp : segment_quadrature(seg, quad_degree)) {
          double uh = eval_side(seg, qp.x, tn, n);
          u2 += qp.w * uh * uh;
          if (have_exact) {
            double e = problem.exact->value(qp.x, tn) - uh;
            e2 += qp.w * e * e;
          }
        }
      }
      e_max_cross = std::max(e_max_cross, e2);
      u_max_cross = std::max(u_max_cross, u2);
    }
    if (n < N) {
      // jump [.]^n, evaluated on the shared cross-section geometry
      CrossSection cs = extract_cross_section(dls, tn, n + 1);
      double ej2 = 0.0, uj2 = 0.0;
      for (const auto& seg : cs.segments) {
        for (const auto& qp : segment_quadrature(seg, quad_degree)) {
          double up = eval_side(seg, qp.x, tn, n + 1);
          double um = n == 0 ? problem.u0(qp.x) : eval_side(seg, qp.x, tn, n);
          uj2 += qp.w * (up - um) * (up - um);
          if (have_exact) {
            // the exact solution is continuous, so its jump cancels
            double jump_h = up - um;
            double ej = n == 0 ? (problem.exact->value(qp.x, tn) - problem.u0(qp.x)) - jump_h
                               : -jump_h;
            ej2 += qp.w * ej * ej;
          }
        }
      }
      e_jump2 += ej2;
      u_jump2 += uj2;
    }
  }

  // conservation monitor: sampled at slab boundaries and interior Gauss nodes
  for (int n = 1; n <= N; ++n) {
    row.max_mean = std::max(row.max_mean, std::abs(trace.curve_integral(part.boundaries[n], n)));
    const GaussRule& g = gauss_rule_01(2);
    for (double node : g.nodes) {
      double t = part.boundaries[n - 1] + node * part.dt;
      row.max_mean = std::max(row.max_mean, std::abs(trace.curve_integral(t, n)));
    }
  }

  row.f_l2 = std::sqrt(f_l2);
  row.sol_energy = std::sqrt(u_max_cross + u_jump2 + u_l2 + u_h1);
  if (have_exact) {
    row.err_l2 = std::sqrt(e_l2);
    row.err_h1 = std::sqrt(e_h1);
    row.err_h = std::sqrt(e_l2 + e_h1);
    row.max_cross = std::sqrt(e_max_cross);
    row.jump_l2 = std::sqrt(e_jump2);
    row.err_energy = std::sqrt(e_max_cross + e_jump2 + e_l2 + e_h1);
  } else {
    row.err_l2 = row.err_h1 = row.err_h = nan;
    row.max_cross = row.jump_l2 = row.err_energy = nan;
  }
  return row;
}

EocTable eoc_table(std::vector<ErrorRow> rows) {
  EocTable t;
  for (size_t i = 1; i < rows.size(); ++i) {
    double ratio = rows[i - 1].h / rows[i].h;
    if (std::abs(ratio - 2.0) > 1e-9)
      throw std::invalid_argument("eoc_table: levels are not nested by h-halving");
    auto eoc = [](double coarse, double fine) { return std::log2(coarse / fine); };
    t.eoc_l2.push_back(eoc(rows[i - 1].err_l2, rows[i].err_l2));
    t.eoc_h1.push_back(eoc(rows[i - 1].err_h1, rows[i].err_h1));
    t.eoc_energy.push_back(eoc(rows[i - 1].err_energy, rows[i].err_energy));
  }
  t.rows = std::move(rows);
  return t;
}

ConservationReport conservation_report(const DiscreteLevelSet& dls, const MarchResult& result,
                                       int k_nodes, int quad_degree) {
  const TimePartition& part = dls.outer;
  const int N = part.n_slabs;
  SolutionTrace trace{&dls, &result};
  ConservationReport rep;

  double max_len = 0.0, max_u = 0.0;
  for (int n = 1; n <= N; ++n) {
    double tn = part.boundaries[n];
    rep.mean_minus.push_back(trace.curve_integral(tn, n, quad_degree));

    const GaussRule& rule = gauss_rule_01(k_nodes);
    double integral = 0.0;
    for (int r = 0; r < k_nodes; ++r) {
      double t = part.boundaries[n - 1] + rule.nodes[r] * part.dt;
      integral += rule.weights[r] * part.dt * trace.curve_integral(t, n, quad_degree);
    }
    rep.mean_integral.push_back(integral);

    CrossSection cs = extract_cross_section(dls, tn, n);
    max_len = std::max(max_len, cs.total_length());
    for (const auto& seg : cs.segments)
      for (const auto& qp : segment_quadrature(seg, quad_degree))
        max_u = std::max(max_u, std::abs(trace.eval_in_slab(qp.x, tn, n)));
  }
  for (double v : rep.mean_minus) rep.max_abs_mean_minus = std::max(rep.max_abs_mean_minus, std::abs(v));
  for (double v : rep.mean_integral) rep.max_abs_integral = std::max(rep.max_abs_integral, std::abs(v));
  rep.scale = max_len * std::max(max_u, 1e-300);
  return rep;
}

void bilinear_and_energy(const MarchResult& result, const std::vector<Eigen::VectorXd>& u,
                         double& B, double& E) {
  const int N = static_cast<int>(result.systems.size());
  B = 0.0;
  E = 0.0;
  for (int n = 1; n <= N; ++n) {
    const SlabSystem& sys = result.systems[n - 1];
    const Eigen::VectorXd& x = u[n - 1];
    B += x.dot(sys.A * x);
    double jump2 = x.dot(sys.J * x);
    if (n >= 2) {
      const Eigen::VectorXd& xp = u[n - 2];
      double cross = xp.dot(sys.Jcross * x);
      B -= cross;
      jump2 += -2.0 * cross + xp.dot(result.systems[n - 2].Jminus * xp);
    }
    E += jump2 + x.dot(sys.M0 * x) + x.dot(sys.K * x);
    if (n == N) E += x.dot(sys.Jminus * x);
  }
}

EllipticityProbe ellipticity_probe(const MarchResult& result, int n_samples, unsigned seed) {
  if (result.systems.empty())
    throw std::invalid_argument("ellipticity_probe: march was run without keep_systems");
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);

  EllipticityProbe probe;
  probe.min_ratio = std::numeric_limits<double>::infinity();
  for (int s = 0; s < n_samples; ++s) {
    std::vector<Eigen::VectorXd> u;
    for (const auto& sys : result.systems) {
      Eigen::VectorXd x(sys.n_dof);
      for (int i = 0; i < sys.n_dof; ++i) x[i] = dist(rng);
      u.push_back(std::move(x));
    }
    double B, E;
    bilinear_and_energy(result, u, B, E);
    double ratio = B / E;
    probe.ratios.push_back(ratio);
    probe.min_ratio = std::min(probe.min_ratio, ratio);
  }
  return probe;
}

}  // namespace tracefem
