// Acceptance suite: one verification per claim the solver is expected to
// reproduce at desk scale. Each criterion prints a single PASS/FAIL line with
// the measured quantities; the exit code is the number of failures.
//
// Usage: acceptance [criterion]    (1..8; all when omitted)

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>
#include <vector>

#include "tracefem/analysis.hpp"
#include "tracefem/runner.hpp"

using namespace tracefem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

RunConfig base_config() {
  RunConfig cfg;
  cfg.levels = 1;
  cfg.nu = 1.0;
  cfg.T = 1.0;
  return cfg;
}

// 1. Homogeneous data must produce exactly zero coefficients.
Outcome zero_problem() {
  RunConfig cfg = base_config();
  cfg.surface = "translating";
  cfg.surface_params.velocity = Vector2d(0.2, 0);
  cfg.solution = "zero";
  cfg.h = 0.25;
  cfg.dt_factor = 0.5;  // N = 8
  Experiment ex = run_single_level(cfg, 0);
  SolutionTrace trace{&ex.dls, &ex.march};
  double worst = trace.max_abs_coeff();
  Outcome out;
  out.pass = ex.partition.n_slabs == 8 && worst <= 1e-12;
  std::ostringstream os;
  os << "max |coefficient| = " << worst << " (tolerance 1e-12, N = " << ex.partition.n_slabs
     << ")";
  out.detail = os.str();
  return out;
}

// 2. A solution inside the trace space is reproduced to solver accuracy.
Outcome exactness() {
  RunConfig cfg = base_config();
  cfg.surface = "stationary";
  cfg.solution = "constant";
  cfg.constant_a = 1.0;
  cfg.constant_b = 2.0;
  cfg.sigma = 0.0;
  cfg.h = 0.25;
  Experiment ex = run_single_level(cfg, 0);
  Outcome out;
  out.pass = ex.row.err_energy <= 1e-9;
  std::ostringstream os;
  os << "energy norm of the error = " << ex.row.err_energy << " (tolerance 1e-9)";
  out.detail = os.str();
  return out;
}

// 3. First order in the energy norm, second order in L2 under h-halving.
Outcome convergence_orders() {
  RunConfig cfg = base_config();
  cfg.surface = "translating";
  cfg.surface_params.center = Vector2d(-0.1, 0);
  cfg.surface_params.velocity = Vector2d(0.2, 0);
  cfg.solution = "harmonic";
  cfg.harmonic_k = 1;
  cfg.g = TimeProfile{1.0, 0.0, 0.5, 2.0};
  cfg.sigma_auto = true;
  cfg.h = 0.4;
  cfg.levels = 4;
  cfg.thr_eoc_energy = 0.8;
  cfg.thr_eoc_l2 = 1.7;
  ConvergenceStudy study = run_convergence(cfg);
  Outcome out;
  out.pass = study.has_verdict && study.pass;
  std::ostringstream os;
  os << "final EOC: energy = " << study.table.eoc_energy.back() << " (>= 0.8), L2 = "
     << study.table.eoc_l2.back() << " (>= 1.7); finest errors "
     << study.table.rows.back().err_energy << " / " << study.table.rows.back().err_l2;
  out.detail = os.str();
  return out;
}

// 4. Discrete counterparts of the slab mean identities for zero-mean forcing.
Outcome mass_identities() {
  RunConfig cfg = base_config();
  cfg.surface = "oscillating";
  cfg.surface_params.amplitude = 0.2;
  cfg.surface_params.omega = M_PI;
  cfg.solution = "harmonic";
  cfg.harmonic_k = 1;
  cfg.g = TimeProfile{1.0, 0.5, 0.0, 0.0};
  cfg.sigma = 0.0;
  cfg.h = 0.025;
  Experiment ex = run_single_level(cfg, 0);
  ConservationReport rep = conservation_report(ex.dls, ex.march, cfg.stab_nodes, cfg.quad_degree);
  double tol = 1e-8 * rep.scale;
  Outcome out;
  out.pass = rep.max_abs_mean_minus <= tol && rep.max_abs_integral <= tol;
  std::ostringstream os;
  os << "max |mean at slab ends| = " << rep.max_abs_mean_minus << ", max |slab mean integral| = "
     << rep.max_abs_integral << " (tolerance " << tol << " = 1e-8 * scale)";
  out.detail = os.str();
  return out;
}

// 5. Discrete ellipticity bound on the admissible shrinking circle.
Outcome discrete_ellipticity() {
  RunConfig cfg = base_config();
  cfg.surface = "shrinking";
  cfg.surface_params.rate = -0.25;
  cfg.solution = "harmonic";
  cfg.sigma = 0.2;
  cfg.h = 0.25;
  Experiment ex = run_single_level(cfg, 0, /*keep_systems=*/true);

  double sigma_min = ex.problem.sigma_min();
  double c0 = ex.problem.surface.admissibility_constant(cfg.nu);
  double cs = 0.25 * std::min({1.0, cfg.nu, c0});
  EllipticityProbe probe = ellipticity_probe(ex.march, 100, 20240601);
  double threshold = 0.9 * 2.0 * cs;
  Outcome out;
  out.pass = cfg.sigma >= sigma_min && probe.min_ratio >= threshold &&
             std::abs(c0 - 0.75) < 1e-6;
  std::ostringstream os;
  os << "min B(u,u)/E(u) over 100 vectors = " << probe.min_ratio << " (threshold " << threshold
     << "; c0 = " << c0 << ", sigma_min = " << sigma_min << ")";
  out.detail = os.str();
  return out;
}

// 6. Weighted patch measure converges to the analytic space-time measure at
//    second order for both a stationary and a shrinking circle.
Outcome geometry_order() {
  Outcome out;
  out.pass = true;
  std::ostringstream os;
  struct Case {
    const char* name;
    double rate;
    double target;
  };
  for (const Case& c : {Case{"stationary", 0.0, 6.283185307179586},
                        Case{"shrinking", -0.25, 5.497787143782138}}) {
    RunConfig cfg = base_config();
    cfg.surface = c.name;
    cfg.surface_params.rate = c.rate;
    cfg.levels = 4;
    cfg.thr_geometry_eoc = 1.9;
    GeometryStudy study = run_geometry(cfg);
    bool target_ok = std::abs(study.exact - c.target) <= 1e-9;
    out.pass = out.pass && study.pass && target_ok;
    os << c.name << ": EOC = " << study.eoc_aggregate << " (>= 1.9), finest measure = "
       << study.rows.back().measure << " vs " << c.target << "; ";
  }
  out.detail = os.str();
  return out;
}

// 7. Different pivot orders change the coefficients at most, never the trace.
Outcome frame_robustness() {
  RunConfig cfg = base_config();
  cfg.surface = "translating";
  cfg.surface_params.center = Vector2d(-0.1, 0);
  cfg.surface_params.velocity = Vector2d(0.2, 0);
  cfg.solution = "harmonic";
  cfg.g = TimeProfile{1.0, 0.0, 0.5, 2.0};
  cfg.sigma_auto = true;
  cfg.h = 0.2;
  Experiment ex = run_single_level(cfg, 0);
  const int n = ex.partition.n_slabs / 2 + 1;

  SurfacePatchSet patches = extract_patches(ex.dls, n);
  TraceSpaceSlab space =
      build_dofs(ex.dls.outer_mesh, mark_active(ex.dls.outer_mesh, patches), n);
  SlabSystem sys = assemble_slab(ex.dls, space, patches, ex.problem,
                                 &ex.march.slabs[n - 2].space, &ex.march.slabs[n - 2].coeffs,
                                 {cfg.quad_degree, cfg.stab_nodes});
  SolverPolicy permuted;
  permuted.backend = SolverPolicy::Backend::dense_lu;
  permuted.permutation_seed = 42;
  Eigen::VectorXd alt = solve_slab(sys, permuted);

  std::mt19937 rng(7777);
  std::uniform_real_distribution<double> pick(0, 1);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto& patch =
        patches.patches[static_cast<size_t>(pick(rng) * patches.patches.size()) %
                        patches.patches.size()];
    Vector3d lam(pick(rng), pick(rng), pick(rng));
    lam /= lam.sum();
    Vector3d p = lam[0] * patch.v[0] + lam[1] * patch.v[1] + lam[2] * patch.v[2];
    Vector2d x(p.x(), p.y());
    double u_ref =
        eval_element(ex.dls.outer_mesh, space, ex.march.slabs[n - 1].coeffs, patch.owner, x,
                     p.z());
    double u_alt = eval_element(ex.dls.outer_mesh, space, alt, patch.owner, x, p.z());
    worst = std::max(worst, std::abs(u_ref - u_alt));
  }
  Outcome out;
  out.pass = worst <= 1e-8;
  std::ostringstream os;
  os << "max trace deviation under permuted elimination = " << worst
     << " (tolerance 1e-8, slab " << n << ")";
  out.detail = os.str();
  return out;
}

// 8. Large time steps: dt = 4h completes with a comparable energy norm.
Outcome large_steps() {
  RunConfig cfg = base_config();
  cfg.surface = "shrinking";
  cfg.surface_params.rate = -0.25;
  cfg.solution = "harmonic";
  cfg.sigma = 0.2;
  cfg.h = 0.25;

  cfg.dt_factor = 1.0;
  Experiment small = run_single_level(cfg, 0);
  cfg.dt_factor = 4.0;
  Experiment large = run_single_level(cfg, 0);

  Outcome out;
  out.pass = large.partition.n_slabs == 1 &&
             large.row.sol_energy <= 2.0 * small.row.sol_energy;
  std::ostringstream os;
  os << "energy norm with dt = 4h: " << large.row.sol_energy << " vs dt = h: "
     << small.row.sol_energy << " (factor "
     << large.row.sol_energy / small.row.sol_energy << " <= 2)";
  out.detail = os.str();
  return out;
}

struct Criterion {
  const char* name;
  double budget_seconds;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  std::vector<Criterion> criteria = {
      {"zero problem", 5, zero_problem},
      {"trace-space exactness", 5, exactness},
      {"convergence orders", 600, convergence_orders},
      {"mass identities", 60, mass_identities},
      {"discrete ellipticity", 120, discrete_ellipticity},
      {"surface-measure order", 60, geometry_order},
      {"frame robustness", 60, frame_robustness},
      {"large time steps", 60, large_steps},
  };

  int only = 0;
  if (argc > 1) only = std::atoi(argv[1]);

  int failures = 0;
  std::cout << std::setprecision(6);
  for (size_t i = 0; i < criteria.size(); ++i) {
    int id = static_cast<int>(i) + 1;
    if (only != 0 && only != id) continue;
    auto tic = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = criteria[i].run();
    } catch (const std::exception& e) {
      out.pass = false;
      out.detail = std::string("exception: ") + e.what();
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - tic).count();
    bool in_budget = secs < criteria[i].budget_seconds;
    bool ok = out.pass && in_budget;
    if (!ok) ++failures;
    std::cout << (ok ? "[PASS] " : "[FAIL] ") << "criterion " << id << " (" << criteria[i].name
              << "): " << out.detail << " [" << std::fixed << std::setprecision(1) << secs
              << "s / budget " << criteria[i].budget_seconds << "s]" << std::defaultfloat
              << std::setprecision(6) << "\n";
  }
  return failures;
}
