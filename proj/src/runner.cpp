#include "tracefem/runner.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>

namespace tracefem {

Experiment run_single_level(const RunConfig& cfg, int level, bool keep_systems) {
  Experiment ex;
  const double h = cfg.level_h(level);
  const int N = cfg.level_slabs(level);

  ex.problem = make_problem(cfg);
  check_domain_margin(ex.problem.surface, cfg.domain, h, cfg.T);

  BackgroundMesh mesh = build_uniform_mesh(cfg.domain, h);
  ex.partition = build_time_partition(cfg.T, N);
  ex.dls = interpolate_levelset(ex.problem.surface, mesh, ex.partition);

  MarchOptions opts;
  opts.assembly.quad_degree = cfg.quad_degree;
  opts.assembly.stab_nodes = cfg.stab_nodes;
  opts.solver.tol_rel = cfg.solver_tol;
  opts.small_cut_threshold = cfg.small_cut_threshold;
  opts.keep_systems = keep_systems;
  opts.checkpoint_path = cfg.checkpoint;
  ex.march = run_march(ex.dls, ex.problem, opts);

  ex.row = compute_errors(ex.dls, ex.problem, ex.march, cfg.quad_degree);
  ex.row.level = level;
  if (cfg.deterministic) ex.row.assemble_seconds = ex.row.solve_seconds = 0.0;
  return ex;
}

ConvergenceStudy run_convergence(const RunConfig& cfg) {
  ConvergenceStudy study;
  std::vector<ErrorRow> rows;
  for (int level = 0; level < cfg.levels; ++level)
    rows.push_back(run_single_level(cfg, level).row);
  study.table = eoc_table(std::move(rows));

  std::ostringstream os;
  if (cfg.levels >= 3) {
    study.has_verdict = true;
    double eoc_energy = study.table.eoc_energy.back();
    double eoc_l2 = study.table.eoc_l2.back();
    study.pass = eoc_energy >= cfg.thr_eoc_energy && eoc_l2 >= cfg.thr_eoc_l2;
    os << "final EOC: energy " << eoc_energy << " (threshold " << cfg.thr_eoc_energy << "), L2 "
       << eoc_l2 << " (threshold " << cfg.thr_eoc_l2 << ") -> "
       << (study.pass ? "PASS" : "FAIL");
  } else {
    os << "fewer than 3 levels -> verdict SKIPPED";
  }
  study.summary = os.str();
  return study;
}

StabilityStudy run_stability(const RunConfig& cfg) {
  StabilityStudy study;
  ProblemSpec base = make_problem(cfg);
  study.sigma_min = base.sigma_min();
  study.c0 = base.surface.admissibility_constant(cfg.nu);
  if (study.c0 <= 0.0)
    study.summary = "warning: admissibility constant is not positive; ";
  study.cs = 0.25 * std::min({1.0, cfg.nu, study.c0});
  const double threshold = 0.9 * 2.0 * study.cs;

  study.pass = true;
  for (double sigma : {0.0, study.sigma_min, 2.0 * study.sigma_min}) {
    RunConfig level_cfg = cfg;
    level_cfg.sigma = sigma;
    level_cfg.sigma_auto = false;
    Experiment ex = run_single_level(level_cfg, 0, /*keep_systems=*/true);
    EllipticityProbe probe = ellipticity_probe(ex.march, cfg.probe_samples, cfg.probe_seed);

    StabilityRow row;
    row.sigma = sigma;
    row.min_ratio = probe.min_ratio;
    row.hypothesis_met = sigma >= study.sigma_min - 1e-14;
    row.pass = !row.hypothesis_met || probe.min_ratio >= threshold;
    if (row.hypothesis_met && !row.pass) study.pass = false;
    study.rows.push_back(row);
  }

  std::ostringstream os;
  os << study.summary << "c0=" << study.c0 << " cs=" << study.cs << " sigma_min=" << study.sigma_min
     << " threshold=" << threshold << " -> " << (study.pass ? "PASS" : "FAIL");
  study.summary = os.str();
  return study;
}

double spacetime_measure_exact(const EvolvingSurface& surface, double T) {
  // composite 3-point Gauss on 256 panels of [0, T]
  const GaussRule& rule = gauss_rule_01(3);
  const int panels = 256;
  double total = 0.0;
  for (int p = 0; p < panels; ++p) {
    double a = T * p / panels, w = T / panels;
    for (size_t k = 0; k < rule.nodes.size(); ++k)
      total += w * rule.weights[k] * surface.length(a + rule.nodes[k] * w);
  }
  return total;
}

GeometryStudy run_geometry(const RunConfig& cfg) {
  GeometryStudy study;
  EvolvingSurface surface = make_surface(cfg);
  study.exact = spacetime_measure_exact(surface, cfg.T);

  for (int level = 0; level < cfg.levels; ++level) {
    const double h = cfg.level_h(level);
    const int N = cfg.level_slabs(level);
    check_domain_margin(surface, cfg.domain, h, cfg.T);
    BackgroundMesh mesh = build_uniform_mesh(cfg.domain, h);
    TimePartition partition = build_time_partition(cfg.T, N);
    DiscreteLevelSet dls = interpolate_levelset(surface, mesh, partition);

    GeometryRow row;
    row.level = level;
    row.h = h;
    row.dt = partition.dt;
    for (int n = 1; n <= N; ++n) row.measure += extract_patches(dls, n).weighted_measure();
    row.exact = study.exact;
    row.error = std::abs(row.measure - study.exact);
    study.rows.push_back(row);
  }

  std::ostringstream os;
  if (cfg.levels >= 2) {
    double halvings = cfg.levels - 1;
    study.eoc_aggregate =
        std::log2(study.rows.front().error / study.rows.back().error) / halvings;
    study.pass = study.eoc_aggregate >= cfg.thr_geometry_eoc;
    os << "aggregate EOC over " << halvings << " halvings: " << study.eoc_aggregate
       << " (threshold " << cfg.thr_geometry_eoc << ") -> " << (study.pass ? "PASS" : "FAIL");
  } else {
    os << "single level -> verdict SKIPPED";
  }
  study.summary = os.str();
  return study;
}

namespace {

std::string csv_header(const RunConfig& cfg, const std::string& kind) {
  std::ostringstream os;
  os << "# tracefem " << kind << "\n# " << describe(cfg) << "\n";
  return os.str();
}

}  // namespace

std::string convergence_csv(const RunConfig& cfg, const EocTable& table) {
  std::ostringstream os;
  os << csv_header(cfg, cfg.mode) << std::setprecision(12)
     << "level,h,dt,slabs,dofs,err_l2,err_h1,err_h,max_cross,jump_l2,err_energy,"
        "sol_energy,f_l2,max_mean,max_abs_u,eoc_l2,eoc_h1,eoc_energy,assemble_s,solve_s\n";
  for (size_t i = 0; i < table.rows.size(); ++i) {
    const ErrorRow& r = table.rows[i];
    os << r.level << "," << r.h << "," << r.dt << "," << r.n_slabs << "," << r.n_dof_total << ","
       << r.err_l2 << "," << r.err_h1 << "," << r.err_h << "," << r.max_cross << "," << r.jump_l2
       << "," << r.err_energy << "," << r.sol_energy << "," << r.f_l2 << "," << r.max_mean << ","
       << r.max_abs_u << ",";
    if (i > 0)
      os << table.eoc_l2[i - 1] << "," << table.eoc_h1[i - 1] << "," << table.eoc_energy[i - 1];
    else
      os << ",,";
    os << "," << r.assemble_seconds << "," << r.solve_seconds << "\n";
  }
  return os.str();
}

std::string geometry_csv(const RunConfig& cfg, const GeometryStudy& study) {
  std::ostringstream os;
  os << csv_header(cfg, cfg.mode) << std::setprecision(12)
     << "level,h,dt,measure,exact,error\n";
  for (const auto& r : study.rows)
    os << r.level << "," << r.h << "," << r.dt << "," << r.measure << "," << r.exact << ","
       << r.error << "\n";
  return os.str();
}

std::string stability_text(const RunConfig& cfg, const StabilityStudy& study) {
  std::ostringstream os;
  os << csv_header(cfg, cfg.mode) << std::setprecision(12)
     << "sigma,min_ratio,hypothesis_met,pass\n";
  for (const auto& r : study.rows)
    os << r.sigma << "," << r.min_ratio << "," << (r.hypothesis_met ? 1 : 0) << ","
       << (r.pass ? 1 : 0) << "\n";
  os << "# " << study.summary << "\n";
  return os.str();
}

}  // namespace tracefem
