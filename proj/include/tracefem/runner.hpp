#pragma once

#include <string>
#include <vector>

#include "tracefem/analysis.hpp"
#include "tracefem/config.hpp"
#include "tracefem/levelset.hpp"

namespace tracefem {

/// One fully-run discretization level, owning all of its state.
struct Experiment {
  TimePartition partition;
  DiscreteLevelSet dls;
  ProblemSpec problem;
  MarchResult march;
  ErrorRow row;
};

Experiment run_single_level(const RunConfig& cfg, int level, bool keep_systems = false);

struct ConvergenceStudy {
  EocTable table;
  bool has_verdict = false;  // needs >= 3 levels
  bool pass = false;
  std::string summary;
};

ConvergenceStudy run_convergence(const RunConfig& cfg);

struct StabilityRow {
  double sigma = 0.0;
  double min_ratio = 0.0;
  bool hypothesis_met = false;  // sigma >= sigma_min
  bool pass = false;            // min_ratio >= 0.9 * 2 cs (only asserted when met)
};

struct StabilityStudy {
  std::vector<StabilityRow> rows;
  double c0 = 0.0, cs = 0.0, sigma_min = 0.0;
  bool pass = false;
  std::string summary;
};

StabilityStudy run_stability(const RunConfig& cfg);

struct GeometryRow {
  int level = 0;
  double h = 0.0, dt = 0.0;
  double measure = 0.0, exact = 0.0, error = 0.0;
};

struct GeometryStudy {
  std::vector<GeometryRow> rows;
  double exact = 0.0;
  double eoc_aggregate = 0.0;
  bool pass = false;
  std::string summary;
};

GeometryStudy run_geometry(const RunConfig& cfg);

/// Integral of the analytic curve length over [0, T] (composite Gauss).
double spacetime_measure_exact(const EvolvingSurface& surface, double T);

std::string convergence_csv(const RunConfig& cfg, const EocTable& table);
std::string geometry_csv(const RunConfig& cfg, const GeometryStudy& study);
std::string stability_text(const RunConfig& cfg, const StabilityStudy& study);

}  // namespace tracefem
