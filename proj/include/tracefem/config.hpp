#pragma once

#include <stdexcept>
#include <string>

#include "tracefem/surface.hpp"

namespace tracefem {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string mode = "run";  // run | converge | stability | geometry

  std::string surface = "stationary";
  SurfaceParams surface_params;

  std::string solution = "harmonic";  // harmonic | constant | zero
  int harmonic_k = 1;
  TimeProfile g{1.0, 0.0, 0.5, 2.0};
  double constant_a = 1.0, constant_b = 2.0;

  double nu = 1.0;
  double sigma = 0.0;
  bool sigma_auto = false;

  Rect domain{{-2.0, -2.0}, {2.0, 2.0}};
  double T = 1.0;
  double h = 0.4;
  int levels = 4;
  double dt_factor = 1.0;  // dt = dt_factor * h

  int quad_degree = 2;
  int stab_nodes = 2;
  double solver_tol = 1e-10;
  double small_cut_threshold = 0.0;

  double thr_eoc_energy = 0.8;
  double thr_eoc_l2 = 1.7;
  double thr_geometry_eoc = 1.9;
  int probe_samples = 100;
  unsigned probe_seed = 20240601;

  std::string out;
  bool deterministic = false;
  bool dump_vtk = false;
  bool dump_matrix = false;
  std::string checkpoint;

  /// Spatial size and slab count at refinement level l (h halves per level).
  double level_h(int l) const { return h / (1 << l); }
  int level_slabs(int l) const;
};

RunConfig load_config(const std::string& path);
RunConfig parse_config(const std::string& json_text);

EvolvingSurface make_surface(const RunConfig& cfg);
/// Resolves sigma = auto to the catalog threshold.
ProblemSpec make_problem(const RunConfig& cfg);

std::string describe(const RunConfig& cfg);  // one-line provenance record

}  // namespace tracefem
