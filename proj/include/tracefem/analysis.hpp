#pragma once

#include <vector>

#include "tracefem/march.hpp"

namespace tracefem {

/// Norms of the error against the exact solution, evaluated on the discrete
/// space-time surface with the metric factor, plus the same components for
/// the solution itself. Error fields are NaN when the problem carries no
/// exact solution.
struct ErrorRow {
  int level = 0;
  double h = 0.0, dt = 0.0;
  int n_slabs = 0;
  long n_dof_total = 0;

  double err_l2 = 0.0;      // ||e||_0 on the space-time surface
  double err_h1 = 0.0;      // ||grad_Gamma e||_0
  double err_h = 0.0;       // (err_l2^2 + err_h1^2)^(1/2)
  double max_cross = 0.0;   // max_n ||e_-^n||
  double jump_l2 = 0.0;     // (sum_n ||[e]^{n-1}||^2)^(1/2)
  double err_energy = 0.0;  // (max_cross^2 + jump_l2^2 + err_h^2)^(1/2)

  double sol_energy = 0.0;  // same norm of u_h, with [u]^0 = u_+^0 - u0
  double f_l2 = 0.0;
  double max_mean = 0.0;   // max_t |integral of u_h over the cross-section|
  double max_abs_u = 0.0;  // over all sampled points

  double assemble_seconds = 0.0, solve_seconds = 0.0;
};

ErrorRow compute_errors(const DiscreteLevelSet& dls, const ProblemSpec& problem,
                        const MarchResult& result, int quad_degree);

struct EocTable {
  std::vector<ErrorRow> rows;
  std::vector<double> eoc_l2, eoc_h1, eoc_energy;  // size rows-1
};

/// EOC = log2(coarse/fine) between consecutive h-halved levels.
EocTable eoc_table(std::vector<ErrorRow> rows);

struct ConservationReport {
  std::vector<double> mean_minus;     // integral of u_-^n over Gamma(t_n), n = 1..N
  std::vector<double> mean_integral;  // k-node quadrature of the mean over each slab
  double max_abs_mean_minus = 0.0;
  double max_abs_integral = 0.0;
  double scale = 0.0;  // max_t |Gamma(t)| * max |u_h|
};

ConservationReport conservation_report(const DiscreteLevelSet& dls, const MarchResult& result,
                                       int k_nodes, int quad_degree);

struct EllipticityProbe {
  double min_ratio = 0.0;
  std::vector<double> ratios;
};

/// Rayleigh-type ratios B(u, u) / E(u) of the full space-time bilinear form
/// for random global coefficient vectors; requires a march run with
/// keep_systems. E(u) = ||u_-^N||^2 + sum ||[u]^{n-1}||^2 + ||u||_H^2.
EllipticityProbe ellipticity_probe(const MarchResult& result, int n_samples, unsigned seed);

/// B(u, u) and E(u) for caller-supplied per-slab coefficient vectors.
void bilinear_and_energy(const MarchResult& result, const std::vector<Eigen::VectorXd>& u,
                         double& B, double& E);

}  // namespace tracefem
