#pragma once

#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "tracefem/levelset.hpp"
#include "tracefem/mesh.hpp"

namespace tracefem {

struct GeometryError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Flat triangle of the discrete space-time surface inside one outer prism.
/// The unit normal points toward positive phi; mu = |nu_x| is the factor that
/// turns the surface measure on the space-time manifold into ds dt.
struct SurfacePatch {
  std::array<Vector3d, 3> v;   // (x, y, t)
  int owner = -1;              // outer (parent) triangle
  int refined_tri = -1;
  int neighbor = -1;           // parent across a coincident vertical face, else -1
  Vector3d normal{0, 0, 0};
  double area = 0.0;
  double mu = 0.0;
  double normal_velocity = 0.0;  // -nu_t / |nu_x|, read from the discrete normal
};

struct SurfacePatchSet {
  int slab = 1;
  std::vector<SurfacePatch> patches;

  /// Sum of area * mu: the discrete value of the double integral of 1 over
  /// the moving curve in this slab.
  double weighted_measure() const;
};

SurfacePatchSet extract_patches(const DiscreteLevelSet& dls, int slab);

/// Zero set of the linear interpolant of the given vertex values on one
/// tetrahedron: empty, one triangle (3:1 sign split) or two (2:2). Exposed
/// for verification; exactly-zero values must be perturbed by the caller.
std::vector<SurfacePatch> march_tetrahedron(const std::array<Vector3d, 4>& corners,
                                            const std::array<double, 4>& values);

struct CrossSectionSegment {
  Vector2d a, b;
  int owner = -1;          // outer (parent) triangle
  Vector2d normal{0, 0};   // unit, toward positive phi
  double length() const { return (b - a).norm(); }
};

struct CrossSection {
  double time = 0.0;
  int slab = 1;  // slab whose interpolant was evaluated
  std::vector<CrossSectionSegment> segments;

  double total_length() const;
};

/// Zero set of phi_h(., t) evaluated one-sidedly from the given slab. At slab
/// boundaries the nodal values are shared, so both sides produce the same
/// segments.
CrossSection extract_cross_section(const DiscreteLevelSet& dls, double t, int slab);

struct WeightedPoint3 {
  Vector3d x;
  double w;        // includes patch area only; metric factors applied by callers
  int patch = -1;  // index into the originating patch set (flattened form)
};
struct WeightedPoint2 {
  Vector2d x;
  double w;
};

/// Symmetric rules with positive weights, exact for polynomials of the given
/// degree on flat patches. Supported degrees: 1, 2, 3.
std::vector<WeightedPoint3> triangle_quadrature(const SurfacePatch& p, int degree);
std::vector<WeightedPoint3> quadrature_on_patches(const SurfacePatchSet& patches, int degree);

std::vector<WeightedPoint2> segment_quadrature(const CrossSectionSegment& s, int degree);

/// Gauss-Legendre nodes/weights on [0, 1]; weights sum to 1. n in 1..3.
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
const GaussRule& gauss_rule_01(int n);

}  // namespace tracefem
