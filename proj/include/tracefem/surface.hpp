#pragma once

#include <functional>
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "tracefem/mesh.hpp"

namespace tracefem {

/// Closed curve transported by a smooth velocity field, described by a level
/// set (negative inside). Catalog instances are circles with center path c(t)
/// and radius r(t); every derived quantity below is closed form and safe to
/// evaluate anywhere in a tube around the curve.
struct EvolvingSurface {
  std::function<double(const Vector2d&, double)> phi;
  std::function<Vector2d(const Vector2d&, double)> velocity;
  std::function<Vector2d(const Vector2d&, double)> normal;      // spatial unit normal
  std::function<double(const Vector2d&, double)> div_gamma_w;   // tangential divergence of w
  std::function<double(double)> length;                         // |Gamma(t)|
  std::function<double(double)> friedrichs;                     // c_F(t), 1/r^2 on circles

  // circle-catalog accessors
  std::function<Vector2d(double)> center;
  std::function<double(double)> radius;
  std::function<double(double)> radius_rate;

  double horizon = 1.0;  // parameters validated on [0, horizon]

  double normal_speed(const Vector2d& x, double t) const {
    return velocity(x, t).dot(normal(x, t));
  }
  Vector2d point_at(double theta, double t) const {
    return center(t) + radius(t) * Vector2d(std::cos(theta), std::sin(theta));
  }

  /// Smallest value of div_Gamma w + nu * c_F over the curve and [0, horizon];
  /// positive values certify the positive definite regime.
  double admissibility_constant(double nu, int samples = 4097) const;

  /// Stabilization threshold (nu/2) * max_t c_F(t) / |Gamma(t)|.
  double sigma_threshold(double nu, int samples = 4097) const;
};

struct SurfaceParams {
  Vector2d center{0.0, 0.0};
  double r0 = 1.0;
  Vector2d velocity{0.0, 0.0};  // translating
  double rate = 0.0;            // shrinking: r(t) = r0 + rate * t
  double amplitude = 0.0;       // oscillating: r(t) = r0 + amplitude * sin(omega * t)
  double omega = 0.0;
  double T = 1.0;
};

/// Catalog: "stationary", "translating", "shrinking", "oscillating".
EvolvingSurface make_test_surface(const std::string& name, const SurfaceParams& p);

struct ExactSolution {
  std::function<double(const Vector2d&, double)> value;
  std::function<Vector2d(const Vector2d&, double)> gradient;  // ambient spatial gradient
};

struct ProblemSpec {
  EvolvingSurface surface;
  double nu = 1.0;
  double sigma = 0.0;
  std::function<double(const Vector2d&, double)> f;
  std::function<double(const Vector2d&)> u0;
  std::optional<ExactSolution> exact;
  std::string name;

  double sigma_min() const { return surface.sigma_threshold(nu); }
};

/// g(t) = a + b t + c sin(omega t)
struct TimeProfile {
  double a = 1.0, b = 0.0, c = 0.0, omega = 0.0;
  double value(double t) const { return a + b * t + c * std::sin(omega * t); }
  double rate(double t) const { return b + c * omega * std::cos(omega * t); }
};

/// Angular-harmonic manufactured solution u = g(t) cos(k theta) around the
/// instantaneous center, with the forcing assembled in closed form from the
/// material derivative, the reaction term and the Laplace-Beltrami term
/// (-k^2/rho^2 of u on a circle). k >= 1 keeps all curve means zero.
ProblemSpec manufacture_problem(const EvolvingSurface& surface, int k, const TimeProfile& g,
                                double nu, double sigma);

/// Spatially constant solution u = a + b t; lies in the trace space exactly.
ProblemSpec make_constant_problem(const EvolvingSurface& surface, double a, double b, double nu);

/// f = 0, u0 = 0, exact solution identically zero.
ProblemSpec make_zero_problem(const EvolvingSurface& surface, double nu, double sigma);

/// Verifies that the curve keeps a margin of at least 2h to the domain
/// boundary on [0, T]; throws std::invalid_argument otherwise.
void check_domain_margin(const EvolvingSurface& surface, const Rect& bounds, double h, double T);

}  // namespace tracefem
