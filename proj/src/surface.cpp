#include "tracefem/surface.hpp"

#include <cmath>
#include <stdexcept>

namespace tracefem {

double EvolvingSurface::admissibility_constant(double nu, int samples) const {
  // div_Gamma w is constant along each catalog circle, so minimizing over t
  // suffices.
  double cmin = std::numeric_limits<double>::infinity();
  for (int i = 0; i < samples; ++i) {
    double t = horizon * i / (samples - 1);
    double r = radius(t);
    double v = radius_rate(t) / r + nu * friedrichs(t);
    cmin = std::min(cmin, v);
  }
  return cmin;
}

double EvolvingSurface::sigma_threshold(double nu, int samples) const {
  double m = 0.0;
  for (int i = 0; i < samples; ++i) {
    double t = horizon * i / (samples - 1);
    m = std::max(m, friedrichs(t) / length(t));
  }
  return 0.5 * nu * m;
}

namespace {

/// All catalog motions combine a translating center with a changing radius,
/// w(x, t) = c'(t) + r'(t) (x - c(t)) / |x - c(t)|. This field transports the
/// level set phi = |x - c(t)| - r(t) exactly, everywhere in the bulk.
EvolvingSurface make_circle(std::function<Vector2d(double)> c, std::function<Vector2d(double)> cdot,
                            std::function<double(double)> r, std::function<double(double)> rdot,
                            double T) {
  EvolvingSurface s;
  s.horizon = T;
  s.center = c;
  s.radius = r;
  s.radius_rate = rdot;
  s.phi = [c, r](const Vector2d& x, double t) { return (x - c(t)).norm() - r(t); };
  s.normal = [c](const Vector2d& x, double t) { return Vector2d((x - c(t)).normalized()); };
  s.velocity = [c, cdot, rdot](const Vector2d& x, double t) {
    return Vector2d(cdot(t) + rdot(t) * (x - c(t)).normalized());
  };
  s.div_gamma_w = [c, rdot](const Vector2d& x, double t) {
    return rdot(t) / (x - c(t)).norm();
  };
  s.length = [r](double t) { return 2.0 * M_PI * r(t); };
  s.friedrichs = [r](double t) { return 1.0 / (r(t) * r(t)); };
  return s;
}

void check_radius_positive(const EvolvingSurface& s) {
  for (int i = 0; i <= 4096; ++i) {
    double t = s.horizon * i / 4096.0;
    if (!(s.radius(t) > 0.0))
      throw std::invalid_argument("make_test_surface: radius reaches zero before T");
  }
}

}  // namespace

EvolvingSurface make_test_surface(const std::string& name, const SurfaceParams& p) {
  const Vector2d c0 = p.center;
  EvolvingSurface s;
  if (name == "stationary") {
    s = make_circle([c0](double) { return c0; }, [](double) { return Vector2d(0, 0); },
                    [p](double) { return p.r0; }, [](double) { return 0.0; }, p.T);
  } else if (name == "translating") {
    const Vector2d w0 = p.velocity;
    s = make_circle([c0, w0](double t) { return Vector2d(c0 + t * w0); },
                    [w0](double) { return w0; }, [p](double) { return p.r0; },
                    [](double) { return 0.0; }, p.T);
  } else if (name == "shrinking") {
    s = make_circle([c0](double) { return c0; }, [](double) { return Vector2d(0, 0); },
                    [p](double t) { return p.r0 + p.rate * t; },
                    [p](double) { return p.rate; }, p.T);
  } else if (name == "oscillating") {
    s = make_circle([c0](double) { return c0; }, [](double) { return Vector2d(0, 0); },
                    [p](double t) { return p.r0 + p.amplitude * std::sin(p.omega * t); },
                    [p](double t) { return p.amplitude * p.omega * std::cos(p.omega * t); }, p.T);
  } else {
    throw std::invalid_argument("make_test_surface: unknown surface '" + name + "'");
  }
  check_radius_positive(s);
  return s;
}

ProblemSpec manufacture_problem(const EvolvingSurface& surface, int k, const TimeProfile& g,
                                double nu, double sigma) {
  if (k < 1)
    throw std::invalid_argument("manufacture_problem: harmonic index must be >= 1");

  auto center = surface.center;
  auto angle = [center](const Vector2d& x, double t) {
    Vector2d d = x - center(t);
    return std::atan2(d.y(), d.x());
  };

  ProblemSpec prob;
  prob.surface = surface;
  prob.nu = nu;
  prob.sigma = sigma;
  prob.name = "harmonic-k" + std::to_string(k);

  ExactSolution exact;
  exact.value = [g, k, angle](const Vector2d& x, double t) {
    return g.value(t) * std::cos(k * angle(x, t));
  };
  exact.gradient = [g, k, angle, center](const Vector2d& x, double t) {
    Vector2d d = x - center(t);
    double rho = d.norm();
    double th = angle(x, t);
    Vector2d tau(-std::sin(th), std::cos(th));
    return Vector2d(-g.value(t) * k * std::sin(k * th) / rho * tau);
  };
  prob.exact = exact;

  // Particles of the catalog motions keep their angle around the moving
  // center, so the material derivative is g'(t) cos(k theta).
  auto divw = surface.div_gamma_w;
  prob.f = [g, k, angle, center, divw, nu](const Vector2d& x, double t) {
    double th = angle(x, t);
    double rho = (x - center(t)).norm();
    double u = g.value(t) * std::cos(k * th);
    double udot = g.rate(t) * std::cos(k * th);
    return udot + divw(x, t) * u + nu * (k * k) / (rho * rho) * u;
  };
  prob.u0 = [exact](const Vector2d& x) { return exact.value(x, 0.0); };
  return prob;
}

ProblemSpec make_constant_problem(const EvolvingSurface& surface, double a, double b, double nu) {
  ProblemSpec prob;
  prob.surface = surface;
  prob.nu = nu;
  prob.sigma = 0.0;
  prob.name = "constant";
  ExactSolution exact;
  exact.value = [a, b](const Vector2d&, double t) { return a + b * t; };
  exact.gradient = [](const Vector2d&, double) { return Vector2d(0, 0); };
  prob.exact = exact;
  auto divw = surface.div_gamma_w;
  prob.f = [a, b, divw](const Vector2d& x, double t) { return b + divw(x, t) * (a + b * t); };
  prob.u0 = [a](const Vector2d&) { return a; };
  return prob;
}

ProblemSpec make_zero_problem(const EvolvingSurface& surface, double nu, double sigma) {
  ProblemSpec prob;
  prob.surface = surface;
  prob.nu = nu;
  prob.sigma = sigma;
  prob.name = "zero";
  ExactSolution exact;
  exact.value = [](const Vector2d&, double) { return 0.0; };
  exact.gradient = [](const Vector2d&, double) { return Vector2d(0, 0); };
  prob.exact = exact;
  prob.f = [](const Vector2d&, double) { return 0.0; };
  prob.u0 = [](const Vector2d&) { return 0.0; };
  return prob;
}

void check_domain_margin(const EvolvingSurface& surface, const Rect& bounds, double h, double T) {
  for (int i = 0; i <= 256; ++i) {
    double t = T * i / 256.0;
    Vector2d c = surface.center(t);
    double r = surface.radius(t);
    bool ok = c.x() - r >= bounds.lo.x() + 2 * h && c.x() + r <= bounds.hi.x() - 2 * h &&
              c.y() - r >= bounds.lo.y() + 2 * h && c.y() + r <= bounds.hi.y() - 2 * h;
    if (!ok)
      throw std::invalid_argument("surface leaves the domain margin of 2h at t = " +
                                  std::to_string(t));
  }
}

}  // namespace tracefem
