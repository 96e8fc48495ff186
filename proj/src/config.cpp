#include "tracefem/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace tracefem {

using nlohmann::json;

int RunConfig::level_slabs(int l) const {
  double dt = dt_factor * level_h(l);
  return std::max(1, static_cast<int>(std::ceil(T / dt - 1e-12)));
}

namespace {

void read_vec2(const json& j, Vector2d& v) {
  if (!j.is_array() || j.size() != 2) throw ConfigError("expected a [x, y] pair");
  v = Vector2d(j[0].get<double>(), j[1].get<double>());
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }

  RunConfig c;
  try {
    if (j.contains("mode")) c.mode = j["mode"].get<std::string>();
    if (j.contains("surface")) {
      const json& s = j["surface"];
      if (s.contains("name")) c.surface = s["name"].get<std::string>();
      if (s.contains("center")) read_vec2(s["center"], c.surface_params.center);
      if (s.contains("r0")) c.surface_params.r0 = s["r0"].get<double>();
      if (s.contains("velocity")) read_vec2(s["velocity"], c.surface_params.velocity);
      if (s.contains("rate")) c.surface_params.rate = s["rate"].get<double>();
      if (s.contains("amplitude")) c.surface_params.amplitude = s["amplitude"].get<double>();
      if (s.contains("omega")) c.surface_params.omega = s["omega"].get<double>();
    }
    if (j.contains("solution")) {
      const json& s = j["solution"];
      if (s.contains("type")) c.solution = s["type"].get<std::string>();
      if (s.contains("k")) c.harmonic_k = s["k"].get<int>();
      if (s.contains("g")) {
        const json& g = s["g"];
        c.g.a = g.value("a", c.g.a);
        c.g.b = g.value("b", c.g.b);
        c.g.c = g.value("c", c.g.c);
        c.g.omega = g.value("omega", c.g.omega);
      }
      if (s.contains("a")) c.constant_a = s["a"].get<double>();
      if (s.contains("b")) c.constant_b = s["b"].get<double>();
    }
    if (j.contains("nu")) c.nu = j["nu"].get<double>();
    if (j.contains("sigma")) {
      if (j["sigma"].is_string()) {
        if (j["sigma"].get<std::string>() != "auto")
          throw ConfigError("sigma must be a number or \"auto\"");
        c.sigma_auto = true;
      } else {
        c.sigma = j["sigma"].get<double>();
      }
    }
    if (j.contains("domain")) {
      read_vec2(j["domain"]["lo"], c.domain.lo);
      read_vec2(j["domain"]["hi"], c.domain.hi);
    }
    if (j.contains("T")) c.T = j["T"].get<double>();
    if (j.contains("h")) c.h = j["h"].get<double>();
    if (j.contains("levels")) c.levels = j["levels"].get<int>();
    if (j.contains("dt_factor")) c.dt_factor = j["dt_factor"].get<double>();
    if (j.contains("quad_degree")) c.quad_degree = j["quad_degree"].get<int>();
    if (j.contains("stab_nodes")) c.stab_nodes = j["stab_nodes"].get<int>();
    if (j.contains("solver")) c.solver_tol = j["solver"].value("tol_rel", c.solver_tol);
    if (j.contains("small_cut_threshold"))
      c.small_cut_threshold = j["small_cut_threshold"].get<double>();
    if (j.contains("thresholds")) {
      const json& t = j["thresholds"];
      c.thr_eoc_energy = t.value("eoc_energy", c.thr_eoc_energy);
      c.thr_eoc_l2 = t.value("eoc_l2", c.thr_eoc_l2);
      c.thr_geometry_eoc = t.value("geometry_eoc", c.thr_geometry_eoc);
    }
    if (j.contains("probe_samples")) c.probe_samples = j["probe_samples"].get<int>();
    if (j.contains("probe_seed")) c.probe_seed = j["probe_seed"].get<unsigned>();
    if (j.contains("out")) c.out = j["out"].get<std::string>();
    if (j.contains("deterministic")) c.deterministic = j["deterministic"].get<bool>();
    if (j.contains("checkpoint")) c.checkpoint = j["checkpoint"].get<std::string>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config field error: ") + e.what());
  }

  if (c.mode != "run" && c.mode != "converge" && c.mode != "stability" && c.mode != "geometry")
    throw ConfigError("unknown mode '" + c.mode + "'");
  if (c.levels < 1) throw ConfigError("levels must be >= 1");
  if (!(c.dt_factor > 0.0)) throw ConfigError("dt_factor must be positive");
  if (!(c.h > 0.0)) throw ConfigError("h must be positive");
  if (!(c.T > 0.0)) throw ConfigError("T must be positive");
  if (c.quad_degree < 1 || c.quad_degree > 3) throw ConfigError("quad_degree must be 1..3");
  if (c.stab_nodes < 1 || c.stab_nodes > 3) throw ConfigError("stab_nodes must be 1..3");
  c.surface_params.T = c.T;
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

EvolvingSurface make_surface(const RunConfig& cfg) {
  try {
    return make_test_surface(cfg.surface, cfg.surface_params);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

ProblemSpec make_problem(const RunConfig& cfg) {
  EvolvingSurface surface = make_surface(cfg);
  ProblemSpec prob;
  if (cfg.solution == "harmonic") {
    prob = manufacture_problem(surface, cfg.harmonic_k, cfg.g, cfg.nu, 0.0);
  } else if (cfg.solution == "constant") {
    prob = make_constant_problem(surface, cfg.constant_a, cfg.constant_b, cfg.nu);
  } else if (cfg.solution == "zero") {
    prob = make_zero_problem(surface, cfg.nu, 0.0);
  } else {
    throw ConfigError("unknown solution type '" + cfg.solution + "'");
  }
  prob.sigma = cfg.sigma_auto ? prob.sigma_min() : cfg.sigma;
  return prob;
}

std::string describe(const RunConfig& cfg) {
  std::ostringstream os;
  os << "mode=" << cfg.mode << " surface=" << cfg.surface << " solution=" << cfg.solution
     << " k=" << cfg.harmonic_k << " nu=" << cfg.nu << " sigma="
     << (cfg.sigma_auto ? std::string("auto") : std::to_string(cfg.sigma)) << " T=" << cfg.T
     << " h=" << cfg.h << " levels=" << cfg.levels << " dt_factor=" << cfg.dt_factor
     << " quad_degree=" << cfg.quad_degree << " stab_nodes=" << cfg.stab_nodes
     << " solver_tol=" << cfg.solver_tol << " small_cut_threshold=" << cfg.small_cut_threshold;
  return os.str();
}

}  // namespace tracefem
