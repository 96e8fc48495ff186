#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "tracefem/io.hpp"
#include "tracefem/runner.hpp"

namespace fs = std::filesystem;
using namespace tracefem;

namespace {

constexpr int kExitVerdictFail = 1;
constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

fs::path prepare_out(const RunConfig& cfg) {
  fs::path dir = cfg.out.empty() ? fs::path(".") : fs::path(cfg.out);
  fs::create_directories(dir);
  return dir;
}

int cmd_run(const RunConfig& cfg) {
  Experiment ex = run_single_level(cfg, 0, cfg.dump_matrix);
  EocTable table;
  table.rows.push_back(ex.row);
  std::string csv = convergence_csv(cfg, table);
  std::cout << csv;

  fs::path dir = prepare_out(cfg);
  write_file(dir / "run.csv", csv);
  if (cfg.dump_vtk) write_vtk_patches((dir / "surface.vtk").string(), ex.march.patches);
  if (cfg.dump_matrix && !ex.march.systems.empty())
    write_matrix_market((dir / "slab1.mtx").string(), ex.march.systems.front().A);
  return 0;
}

int cmd_converge(const RunConfig& cfg) {
  ConvergenceStudy study = run_convergence(cfg);
  std::string csv = convergence_csv(cfg, study.table);
  std::cout << csv << study.summary << "\n";
  fs::path dir = prepare_out(cfg);
  write_file(dir / "converge.csv", csv);
  write_file(dir / "verdict.txt", study.summary + "\n");
  return (!study.has_verdict || study.pass) ? 0 : kExitVerdictFail;
}

int cmd_stability(const RunConfig& cfg) {
  StabilityStudy study = run_stability(cfg);
  std::string text = stability_text(cfg, study);
  std::cout << text;
  fs::path dir = prepare_out(cfg);
  write_file(dir / "stability.csv", text);
  return study.pass ? 0 : kExitVerdictFail;
}

int cmd_geometry(const RunConfig& cfg) {
  GeometryStudy study = run_geometry(cfg);
  std::string csv = geometry_csv(cfg, study);
  std::cout << csv << study.summary << "\n";
  fs::path dir = prepare_out(cfg);
  write_file(dir / "geometry.csv", csv);
  return (cfg.levels < 2 || study.pass) ? 0 : kExitVerdictFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"space-time trace FEM for PDEs on evolving closed curves"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand

  std::string config_path, out_dir, sigma_arg;
  int levels = -1;
  bool deterministic = false, dump_vtk = false, dump_matrix = false;

  app.add_option("--config", config_path, "JSON config file")->required();
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--levels", levels, "override refinement level count");
  app.add_option("--sigma", sigma_arg, "override stabilization (number or 'auto')");
  app.add_flag("--deterministic", deterministic,
               "normalize timing fields for reproducible output");
  app.add_flag("--dump-vtk", dump_vtk, "write the extracted surface (run mode)");
  app.add_flag("--dump-matrix", dump_matrix, "write slab 1 in MatrixMarket form (run mode)");

  auto* sub_run = app.add_subcommand("run", "single run at the base resolution");
  auto* sub_conv = app.add_subcommand("converge", "refinement study with EOC verdicts");
  auto* sub_stab = app.add_subcommand("stability", "ellipticity probe over sigma values");
  auto* sub_geom = app.add_subcommand("geometry", "surface-measure convergence check");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    RunConfig cfg = load_config(config_path);
    if (!out_dir.empty()) cfg.out = out_dir;
    if (levels > 0) cfg.levels = levels;
    if (!sigma_arg.empty()) {
      if (sigma_arg == "auto") {
        cfg.sigma_auto = true;
      } else {
        cfg.sigma_auto = false;
        cfg.sigma = std::stod(sigma_arg);
      }
    }
    cfg.deterministic |= deterministic;
    cfg.dump_vtk |= dump_vtk;
    cfg.dump_matrix |= dump_matrix;

    // the subcommand decides the mode; the config field is the default
    if (sub_run->parsed()) cfg.mode = "run";
    if (sub_conv->parsed()) cfg.mode = "converge";
    if (sub_stab->parsed()) cfg.mode = "stability";
    if (sub_geom->parsed()) cfg.mode = "geometry";

    if (cfg.mode == "run") return cmd_run(cfg);
    if (cfg.mode == "converge") return cmd_converge(cfg);
    if (cfg.mode == "stability") return cmd_stability(cfg);
    if (cfg.mode == "geometry") return cmd_geometry(cfg);
    return kExitConfig;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const SolverFailure& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return kExitSolver;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSolver;
  }
}
