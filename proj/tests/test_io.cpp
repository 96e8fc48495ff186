#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "tracefem/io.hpp"
#include "tracefem/runner.hpp"

using namespace tracefem;

TEST_SUITE_BEGIN("io");

namespace {

RunConfig small_config() {
  RunConfig cfg;
  cfg.surface = "shrinking";
  cfg.surface_params.rate = -0.25;
  cfg.solution = "harmonic";
  cfg.sigma = 0.2;
  cfg.h = 0.25;
  cfg.levels = 1;
  return cfg;
}

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& name) : path("/tmp/tracefem_test_" + name) {}
  ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("checkpoint writes, reads back and restores bit-identical coefficients") {
  RunConfig cfg = small_config();
  Experiment ex = run_single_level(cfg, 0);

  TempFile file("checkpoint.txt");
  write_checkpoint(file.path, ex.march);
  auto slabs = read_checkpoint(file.path);
  REQUIRE(slabs.size() == ex.march.slabs.size());

  MarchResult restored = restore_march(ex.dls, slabs, {});
  for (size_t i = 0; i < restored.slabs.size(); ++i) {
    CHECK(restored.slabs[i].space.n_dof == ex.march.slabs[i].space.n_dof);
    CHECK((restored.slabs[i].coeffs - ex.march.slabs[i].coeffs).lpNorm<Eigen::Infinity>() == 0.0);
  }
}

TEST_CASE("a march resumed from a checkpoint matches the uninterrupted one") {
  RunConfig cfg = small_config();
  Experiment full = run_single_level(cfg, 0);
  const int N = full.partition.n_slabs;
  REQUIRE(N >= 3);

  // keep the first two slabs, recompute the rest
  MarchResult head = full.march;
  head.slabs.resize(2);
  head.patches.resize(2);
  TempFile file("resume.txt");
  write_checkpoint(file.path, head);

  MarchResult restored = restore_march(full.dls, read_checkpoint(file.path), {});
  MarchResult resumed = resume_march(full.dls, full.problem, {}, std::move(restored), 3);
  REQUIRE(resumed.slabs.size() == static_cast<size_t>(N));
  for (int n = 0; n < N; ++n)
    CHECK((resumed.slabs[n].coeffs - full.march.slabs[n].coeffs).lpNorm<Eigen::Infinity>() ==
          0.0);
}

TEST_CASE("restore rejects a checkpoint from a different discretization") {
  RunConfig cfg = small_config();
  Experiment ex = run_single_level(cfg, 0);
  TempFile file("mismatch.txt");
  write_checkpoint(file.path, ex.march);

  RunConfig finer = cfg;
  finer.h = 0.125;
  Experiment other = run_single_level(finer, 0);
  CHECK_THROWS_AS(restore_march(other.dls, read_checkpoint(file.path), {}),
                  std::runtime_error);
}

TEST_CASE("MatrixMarket dump round-trips through a text parse") {
  RunConfig cfg = small_config();
  Experiment ex = run_single_level(cfg, 0, /*keep_systems=*/true);
  const SparseMat& A = ex.march.systems.front().A;

  TempFile file("matrix.mtx");
  write_matrix_market(file.path, A);

  std::ifstream in(file.path);
  std::string header;
  std::getline(in, header);
  CHECK(header == "%%MatrixMarket matrix coordinate real general");
  int rows, cols;
  long nnz;
  in >> rows >> cols >> nnz;
  CHECK(rows == A.rows());
  CHECK(cols == A.cols());
  CHECK(nnz == A.nonZeros());
  double checksum = 0.0, expected = 0.0;
  for (long k = 0; k < nnz; ++k) {
    int i, j;
    double v;
    in >> i >> j >> v;
    REQUIRE(in.good());
    checksum += v * (i + 2 * j);
  }
  for (int k = 0; k < A.outerSize(); ++k)
    for (SparseMat::InnerIterator it(A, k); it; ++it)
      expected += it.value() * (it.row() + 1 + 2 * (it.col() + 1));
  CHECK(checksum == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("VTK surface dump has consistent counts") {
  RunConfig cfg = small_config();
  Experiment ex = run_single_level(cfg, 0);
  size_t n_patches = 0;
  for (const auto& s : ex.march.patches) n_patches += s.patches.size();

  TempFile file("surface.vtk");
  write_vtk_patches(file.path, ex.march.patches);

  std::ifstream in(file.path);
  std::string line;
  size_t points = 0, cells = 0;
  while (std::getline(in, line)) {
    std::istringstream ss(line);
    std::string word;
    ss >> word;
    if (word == "POINTS") ss >> points;
    if (word == "CELLS") ss >> cells;
  }
  CHECK(points == 3 * n_patches);
  CHECK(cells == n_patches);
}

TEST_CASE("config parsing, sigma auto and failure modes") {
  RunConfig cfg = parse_config(R"({
    "mode": "converge",
    "surface": {"name": "shrinking", "rate": -0.25},
    "solution": {"type": "harmonic", "k": 1, "g": {"a": 1, "c": 0.5, "omega": 2}},
    "nu": 1.0, "sigma": "auto", "h": 0.4, "levels": 4, "T": 1.0
  })");
  CHECK(cfg.sigma_auto);
  CHECK(cfg.surface == "shrinking");
  CHECK(cfg.level_h(2) == doctest::Approx(0.1));
  CHECK(cfg.level_slabs(2) == 10);
  ProblemSpec prob = make_problem(cfg);
  CHECK(prob.sigma == doctest::Approx(1.0 / (4 * M_PI * std::pow(0.75, 3))).epsilon(1e-6));

  CHECK_THROWS_AS(parse_config("{not json"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"mode": "explode"})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"sigma": "automagic"})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"levels": 0})"), ConfigError);

  RunConfig bad = cfg;
  bad.surface = "hexagon";
  CHECK_THROWS_AS(make_problem(bad), ConfigError);
}

TEST_CASE("deterministic mode produces identical output text") {
  RunConfig cfg = small_config();
  cfg.surface = "stationary";
  cfg.surface_params.rate = 0.0;
  cfg.levels = 2;
  cfg.h = 0.4;
  cfg.deterministic = true;
  ConvergenceStudy a = run_convergence(cfg);
  ConvergenceStudy b = run_convergence(cfg);
  CHECK(convergence_csv(cfg, a.table) == convergence_csv(cfg, b.table));

  GeometryStudy ga = run_geometry(cfg);
  GeometryStudy gb = run_geometry(cfg);
  CHECK(geometry_csv(cfg, ga) == geometry_csv(cfg, gb));
}

TEST_SUITE_END();
