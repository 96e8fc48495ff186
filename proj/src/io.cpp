#include "tracefem/io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace tracefem {

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << std::setprecision(17);
  return out;
}

}  // namespace

void write_vtk_patches(const std::string& path, const std::vector<SurfacePatchSet>& sets) {
  std::ofstream out = open_out(path);
  size_t n_patches = 0;
  for (const auto& s : sets) n_patches += s.patches.size();

  out << "# vtk DataFile Version 3.0\n"
      << "space-time surface patches\n"
      << "ASCII\nDATASET UNSTRUCTURED_GRID\n"
      << "POINTS " << 3 * n_patches << " double\n";
  for (const auto& s : sets)
    for (const auto& p : s.patches)
      for (const auto& v : p.v) out << v.x() << " " << v.y() << " " << v.z() << "\n";

  out << "CELLS " << n_patches << " " << 4 * n_patches << "\n";
  for (size_t k = 0; k < n_patches; ++k)
    out << "3 " << 3 * k << " " << 3 * k + 1 << " " << 3 * k + 2 << "\n";
  out << "CELL_TYPES " << n_patches << "\n";
  for (size_t k = 0; k < n_patches; ++k) out << "5\n";

  out << "CELL_DATA " << n_patches << "\n";
  out << "SCALARS mu double 1\nLOOKUP_TABLE default\n";
  for (const auto& s : sets)
    for (const auto& p : s.patches) out << p.mu << "\n";
  out << "SCALARS slab int 1\nLOOKUP_TABLE default\n";
  for (const auto& s : sets)
    for (const auto& p : s.patches) {
      (void)p;
      out << s.slab << "\n";
    }
  out << "SCALARS owner int 1\nLOOKUP_TABLE default\n";
  for (const auto& s : sets)
    for (const auto& p : s.patches) out << p.owner << "\n";
}

void write_matrix_market(const std::string& path, const SparseMat& A) {
  std::ofstream out = open_out(path);
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << A.rows() << " " << A.cols() << " " << A.nonZeros() << "\n";
  for (int k = 0; k < A.outerSize(); ++k)
    for (SparseMat::InnerIterator it(A, k); it; ++it)
      out << it.row() + 1 << " " << it.col() + 1 << " " << it.value() << "\n";
}

void write_checkpoint(const std::string& path, const MarchResult& result) {
  std::ofstream out = open_out(path);
  for (const auto& s : result.slabs) {
    out << "slab " << s.space.slab << " ndof " << s.space.n_dof << "\n";
    for (int dof = 0; dof < s.space.n_dof; ++dof) {
      int vertex = s.space.active_vertices[dof / 2];
      out << dof << " " << vertex << " " << dof % 2 << " " << s.coeffs[dof] << "\n";
    }
  }
}

std::vector<CheckpointSlab> read_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open checkpoint '" + path + "'");
  std::vector<CheckpointSlab> slabs;
  std::string word;
  while (in >> word) {
    if (word != "slab") throw std::runtime_error("checkpoint: expected 'slab'");
    CheckpointSlab cs;
    int ndof = 0;
    in >> cs.slab >> word >> ndof;
    if (word != "ndof" || !in) throw std::runtime_error("checkpoint: malformed header");
    cs.vertex.resize(ndof);
    cs.family.resize(ndof);
    cs.values.resize(ndof);
    for (int k = 0; k < ndof; ++k) {
      int dof;
      in >> dof >> cs.vertex[k] >> cs.family[k] >> cs.values[k];
      if (!in || dof != k) throw std::runtime_error("checkpoint: malformed record");
    }
    slabs.push_back(std::move(cs));
  }
  return slabs;
}

MarchResult restore_march(const DiscreteLevelSet& dls, const std::vector<CheckpointSlab>& slabs,
                          const MarchOptions& opts) {
  MarchResult result;
  const BackgroundMesh& mesh = dls.outer_mesh;
  for (const auto& cs : slabs) {
    SurfacePatchSet patches = extract_patches(dls, cs.slab);
    ActiveSets active =
        mark_active(mesh, patches, opts.small_cut_threshold, mesh.h, dls.outer.dt);
    TraceSpaceSlab space = build_dofs(mesh, active, cs.slab);
    if (space.n_dof != cs.values.size())
      throw std::runtime_error("restore_march: DOF count mismatch on slab " +
                               std::to_string(cs.slab));
    for (int dof = 0; dof < space.n_dof; ++dof) {
      if (space.active_vertices[dof / 2] != cs.vertex[dof] || dof % 2 != cs.family[dof])
        throw std::runtime_error("restore_march: DOF table mismatch on slab " +
                                 std::to_string(cs.slab));
    }
    result.patches.push_back(std::move(patches));
    result.slabs.push_back({std::move(space), cs.values});
    result.dof_counts.push_back(cs.values.size());
    result.assemble_seconds.push_back(0.0);
    result.solve_seconds.push_back(0.0);
  }
  return result;
}

}  // namespace tracefem
