#pragma once

#include <string>
#include <vector>

#include "tracefem/march.hpp"

namespace tracefem {

/// Legacy ASCII VTK unstructured grid of the extracted space-time patches,
/// with mu, slab and owner as cell data.
void write_vtk_patches(const std::string& path, const std::vector<SurfacePatchSet>& sets);

/// MatrixMarket coordinate format (1-based, general real).
void write_matrix_market(const std::string& path, const SparseMat& A);

/// Checkpoint layout (text): one block per slab,
///   slab <n> ndof <m>
///   <dof> <vertex> <family> <value>   (m lines)
/// The DOF -> (vertex, family) table lets offline tools interpret the
/// coefficients; restore_march rebuilds the spaces deterministically and
/// verifies the table.
void write_checkpoint(const std::string& path, const MarchResult& result);

struct CheckpointSlab {
  int slab = 0;
  std::vector<int> vertex, family;
  Eigen::VectorXd values;
};

std::vector<CheckpointSlab> read_checkpoint(const std::string& path);

/// Rebuilds geometry and spaces for the recorded slabs and attaches the
/// stored coefficients; throws if the recorded DOF table does not match.
MarchResult restore_march(const DiscreteLevelSet& dls, const std::vector<CheckpointSlab>& slabs,
                          const MarchOptions& opts);

}  // namespace tracefem
