#pragma once

#include <string>
#include <utility>
#include <vector>

#include "micromorph/mesh.hpp"
#include "micromorph/sparse.hpp"
#include "micromorph/spaces.hpp"

namespace micromorph {

/// Shortest round-trip decimal representation; used for every emitted number
/// so that identical runs produce byte-identical text files.
std::string format_double(double v);

/// Legacy VTK ASCII (DataFile version 3.0, UNSTRUCTURED_GRID, cell type 10).
void write_vtk_mesh(const std::string& path, const Mesh& mesh);

/// Mesh plus point-data displacement vectors and cell-data micro-distortion
/// tensors (evaluated at cell centroids). Either field may be omitted.
void write_vtk_solution(const std::string& path, const Mesh& mesh, const H1VectorSpace* vu,
                        const Eigen::VectorXd* u, const HcurlSpace* vp,
                        const std::array<Eigen::VectorXd, 3>* p_rows);

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

/// Key-value report, one `name = value` per line, order preserved.
void write_key_value(const std::string& path,
                     const std::vector<std::pair<std::string, std::string>>& entries);

/// Matrix Market coordinate format (general symmetry tag).
void write_matrix_market(const std::string& path, const SparseMatrix& m);

}  // namespace micromorph
