#include "micromorph/io.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace micromorph {

std::string format_double(double v) {
  if (v == 0.0) v = 0.0;  // normalize -0
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

std::ofstream open_or_throw(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file " + path);
  return out;
}

}  // namespace

void write_vtk_mesh(const std::string& path, const Mesh& mesh) {
  write_vtk_solution(path, mesh, nullptr, nullptr, nullptr, nullptr);
}

void write_vtk_solution(const std::string& path, const Mesh& mesh, const H1VectorSpace* vu,
                        const Eigen::VectorXd* u, const HcurlSpace* vp,
                        const std::array<Eigen::VectorXd, 3>* p_rows) {
  std::ofstream out = open_or_throw(path);
  out << "# vtk DataFile Version 3.0\n";
  out << "micromorph output\n";
  out << "ASCII\n";
  out << "DATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << mesh.n_vertices() << " double\n";
  for (const Vec3& v : mesh.vertices)
    out << format_double(v.x()) << " " << format_double(v.y()) << " " << format_double(v.z())
        << "\n";
  out << "CELLS " << mesh.n_cells() << " " << 5 * mesh.n_cells() << "\n";
  for (const auto& c : mesh.cells)
    out << "4 " << c[0] << " " << c[1] << " " << c[2] << " " << c[3] << "\n";
  out << "CELL_TYPES " << mesh.n_cells() << "\n";
  for (int c = 0; c < mesh.n_cells(); ++c) out << "10\n";

  if (vu && u) {
    out << "POINT_DATA " << mesh.n_vertices() << "\n";
    out << "VECTORS displacement double\n";
    for (int v = 0; v < mesh.n_vertices(); ++v) {
      // Vertex nodes come first in both degrees.
      out << format_double((*u)[vu->dof(v, 0)]) << " " << format_double((*u)[vu->dof(v, 1)])
          << " " << format_double((*u)[vu->dof(v, 2)]) << "\n";
    }
  }
  if (vp && p_rows) {
    out << "CELL_DATA " << mesh.n_cells() << "\n";
    out << "TENSORS micro_distortion double\n";
    const Vec3 centroid(0.25, 0.25, 0.25);
    for (int c = 0; c < mesh.n_cells(); ++c) {
      Mat3 p;
      for (int row = 0; row < 3; ++row)
        p.row(row) = evaluate_hcurl(*vp, (*p_rows)[row], c, centroid).transpose();
      for (int row = 0; row < 3; ++row)
        out << format_double(p(row, 0)) << " " << format_double(p(row, 1)) << " "
            << format_double(p(row, 2)) << "\n";
      out << "\n";
    }
  }
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
  std::ofstream out = open_or_throw(path);
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << "\n";
  }
}

void write_key_value(const std::string& path,
                     const std::vector<std::pair<std::string, std::string>>& entries) {
  std::ofstream out = open_or_throw(path);
  for (const auto& [key, value] : entries) out << key << " = " << value << "\n";
}

void write_matrix_market(const std::string& path, const SparseMatrix& m) {
  std::ofstream out = open_or_throw(path);
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << m.rows() << " " << m.cols() << " " << m.nnz() << "\n";
  for (int r = 0; r < m.rows(); ++r)
    for (int k = m.row_offsets()[r]; k < m.row_offsets()[r + 1]; ++k)
      out << r + 1 << " " << m.col_indices()[k] + 1 << " " << format_double(m.values()[k])
          << "\n";
}

}  // namespace micromorph
