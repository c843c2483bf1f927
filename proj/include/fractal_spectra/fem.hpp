#pragma once

#include <ostream>
#include <string>

#include <Eigen/SparseCore>

#include "fractal_spectra/surface_mesh.hpp"

namespace fractal_spectra {

enum class MassKind { consistent, lumped };

std::string to_string(MassKind k);
MassKind parse_mass_kind(const std::string& s);

using SparseMatrix = Eigen::SparseMatrix<double>;

// P1 Gram (mass) and energy (stiffness) matrices.
struct OperatorPair {
  std::size_t n = 0;
  SparseMatrix mass;
  SparseMatrix stiffness;
  MassKind mass_kind = MassKind::consistent;
};

// Per-element matrices from the three edge lengths alone. Throws
// DegenerateElement when an angle is below min_angle (radians).
OperatorPair assemble_matrices(const SurfaceMesh& mesh, MassKind kind = MassKind::consistent,
                               double min_angle = 1e-6);

// Coordinate listing "row col value" (1-based, 17 digits) under a
// MatrixMarket header.
void write_matrix_market(const SparseMatrix& a, std::ostream& os);

}  // namespace fractal_spectra
