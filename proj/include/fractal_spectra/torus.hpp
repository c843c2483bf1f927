#pragma once

#include "fractal_spectra/surface_mesh.hpp"

namespace fractal_spectra {

// Flat square torus of side L: an n x n grid of squares, each cut into four
// triangles by its diagonals (keeps the square's symmetry). Corner vertices
// have grid key (i, j, 0) and cell centres (i, j, 1). Requires n >= 3.
SurfaceMesh flat_torus(double side, int cells);

// Analytic spectrum 4 pi^2 (p^2 + q^2) / L^2 over all integer (p, q), the
// lowest `count` values with multiplicity, ascending.
std::vector<double> torus_eigenvalues(double side, std::size_t count);

}  // namespace fractal_spectra
