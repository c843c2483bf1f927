#pragma once

#include <array>

#include "fractal_spectra/face_geometry.hpp"
#include "fractal_spectra/planar_mesh.hpp"
#include "fractal_spectra/surface_mesh.hpp"

namespace fractal_spectra {

// Octants of the octahedron are indexed by sign bits:
// face = (s0 < 0) + 2 (s1 < 0) + 4 (s2 < 0). Faces with s0 s1 s2 = +1 carry
// the fractal geometry; the other four are flat equilateral triangles.
std::array<int, 3> octant_signs(int face);
bool is_fractal_face(int face);

struct AssemblyOptions {
  int level = 0;
  int depth = 0;
  NormalizationSpec normalization;
  QualityOptions quality;
};

// Glues four fractal faces and four flat faces along the shared lattice,
// triangulates flat faces and downward triangles with exact symmetry, and
// subdivides `depth` times. Throws GluingError on any mismatch.
SurfaceMesh assemble(const AssemblyOptions& opt);
SurfaceMesh assemble(int level, int depth = 0, NormalizationSpec norm = {});

}  // namespace fractal_spectra
