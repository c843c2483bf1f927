#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "fractal_spectra/surface_mesh.hpp"
#include "fractal_spectra/word.hpp"

namespace fractal_spectra {

// Octahedral symmetry g(e_j) = sign[j] e_{perm[j]} with an even number of
// sign flips; these 24 maps preserve the fractal faces as a set.
struct SignedPermutation {
  Perm3 perm = kIdentity3;
  std::array<int, 3> sign{1, 1, 1};

  Lattice apply(const Lattice& x) const;
  int apply_face(int face) const;
  int order() const;
  int determinant() const;
  auto operator<=>(const SignedPermutation&) const = default;
};

SignedPermutation compose(const SignedPermutation& outer, const SignedPermutation& inner);

// Conjugacy classes of the group, in character-table column order.
enum class SymmetryClass : std::uint8_t {
  identity,
  reflection,      // 6 mirror planes (transpositions)
  half_turn,       // 3 rotations by pi about coordinate axes
  third_turn,      // 8 rotations by 2 pi / 3
  rotoreflection,  // 6 improper quarter turns (4-cycles)
};
inline constexpr int kClassCount = 5;
inline constexpr std::array<int, kClassCount> kClassSizes = {1, 6, 3, 8, 6};

SymmetryClass classify(const SignedPermutation& g);

struct Irrep {
  const char* name;
  int degree;
  std::array<int, kClassCount> character;
};
inline constexpr std::array<Irrep, 5> kCharacterTable = {{
    {"A1", 1, {1, 1, 1, 1, 1}},
    {"A2", 1, {1, -1, 1, 1, -1}},
    {"E", 2, {2, 0, 2, -1, 0}},
    {"T2", 3, {3, 1, -1, 0, -1}},
    {"T1", 3, {3, -1, -1, 0, 1}},
}};

// Generators: a is the mirror x0 <-> -x1 (fixing the e2 axis), b cycles
// the axes e0 -> e1 -> e2. They satisfy a^2 = b^3 = (ab)^4 = 1.
SignedPermutation generator_a();
SignedPermutation generator_b();

struct SymmetryAction {
  std::vector<SignedPermutation> elements;            // elements[0]: identity
  std::vector<std::vector<std::uint32_t>> vertex_map;  // image of each vertex
  std::vector<SymmetryClass> classes;
  std::size_t a = 0, b = 0;  // indices of the generators

  std::size_t order() const { return elements.size(); }
};

// Realizes the group on the mesh through construction labels. Works at any
// subdivision depth (midpoints follow their parents). Throws GluingError if
// a label has no image, the relations fail, or an element is not an
// isometry of the triangulation (1e-10).
SymmetryAction build_symmetry_action(const SurfaceMesh& mesh);

// Largest edge-length mismatch of element g over all triangles; infinity if
// some triangle is not mapped onto a triangle.
double isometry_defect(const SurfaceMesh& mesh, const std::vector<std::uint32_t>& map);

bool relations_hold(const SymmetryAction& action);

}  // namespace fractal_spectra
