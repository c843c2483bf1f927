#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "fractal_spectra/geometry.hpp"
#include "fractal_spectra/word.hpp"

namespace fractal_spectra {

struct QualityOptions {
  double min_angle_deg = 20.0;
  std::size_t max_points = 200000;
};

struct PlanarMesh {
  std::vector<Vec2> points;
  std::vector<std::array<int, 3>> triangles;  // counterclockwise
  // For points created by splitting a boundary segment: the two endpoints of
  // the split segment. {-1, -1} for input points and interior points.
  std::vector<std::array<int, 2>> split_parents;
  std::vector<double> split_t;  // position of the split along its segment
};

// Quality Delaunay refinement of a convex polygon given counterclockwise
// (collinear points allowed). Segment i runs from boundary[i] to
// boundary[i + 1]; only segments with splittable[i] != 0 may receive new
// points. Input points keep their indices.
PlanarMesh refine_convex_polygon(std::span<const Vec2> boundary,
                                 std::span<const char> splittable,
                                 const QualityOptions& opt = {});

double min_angle_deg(const PlanarMesh& mesh);

using Bary = std::array<double, 3>;

// Triangulation of an equilateral polygon with corners c0, c1, c2
// (counterclockwise) whose sides carry fixed points. Vertex ids: 0..2 are
// the corners, then the interior points of side 0, side 1, side 2 (each
// ordered from its lower-index corner), then Steiner points.
struct EquilateralTriangulation {
  std::array<std::size_t, 3> side_points{};
  std::vector<Bary> steiner;  // exact barycentric coordinates
  std::vector<std::array<std::uint32_t, 3>> triangles;

  std::size_t vertex_count() const {
    return 3 + side_points[0] + side_points[1] + side_points[2] + steiner.size();
  }
};

// Symmetry the triangulation must respect exactly.
enum class PolygonSymmetry {
  none,
  mirror0,  // reflection swapping corners 1 and 2
  full,     // all six corner permutations
};

// side_params[j]: interior positions on side j in (0, 1), measured from
// the side's lower-index corner. They must respect the requested symmetry.
EquilateralTriangulation triangulate_equilateral(
    const std::array<std::vector<double>, 3>& side_params, PolygonSymmetry sym,
    const QualityOptions& opt = {});

// The same triangulation with corner labels relabelled by p.
EquilateralTriangulation permuted(const EquilateralTriangulation& t, const Perm3& p);

// Positions in a polygon of corners c with the given side parameters.
std::vector<Vec2> equilateral_positions(const EquilateralTriangulation& t,
                                        const std::array<Vec2, 3>& corners,
                                        const std::array<std::vector<double>, 3>& side_params);

}  // namespace fractal_spectra
