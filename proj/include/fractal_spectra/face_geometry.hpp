#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "fractal_spectra/btable.hpp"
#include "fractal_spectra/geometry.hpp"
#include "fractal_spectra/word.hpp"

namespace fractal_spectra {

// Which length is pinned to `target`:
//   chain    - the sum of boundary segments from face corner 0 to corner 1;
//   straight - the straight distance between those corners in the development.
enum class Normalization { chain, straight };

std::string to_string(Normalization n);
Normalization parse_normalization(std::string_view s);

struct NormalizationSpec {
  Normalization mode = Normalization::chain;
  double target = 1.0;
};

struct TriangleGeom {
  Word word;
  std::array<double, 3> angles{};
  std::array<double, 3> sides{};  // sides[i] opposite corner i
  double area = 0.0;
};

// The edge of upward triangle `upward` opposite its corner `edge`.
struct ChainSegment {
  std::size_t upward = 0;
  int edge = 0;
  double length = 0.0;
};

// A straight side of a flat triangle, lined with upward-triangle edges and
// running from polygon corner ends[0] to ends[1] (ends[0] < ends[1]).
struct Chain {
  std::array<int, 2> ends{};
  std::vector<ChainSegment> segments;
  std::vector<Lattice> points;  // segments.size() + 1 lattice points

  double length() const;
  // Arc-length positions of the interior points, normalized to (0, 1).
  std::vector<double> interior_params() const;
};

// Flat equilateral triangle D_u between the three children of cluster T_u.
struct DownwardTriangle {
  Word address;
  double side = 0.0;
  std::array<Lattice, 3> corners{};  // counterclockwise
  std::array<Chain, 3> chains{};     // chains[j] opposite corners[j]

  int generation() const { return address.length() + 1; }
  double area() const;
};

// Incidence of an upward-triangle edge with a downward triangle (downward >=
// 0) or with the face boundary (downward == -1, side = boundary side).
struct SharedEdge {
  std::size_t upward = 0;
  int edge = 0;
  long downward = -1;
  int side = 0;
  std::size_t position = 0;  // index of the segment within the chain
};

struct FaceNet {
  int level = 0;
  NormalizationSpec normalization;
  std::vector<TriangleGeom> upward;        // indexed by word index
  std::vector<DownwardTriangle> downward;  // by generation, then address
  std::array<Chain, 3> boundary{};         // boundary[j] opposite face corner j
  std::vector<SharedEdge> adjacency;

  std::size_t downward_index(const Word& address) const;
  double side_length() const { return boundary[2].length(); }
};

// Side lengths from the angles: each cluster is scaled so that its central
// downward triangle is equilateral, then the face is scaled to the target.
// Throws GeometryError if a downward triangle's chains disagree.
FaceNet solve_sidelengths(const AngleTable& angles, NormalizationSpec norm = {});
FaceNet build_face(int level, NormalizationSpec norm = {});

double face_area(const FaceNet& net);

// Straight distance between the endpoints of boundary side `side` after
// developing the boundary polyline into the plane.
double boundary_chord(const FaceNet& net, int side);

// Total within-face angle at every lattice vertex of the face.
std::map<Lattice, double> vertex_angle_totals(const FaceNet& net);

struct LayoutPiece {
  bool downward = false;
  std::size_t index = 0;  // word index or downward index
  std::vector<Lattice> keys;
  std::vector<Vec2> points;  // polygon, counterclockwise
};

// An edge whose two copies were placed apart in the development.
struct SlitPair {
  std::size_t upward = 0;
  int edge = 0;
  long downward = -1;
  std::array<Vec2, 2> upward_copy{};
  std::array<Vec2, 2> downward_copy{};
};

struct FaceLayout {
  std::vector<LayoutPiece> pieces;
  std::vector<SlitPair> slits;
};

FaceLayout layout_face(const FaceNet& net);

// Geometric angle totals measured on the placed pieces of a layout.
std::map<Lattice, double> layout_angle_totals(const FaceLayout& layout);

nlohmann::json to_json(const FaceNet& net);
void write_layout_svg(const FaceLayout& layout, std::ostream& os);
void write_layout_csv(const FaceLayout& layout, const FaceNet& net, std::ostream& os);

}  // namespace fractal_spectra
