#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fractal_spectra/face_geometry.hpp"
#include "fractal_spectra/geometry.hpp"
#include "fractal_spectra/planar_mesh.hpp"

namespace fractal_spectra {

enum class VertexRole : std::uint8_t { cone, steiner, subdivision };

std::string to_string(VertexRole r);
VertexRole parse_vertex_role(const std::string& s);

// Construction label of a vertex. Lattice points of all faces share the
// global signed lattice, so identical labels are the same physical point.
struct VertexKey {
  enum class Kind : std::uint8_t { lattice, steiner, midpoint, grid };
  Kind kind = Kind::lattice;
  Lattice lattice{};        // lattice / grid: coordinates
  int face = -1;            // steiner: octant of the face
  int word_length = -1;     // steiner: -1 on a flat face, else |u| of D_u
  std::size_t word_index = 0;
  Bary beta{};              // steiner: barycentric in the polygon
  std::array<std::uint32_t, 2> parents{};  // midpoint: parent edge (sorted)

  auto operator<=>(const VertexKey&) const = default;
};

struct MeshTriangle {
  std::array<std::uint32_t, 3> v{};
  std::array<double, 3> len{};  // len[i] is the edge opposite v[i]
};

// Closed surface given only by intrinsic edge lengths.
struct SurfaceMesh {
  int level = 0;
  int depth = 0;
  NormalizationSpec normalization;
  std::vector<VertexRole> roles;
  std::vector<VertexKey> keys;
  std::vector<MeshTriangle> triangles;
  std::vector<std::int8_t> face;         // octant per triangle, -1 if none
  std::vector<std::array<Vec2, 3>> net;  // unfolded-net corner positions

  std::size_t vertex_count() const { return roles.size(); }
};

struct Edge {
  std::uint32_t a = 0, b = 0;  // a < b
  double length = 0.0;
  std::array<std::uint32_t, 2> triangles{};
};

// Every edge with its two incident triangles. Throws GluingError for open or
// non-manifold edges and for copies whose lengths differ beyond 1e-10.
std::vector<Edge> mesh_edges(const SurfaceMesh& mesh);

double triangle_area(const MeshTriangle& t);
double total_area(const SurfaceMesh& mesh);

// Interior angle at corner i of the triangle.
double corner_angle(const MeshTriangle& t, int i);

// Angle deficit 2 pi - (sum of incident angles) per vertex.
std::vector<double> curvature_audit(const SurfaceMesh& mesh);

struct AuditExpectations {
  long euler = 2;
  // Negative: skip the cone checks.
  double cone_deficit = -1.0;
  std::size_t cone_count = 0;
  double tol = 1e-9;
};

AuditExpectations octahedral_expectations(int level);

struct MeshAudit {
  std::size_t vertices = 0, edges = 0, triangles = 0;
  long euler = 0;
  std::size_t cone_vertices = 0;
  double max_cone_error = 0.0;  // |deficit - expected| over cone vertices
  double max_flat_deficit = 0.0;
  double total_deficit = 0.0;
  double min_angle = 0.0;
  std::vector<std::string> failures;

  bool passed() const { return failures.empty(); }
};

MeshAudit audit_mesh(const SurfaceMesh& mesh, const AuditExpectations& expect);

// Exact 4-to-1 midpoint refinement; old vertex ids are kept and each edge
// midpoint is appended with a midpoint key.
SurfaceMesh subdivide(const SurfaceMesh& mesh);
SurfaceMesh subdivide(SurfaceMesh mesh, int times);

SurfaceMesh scaled(SurfaceMesh mesh, double s);
// new id of old vertex v is perm[v].
SurfaceMesh relabeled(const SurfaceMesh& mesh, const std::vector<std::uint32_t>& perm);

nlohmann::json to_json(const SurfaceMesh& mesh);
SurfaceMesh surface_mesh_from_json(const nlohmann::json& j);

// Unfolded net with gray triangles, colored cone vertices, and dashed lines
// joining copies of the same vertex.
void write_net_svg(const SurfaceMesh& mesh, std::ostream& os);

}  // namespace fractal_spectra
