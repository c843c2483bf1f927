#include "fractal_spectra/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <optional>

#include "fractal_spectra/error.hpp"

namespace fractal_spectra {

std::array<int, 3> octant_signs(int face) {
  return {face & 1 ? -1 : 1, face & 2 ? -1 : 1, face & 4 ? -1 : 1};
}

bool is_fractal_face(int face) {
  const auto s = octant_signs(face);
  return s[0] * s[1] * s[2] == 1;
}

namespace {

const double kSqrt3 = std::sqrt(3.0);

std::array<Vec2, 3> unit_frame(double side) {
  return {Vec2{0, 0}, Vec2{side, 0}, Vec2{side / 2, side * kSqrt3 / 2}};
}

// Schematic slot of each octant in the flower-shaped net: the faces with
// s2 > 0 fan around +e2, the others fold out across the equator.
std::array<Vec2, 3> net_slot(int face) {
  const auto s = octant_signs(face);
  auto at = [](double deg) {
    const double r = deg * std::numbers::pi / 180;
    return Vec2{std::cos(r), std::sin(r)};
  };
  // Upper fan angles of corner 0 and corner 1 for each (s0, s1).
  double a0 = 0, a1 = 0;
  if (s[0] > 0 && s[1] > 0) a0 = 0, a1 = 60;
  if (s[0] < 0 && s[1] > 0) a0 = 120, a1 = 60;
  if (s[0] < 0 && s[1] < 0) a0 = 120, a1 = 180;
  if (s[0] > 0 && s[1] < 0) a0 = 240, a1 = 180;
  const Vec2 p0 = at(a0), p1 = at(a1);
  Vec2 p2{0, 0};
  if (s[2] < 0) p2 = p0 + p1;  // reflection of the centre across p0 p1
  return {p0, p1, p2};
}

Vec2 bary_point(const std::array<Vec2, 3>& c, double b0, double b1, double b2) {
  return b0 * c[0] + b1 * c[1] + b2 * c[2];
}

class Builder {
 public:
  explicit Builder(int level) { mesh_.level = level; }

  std::uint32_t vertex(const VertexKey& key, VertexRole role) {
    const auto [it, fresh] = ids_.emplace(key, static_cast<std::uint32_t>(mesh_.roles.size()));
    if (fresh) {
      mesh_.keys.push_back(key);
      mesh_.roles.push_back(role);
    }
    return it->second;
  }

  void triangle(std::array<std::uint32_t, 3> v, std::array<double, 3> len,
                std::array<Vec2, 3> net, int face) {
    if (!is_fractal_face(face)) {
      // The corner order of these octants is clockwise seen from outside.
      std::swap(v[1], v[2]);
      std::swap(len[1], len[2]);
      std::swap(net[1], net[2]);
    }
    mesh_.triangles.push_back({v, len});
    mesh_.net.push_back(net);
    mesh_.face.push_back(static_cast<std::int8_t>(face));
  }

  SurfaceMesh take() { return std::move(mesh_); }

 private:
  SurfaceMesh mesh_;
  std::map<VertexKey, std::uint32_t> ids_;
};

VertexKey lattice_key(int face, const Lattice& a) {
  const auto s = octant_signs(face);
  VertexKey k;
  k.kind = VertexKey::Kind::lattice;
  for (int j = 0; j < 3; ++j) k.lattice[j] = s[j] * a[j];
  return k;
}

struct OrbitRep {
  Word rep;
  Perm3 to_word{};  // rep.permuted(to_word) == the word
};

OrbitRep orbit_rep(const Word& u) {
  OrbitRep best{u, kIdentity3};
  for (const Perm3& p : all_perm3()) {
    const Word w = u.permuted(p);
    if (w < best.rep) best = {w, inverse(p)};
  }
  return best;
}

PolygonSymmetry stabilizer(const Word& rep) {
  if (rep.length() == 0) return PolygonSymmetry::full;
  if (rep.uses_only(0, 0)) return PolygonSymmetry::mirror0;
  return PolygonSymmetry::none;
}

// Adds one triangulated equilateral polygon. lattice_at(j, i) gives the key
// of interior point i on side j (nullopt for corners handled by corner_key).
template <class SideKey>
void emit_polygon(Builder& b, const EquilateralTriangulation& tri,
                  const std::array<std::vector<double>, 3>& params, double side,
                  const std::array<VertexKey, 3>& corner_keys, SideKey side_key,
                  VertexKey steiner_base, const std::array<Vec2, 3>& net_corners, int face) {
  const std::vector<Vec2> pos = equilateral_positions(tri, unit_frame(side), params);
  std::vector<std::uint32_t> id(tri.vertex_count());
  std::vector<Vec2> net(tri.vertex_count());
  const std::vector<Vec2> unit = equilateral_positions(tri, {Vec2{1, 0}, Vec2{0, 1}, Vec2{0, 0}}, params);
  for (int j = 0; j < 3; ++j) id[j] = b.vertex(corner_keys[j], VertexRole::cone);
  std::size_t next = 3;
  for (int j = 0; j < 3; ++j)
    for (std::size_t i = 0; i < tri.side_points[j]; ++i, ++next)
      id[next] = b.vertex(side_key(j, i), VertexRole::cone);
  for (const Bary& beta : tri.steiner) {
    VertexKey k = steiner_base;
    k.beta = beta;
    id[next++] = b.vertex(k, VertexRole::steiner);
  }
  for (std::size_t v = 0; v < id.size(); ++v) {
    const double b0 = unit[v].x, b1 = unit[v].y;
    net[v] = bary_point(net_corners, b0, b1, 1 - b0 - b1);
  }
  for (const auto& t : tri.triangles) {
    std::array<double, 3> len{};
    for (int i = 0; i < 3; ++i) len[i] = norm(pos[t[(i + 1) % 3]] - pos[t[(i + 2) % 3]]);
    b.triangle({id[t[0]], id[t[1]], id[t[2]]}, len, {net[t[0]], net[t[1]], net[t[2]]}, face);
  }
}

Vec2 lattice_net(const std::array<Vec2, 3>& slot, const Lattice& a, int level) {
  const double n = static_cast<double>(1 << level);
  return bary_point(slot, a[0] / n, a[1] / n, a[2] / n);
}

}  // namespace

SurfaceMesh assemble(const AssemblyOptions& opt) {
  const int m = opt.level;
  if (m < 0) throw std::invalid_argument("level must be nonnegative");
  const FaceNet net = build_face(m, opt.normalization);
  const double flat_side = net.side_length();
  Builder b(m);

  // Downward-triangle triangulations, one per orbit of S3 on addresses.
  std::map<Word, EquilateralTriangulation> rep_tri;
  std::vector<EquilateralTriangulation> down_tri;
  std::vector<std::array<std::vector<double>, 3>> down_params;
  for (const DownwardTriangle& d : net.downward) {
    std::array<std::vector<double>, 3> params;
    for (int j = 0; j < 3; ++j) {
      const Chain& ch = d.chains[j];
      if (ch.points.front() != d.corners[ch.ends[0]] || ch.points.back() != d.corners[ch.ends[1]])
        throw GluingError("chain of D_" + d.address.to_string() + " is not oriented");
      params[j] = ch.interior_params();
    }
    const OrbitRep o = orbit_rep(d.address);
    auto it = rep_tri.find(o.rep);
    if (it == rep_tri.end()) {
      const DownwardTriangle& r = net.downward[net.downward_index(o.rep)];
      std::array<std::vector<double>, 3> rp;
      for (int j = 0; j < 3; ++j) rp[j] = r.chains[j].interior_params();
      it = rep_tri.emplace(o.rep, triangulate_equilateral(rp, stabilizer(o.rep), opt.quality)).first;
    }
    down_tri.push_back(permuted(it->second, o.to_word));
    down_params.push_back(std::move(params));
    for (int j = 0; j < 3; ++j)
      if (down_tri.back().side_points[j] != down_params.back()[j].size())
        throw GluingError("transported triangulation of D_" + d.address.to_string() +
                          " has the wrong side points");
  }

  std::array<std::vector<double>, 3> flat_params;
  for (int j = 0; j < 3; ++j) flat_params[j] = net.boundary[j].interior_params();
  const EquilateralTriangulation flat_tri =
      triangulate_equilateral(flat_params, PolygonSymmetry::full, opt.quality);

  const int n = 1 << m;
  for (int face = 0; face < 8; ++face) {
    const auto slot = net_slot(face);
    std::array<VertexKey, 3> corner_keys;
    if (!is_fractal_face(face)) {
      for (int j = 0; j < 3; ++j) {
        Lattice a{0, 0, 0};
        a[j] = n;
        corner_keys[j] = lattice_key(face, a);
      }
      auto side_key = [&](int j, std::size_t i) {
        const int k = j == 0 ? 1 : 0, l = j == 2 ? 1 : 2;
        Lattice a{0, 0, 0};
        a[l] = static_cast<int>(i) + 1;
        a[k] = n - static_cast<int>(i) - 1;
        return lattice_key(face, a);
      };
      VertexKey base;
      base.kind = VertexKey::Kind::steiner;
      base.face = face;
      base.word_length = -1;
      emit_polygon(b, flat_tri, flat_params, flat_side, corner_keys, side_key, base, slot, face);
      continue;
    }
    for (const TriangleGeom& t : net.upward) {
      std::array<std::uint32_t, 3> v{};
      std::array<Vec2, 3> p{};
      for (int j = 0; j < 3; ++j) {
        const Lattice a = corner_lattice(t.word, j, m);
        v[j] = b.vertex(lattice_key(face, a), VertexRole::cone);
        p[j] = lattice_net(slot, a, m);
      }
      b.triangle(v, t.sides, p, face);
    }
    for (std::size_t di = 0; di < net.downward.size(); ++di) {
      const DownwardTriangle& d = net.downward[di];
      for (int j = 0; j < 3; ++j) corner_keys[j] = lattice_key(face, d.corners[j]);
      auto side_key = [&](int j, std::size_t i) { return lattice_key(face, d.chains[j].points[i + 1]); };
      VertexKey base;
      base.kind = VertexKey::Kind::steiner;
      base.face = face;
      base.word_length = d.address.length();
      base.word_index = d.address.index();
      std::array<Vec2, 3> dn{};
      for (int j = 0; j < 3; ++j) dn[j] = lattice_net(slot, d.corners[j], m);
      emit_polygon(b, down_tri[di], down_params[di], d.side, corner_keys, side_key, base, dn, face);
    }
  }

  SurfaceMesh mesh = b.take();
  mesh.normalization = opt.normalization;
  mesh_edges(mesh);  // gluing check
  return subdivide(std::move(mesh), opt.depth);
}

SurfaceMesh assemble(int level, int depth, NormalizationSpec norm) {
  AssemblyOptions opt;
  opt.level = level;
  opt.depth = depth;
  opt.normalization = norm;
  return assemble(opt);
}

}  // namespace fractal_spectra
