#include "fractal_spectra/surface_mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>
#include <unordered_map>

#include "fractal_spectra/error.hpp"
#include "fractal_spectra/svg.hpp"

namespace fractal_spectra {

namespace {

constexpr double kTwoPi = 2 * std::numbers::pi;

std::uint64_t edge_code(std::uint32_t a, std::uint32_t b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | b;
}

}  // namespace

std::string to_string(VertexRole r) {
  switch (r) {
    case VertexRole::cone: return "cone";
    case VertexRole::steiner: return "steiner";
    case VertexRole::subdivision: return "subdivision";
  }
  return "?";
}

VertexRole parse_vertex_role(const std::string& s) {
  if (s == "cone") return VertexRole::cone;
  if (s == "steiner") return VertexRole::steiner;
  if (s == "subdivision") return VertexRole::subdivision;
  throw std::invalid_argument("unknown vertex role '" + s + "'");
}

std::vector<Edge> mesh_edges(const SurfaceMesh& mesh) {
  std::unordered_map<std::uint64_t, std::size_t> index;
  index.reserve(mesh.triangles.size() * 2);
  std::vector<Edge> edges;
  std::vector<int> count;
  edges.reserve(mesh.triangles.size() * 3 / 2);
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const MeshTriangle& tr = mesh.triangles[t];
    for (int i = 0; i < 3; ++i) {
      const std::uint32_t a = tr.v[(i + 1) % 3], b = tr.v[(i + 2) % 3];
      if (a == b) throw GluingError("triangle " + std::to_string(t) + " repeats a vertex");
      const auto [it, fresh] = index.emplace(edge_code(a, b), edges.size());
      if (fresh) {
        edges.push_back({std::min(a, b), std::max(a, b), tr.len[i],
                         {static_cast<std::uint32_t>(t), 0}});
        count.push_back(1);
        continue;
      }
      Edge& e = edges[it->second];
      if (++count[it->second] > 2)
        throw GluingError("edge " + std::to_string(e.a) + "-" + std::to_string(e.b) +
                          " has more than two triangles");
      if (std::abs(e.length - tr.len[i]) > 1e-10 * std::max(e.length, tr.len[i]))
        throw GluingError("edge " + std::to_string(e.a) + "-" + std::to_string(e.b) +
                          " copies differ in length");
      e.triangles[1] = static_cast<std::uint32_t>(t);
    }
  }
  for (std::size_t e = 0; e < edges.size(); ++e)
    if (count[e] != 2)
      throw GluingError("open edge " + std::to_string(edges[e].a) + "-" +
                        std::to_string(edges[e].b));
  return edges;
}

double triangle_area(const MeshTriangle& t) {
  return area_from_lengths(t.len[0], t.len[1], t.len[2]);
}

double total_area(const SurfaceMesh& mesh) {
  double a = 0;
  for (const auto& t : mesh.triangles) a += triangle_area(t);
  return a;
}

double corner_angle(const MeshTriangle& t, int i) {
  return angle_from_lengths(t.len[i], t.len[(i + 1) % 3], t.len[(i + 2) % 3]);
}

std::vector<double> curvature_audit(const SurfaceMesh& mesh) {
  std::vector<double> sum(mesh.vertex_count(), 0.0);
  for (const auto& t : mesh.triangles)
    for (int i = 0; i < 3; ++i) sum[t.v[i]] += corner_angle(t, i);
  for (double& s : sum) s = kTwoPi - s;
  return sum;
}

AuditExpectations octahedral_expectations(int level) {
  AuditExpectations e;
  e.euler = 2;
  e.cone_deficit = kTwoPi / static_cast<double>(ipow3(level + 1));
  e.cone_count = 2 * ipow3(level + 1);
  return e;
}

MeshAudit audit_mesh(const SurfaceMesh& mesh, const AuditExpectations& expect) {
  MeshAudit a;
  a.vertices = mesh.vertex_count();
  a.triangles = mesh.triangles.size();
  try {
    a.edges = mesh_edges(mesh).size();
  } catch (const GluingError& e) {
    a.failures.push_back(std::string("closed surface: ") + e.what());
  }
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& L = mesh.triangles[t].len;
    if (!(L[0] < L[1] + L[2] && L[1] < L[2] + L[0] && L[2] < L[0] + L[1])) {
      a.failures.push_back("triangle inequality fails at triangle " + std::to_string(t));
      break;
    }
  }
  a.euler = static_cast<long>(a.vertices) - static_cast<long>(a.edges) +
            static_cast<long>(a.triangles);
  if (a.edges > 0 && a.euler != expect.euler)
    a.failures.push_back("Euler characteristic " + std::to_string(a.euler) + ", expected " +
                         std::to_string(expect.euler));

  const std::vector<double> deficit = curvature_audit(mesh);
  a.min_angle = std::numbers::pi;
  for (const auto& t : mesh.triangles)
    for (int i = 0; i < 3; ++i) a.min_angle = std::min(a.min_angle, corner_angle(t, i));
  for (std::size_t v = 0; v < deficit.size(); ++v) {
    a.total_deficit += deficit[v];
    if (mesh.roles[v] == VertexRole::cone) {
      ++a.cone_vertices;
      if (expect.cone_deficit >= 0)
        a.max_cone_error = std::max(a.max_cone_error, std::abs(deficit[v] - expect.cone_deficit));
    } else {
      a.max_flat_deficit = std::max(a.max_flat_deficit, std::abs(deficit[v]));
    }
  }
  if (expect.cone_deficit >= 0) {
    if (a.cone_vertices != expect.cone_count)
      a.failures.push_back("cone vertex count " + std::to_string(a.cone_vertices) +
                           ", expected " + std::to_string(expect.cone_count));
    if (a.max_cone_error > expect.tol)
      a.failures.push_back("cone deficit off by " + std::to_string(a.max_cone_error));
  }
  if (a.max_flat_deficit > expect.tol)
    a.failures.push_back("non-cone vertex deficit " + std::to_string(a.max_flat_deficit));
  const double gauss_bonnet = kTwoPi * static_cast<double>(expect.euler);
  if (std::abs(a.total_deficit - gauss_bonnet) > 1e-8)
    a.failures.push_back("total deficit " + std::to_string(a.total_deficit) + ", expected " +
                         std::to_string(gauss_bonnet));
  return a;
}

SurfaceMesh subdivide(const SurfaceMesh& mesh) {
  SurfaceMesh out;
  out.level = mesh.level;
  out.depth = mesh.depth + 1;
  out.normalization = mesh.normalization;
  out.roles = mesh.roles;
  out.keys = mesh.keys;
  std::unordered_map<std::uint64_t, std::uint32_t> mid;
  mid.reserve(mesh.triangles.size() * 2);
  auto midpoint = [&](std::uint32_t a, std::uint32_t b) {
    const auto [it, fresh] =
        mid.emplace(edge_code(a, b), static_cast<std::uint32_t>(out.roles.size()));
    if (fresh) {
      out.roles.push_back(VertexRole::subdivision);
      VertexKey k;
      k.kind = VertexKey::Kind::midpoint;
      k.parents = {std::min(a, b), std::max(a, b)};
      out.keys.push_back(k);
    }
    return it->second;
  };
  const bool has_net = mesh.net.size() == mesh.triangles.size();
  out.triangles.reserve(4 * mesh.triangles.size());
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const MeshTriangle& tr = mesh.triangles[t];
    // m[i] is the midpoint of the edge opposite corner i.
    std::array<std::uint32_t, 3> m{};
    for (int i = 0; i < 3; ++i) m[i] = midpoint(tr.v[(i + 1) % 3], tr.v[(i + 2) % 3]);
    const std::array<double, 3> h = {tr.len[0] / 2, tr.len[1] / 2, tr.len[2] / 2};
    // Corner triangles (v_i, m_{i+2}, m_{i+1}) and the middle (m0, m1, m2).
    for (int i = 0; i < 3; ++i) {
      const int j = (i + 1) % 3, k = (i + 2) % 3;
      out.triangles.push_back({{tr.v[i], m[k], m[j]}, {h[i], h[j], h[k]}});
    }
    out.triangles.push_back({{m[0], m[1], m[2]}, {h[0], h[1], h[2]}});
    if (!mesh.face.empty())
      for (int r = 0; r < 4; ++r) out.face.push_back(mesh.face[t]);
    if (has_net) {
      const auto& p = mesh.net[t];
      const std::array<Vec2, 3> q = {0.5 * (p[1] + p[2]), 0.5 * (p[2] + p[0]), 0.5 * (p[0] + p[1])};
      for (int i = 0; i < 3; ++i) {
        const int j = (i + 1) % 3, k = (i + 2) % 3;
        out.net.push_back({p[i], q[k], q[j]});
      }
      out.net.push_back(q);
    }
  }
  return out;
}

SurfaceMesh subdivide(SurfaceMesh mesh, int times) {
  for (int i = 0; i < times; ++i) mesh = subdivide(mesh);
  return mesh;
}

SurfaceMesh scaled(SurfaceMesh mesh, double s) {
  for (auto& t : mesh.triangles)
    for (double& l : t.len) l *= s;
  mesh.normalization.target *= s;
  return mesh;
}

SurfaceMesh relabeled(const SurfaceMesh& mesh, const std::vector<std::uint32_t>& perm) {
  if (perm.size() != mesh.vertex_count()) throw std::invalid_argument("permutation size");
  SurfaceMesh out = mesh;
  for (std::size_t v = 0; v < perm.size(); ++v) {
    out.roles[perm[v]] = mesh.roles[v];
    VertexKey k = mesh.keys[v];
    if (k.kind == VertexKey::Kind::midpoint) {
      k.parents = {perm[k.parents[0]], perm[k.parents[1]]};
      if (k.parents[0] > k.parents[1]) std::swap(k.parents[0], k.parents[1]);
    }
    out.keys[perm[v]] = k;
  }
  for (auto& t : out.triangles)
    for (auto& v : t.v) v = perm[v];
  return out;
}

nlohmann::json to_json(const SurfaceMesh& mesh) {
  using nlohmann::json;
  json verts = json::array();
  for (std::size_t v = 0; v < mesh.vertex_count(); ++v) {
    const VertexKey& k = mesh.keys[v];
    json key;
    switch (k.kind) {
      case VertexKey::Kind::lattice: key = {{"lattice", k.lattice}}; break;
      case VertexKey::Kind::grid: key = {{"grid", k.lattice}}; break;
      case VertexKey::Kind::steiner:
        key = {{"face", k.face}, {"word_length", k.word_length},
               {"word_index", k.word_index}, {"beta", k.beta}};
        break;
      case VertexKey::Kind::midpoint: key = {{"midpoint", k.parents}}; break;
    }
    verts.push_back({{"id", v}, {"role", to_string(mesh.roles[v])}, {"key", key}});
  }
  json tris = json::array();
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    json tr = {{"v", mesh.triangles[t].v}, {"len", mesh.triangles[t].len}};
    if (!mesh.face.empty()) tr["face"] = mesh.face[t];
    if (mesh.net.size() == mesh.triangles.size()) {
      json pts = json::array();
      for (const Vec2& p : mesh.net[t]) pts.push_back({p.x, p.y});
      tr["net"] = pts;
    }
    tris.push_back(std::move(tr));
  }
  return {{"level", mesh.level},
          {"depth", mesh.depth},
          {"normalization", to_string(mesh.normalization.mode)},
          {"target", mesh.normalization.target},
          {"vertices", verts},
          {"triangles", tris}};
}

SurfaceMesh surface_mesh_from_json(const nlohmann::json& j) {
  SurfaceMesh m;
  m.level = j.at("level").get<int>();
  m.depth = j.at("depth").get<int>();
  m.normalization.mode = parse_normalization(j.at("normalization").get<std::string>());
  m.normalization.target = j.value("target", 1.0);
  const auto& verts = j.at("vertices");
  m.roles.resize(verts.size());
  m.keys.resize(verts.size());
  for (const auto& v : verts) {
    const std::size_t id = v.at("id").get<std::size_t>();
    if (id >= verts.size()) throw std::invalid_argument("vertex id out of range");
    m.roles[id] = parse_vertex_role(v.at("role").get<std::string>());
    VertexKey k;
    if (v.contains("key")) {
      const auto& kj = v.at("key");
      if (kj.contains("lattice")) {
        k.kind = VertexKey::Kind::lattice;
        k.lattice = kj.at("lattice").get<Lattice>();
      } else if (kj.contains("grid")) {
        k.kind = VertexKey::Kind::grid;
        k.lattice = kj.at("grid").get<Lattice>();
      } else if (kj.contains("midpoint")) {
        k.kind = VertexKey::Kind::midpoint;
        k.parents = kj.at("midpoint").get<std::array<std::uint32_t, 2>>();
      } else {
        k.kind = VertexKey::Kind::steiner;
        k.face = kj.at("face").get<int>();
        k.word_length = kj.at("word_length").get<int>();
        k.word_index = kj.at("word_index").get<std::size_t>();
        k.beta = kj.at("beta").get<Bary>();
      }
    }
    m.keys[id] = k;
  }
  for (const auto& t : j.at("triangles")) {
    m.triangles.push_back({t.at("v").get<std::array<std::uint32_t, 3>>(),
                           t.at("len").get<std::array<double, 3>>()});
    if (t.contains("face")) m.face.push_back(t.at("face").get<std::int8_t>());
    if (t.contains("net")) {
      std::array<Vec2, 3> p{};
      for (int i = 0; i < 3; ++i) p[i] = {t.at("net")[i][0].get<double>(), t.at("net")[i][1].get<double>()};
      m.net.push_back(p);
    }
  }
  return m;
}

void write_net_svg(const SurfaceMesh& mesh, std::ostream& os) {
  if (mesh.net.size() != mesh.triangles.size()) throw std::invalid_argument("mesh has no net layout");
  std::vector<Vec2> all;
  for (const auto& p : mesh.net) all.insert(all.end(), p.begin(), p.end());
  auto [lo, hi] = bounding_box(all);
  SvgCanvas c(lo, hi, 1000);
  const std::array<const char*, 2> fills = {"#d9e4f2", "#f4f4f4"};
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const int f = mesh.face.empty() ? 0 : mesh.face[t];
    const int parity = f < 0 ? 0 : (((f & 1) + ((f >> 1) & 1) + ((f >> 2) & 1)) % 2);
    c.polygon(mesh.net[t], fills[parity], "#556", 0.3);
  }
  // Copies of a vertex at different net positions are identified.
  std::map<std::uint32_t, std::vector<Vec2>> copies;
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t)
    for (int i = 0; i < 3; ++i) {
      auto& list = copies[mesh.triangles[t].v[i]];
      const Vec2 p = mesh.net[t][i];
      bool seen = false;
      for (const Vec2& q : list) seen = seen || norm(p - q) < 1e-9;
      if (!seen) list.push_back(p);
    }
  for (const auto& [v, list] : copies) {
    if (mesh.roles[v] != VertexRole::cone) continue;
    for (std::size_t i = 1; i < list.size(); ++i) c.line(list[0], list[i], "#c0392b", 0.4, "2,2");
    for (const Vec2& p : list) c.circle(p, 1.6, "#c0392b");
  }
  c.write(os);
}

}  // namespace fractal_spectra
