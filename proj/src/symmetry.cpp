#include "fractal_spectra/symmetry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <unordered_map>

#include "fractal_spectra/assembly.hpp"
#include "fractal_spectra/error.hpp"

namespace fractal_spectra {

Lattice SignedPermutation::apply(const Lattice& x) const {
  Lattice y{};
  for (int j = 0; j < 3; ++j) y[perm[j]] = sign[j] * x[j];
  return y;
}

int SignedPermutation::apply_face(int face) const {
  const auto s = octant_signs(face);
  std::array<int, 3> t{};
  for (int j = 0; j < 3; ++j) t[perm[j]] = sign[j] * s[j];
  return (t[0] < 0) + 2 * (t[1] < 0) + 4 * (t[2] < 0);
}

SignedPermutation compose(const SignedPermutation& outer, const SignedPermutation& inner) {
  SignedPermutation g;
  for (int j = 0; j < 3; ++j) {
    g.perm[j] = outer.perm[inner.perm[j]];
    g.sign[j] = outer.sign[inner.perm[j]] * inner.sign[j];
  }
  return g;
}

int SignedPermutation::order() const {
  SignedPermutation p = *this;
  int k = 1;
  while (p != SignedPermutation{}) {
    p = compose(*this, p);
    ++k;
  }
  return k;
}

int SignedPermutation::determinant() const {
  return (is_odd(perm) ? -1 : 1) * sign[0] * sign[1] * sign[2];
}

SymmetryClass classify(const SignedPermutation& g) {
  switch (g.order()) {
    case 1: return SymmetryClass::identity;
    case 3: return SymmetryClass::third_turn;
    case 4: return SymmetryClass::rotoreflection;
    default: return g.determinant() < 0 ? SymmetryClass::reflection : SymmetryClass::half_turn;
  }
}

SignedPermutation generator_a() { return {{1, 0, 2}, {-1, -1, 1}}; }
SignedPermutation generator_b() { return {{1, 2, 0}, {1, 1, 1}}; }

namespace {

std::uint64_t edge_code(std::uint32_t a, std::uint32_t b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | b;
}

std::vector<std::uint32_t> vertex_images(const SurfaceMesh& mesh, const SignedPermutation& g,
                                         const std::map<VertexKey, std::uint32_t>& ids) {
  std::vector<std::uint32_t> img(mesh.vertex_count());
  for (std::size_t v = 0; v < mesh.vertex_count(); ++v) {
    VertexKey k = mesh.keys[v];
    switch (k.kind) {
      case VertexKey::Kind::lattice: k.lattice = g.apply(k.lattice); break;
      case VertexKey::Kind::steiner: {
        k.face = g.apply_face(k.face);
        if (k.word_length >= 0)
          k.word_index = Word::from_index(k.word_index, k.word_length).permuted(g.perm).index();
        Bary beta{};
        for (int j = 0; j < 3; ++j) beta[g.perm[j]] = k.beta[j];
        k.beta = beta;
        break;
      }
      case VertexKey::Kind::midpoint:
        // Parents precede their midpoint, so their images are known.
        k.parents = {img[k.parents[0]], img[k.parents[1]]};
        if (k.parents[0] > k.parents[1]) std::swap(k.parents[0], k.parents[1]);
        break;
      case VertexKey::Kind::grid:
        throw GluingError("grid vertices carry no octahedral symmetry");
    }
    const auto it = ids.find(k);
    if (it == ids.end()) throw GluingError("vertex " + std::to_string(v) + " has no image");
    img[v] = it->second;
  }
  return img;
}

}  // namespace

double isometry_defect(const SurfaceMesh& mesh, const std::vector<std::uint32_t>& map) {
  std::unordered_map<std::uint64_t, double> length;
  length.reserve(mesh.triangles.size() * 2);
  for (const auto& t : mesh.triangles)
    for (int i = 0; i < 3; ++i) length[edge_code(t.v[(i + 1) % 3], t.v[(i + 2) % 3])] = t.len[i];
  std::unordered_map<std::uint64_t, int> tris;  // sorted-triple hash
  auto triple = [](std::array<std::uint32_t, 3> v) {
    std::sort(v.begin(), v.end());
    return (static_cast<std::uint64_t>(v[0]) * 2654435761u) ^
           (static_cast<std::uint64_t>(v[1]) << 21) ^ (static_cast<std::uint64_t>(v[2]) << 42);
  };
  for (const auto& t : mesh.triangles) ++tris[triple(t.v)];
  double worst = 0;
  for (const auto& t : mesh.triangles) {
    const std::array<std::uint32_t, 3> w = {map[t.v[0]], map[t.v[1]], map[t.v[2]]};
    if (!tris.count(triple(w))) return std::numeric_limits<double>::infinity();
    for (int i = 0; i < 3; ++i) {
      const auto it = length.find(edge_code(w[(i + 1) % 3], w[(i + 2) % 3]));
      if (it == length.end()) return std::numeric_limits<double>::infinity();
      worst = std::max(worst, std::abs(it->second - t.len[i]));
    }
  }
  return worst;
}

bool relations_hold(const SymmetryAction& action) {
  const auto& A = action.vertex_map[action.a];
  const auto& B = action.vertex_map[action.b];
  const std::size_t n = A.size();
  for (std::uint32_t v = 0; v < n; ++v) {
    if (A[A[v]] != v || B[B[B[v]]] != v) return false;
    std::uint32_t w = v;
    for (int k = 0; k < 4; ++k) w = A[B[w]];
    if (w != v) return false;
  }
  return true;
}

SymmetryAction build_symmetry_action(const SurfaceMesh& mesh) {
  std::map<VertexKey, std::uint32_t> ids;
  for (std::size_t v = 0; v < mesh.vertex_count(); ++v)
    if (!ids.emplace(mesh.keys[v], static_cast<std::uint32_t>(v)).second)
      throw GluingError("duplicate construction label at vertex " + std::to_string(v));

  SymmetryAction act;
  act.elements.push_back(SignedPermutation{});
  for (std::size_t i = 0; i < act.elements.size(); ++i)
    for (const SignedPermutation& g : {generator_a(), generator_b()}) {
      const SignedPermutation h = compose(g, act.elements[i]);
      if (std::find(act.elements.begin(), act.elements.end(), h) == act.elements.end())
        act.elements.push_back(h);
    }
  if (act.elements.size() != 24)
    throw GluingError("generated group has order " + std::to_string(act.elements.size()));
  act.a = static_cast<std::size_t>(
      std::find(act.elements.begin(), act.elements.end(), generator_a()) - act.elements.begin());
  act.b = static_cast<std::size_t>(
      std::find(act.elements.begin(), act.elements.end(), generator_b()) - act.elements.begin());

  for (const SignedPermutation& g : act.elements) {
    act.vertex_map.push_back(vertex_images(mesh, g, ids));
    act.classes.push_back(classify(g));
    const double d = isometry_defect(mesh, act.vertex_map.back());
    if (!(d <= 1e-10)) throw GluingError("symmetry is not an isometry (defect " + std::to_string(d) + ")");
  }
  std::array<int, kClassCount> sizes{};
  for (SymmetryClass c : act.classes) ++sizes[static_cast<int>(c)];
  if (sizes != kClassSizes) throw GluingError("unexpected conjugacy class sizes");
  if (!relations_hold(act)) throw GluingError("generator relations fail on the vertices");
  return act;
}

}  // namespace fractal_spectra
