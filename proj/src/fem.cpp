#include "fractal_spectra/fem.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <vector>

#include "fractal_spectra/error.hpp"

namespace fractal_spectra {

std::string to_string(MassKind k) { return k == MassKind::lumped ? "lumped" : "consistent"; }

MassKind parse_mass_kind(const std::string& s) {
  if (s == "consistent") return MassKind::consistent;
  if (s == "lumped") return MassKind::lumped;
  throw std::invalid_argument("unknown mass kind '" + s + "'");
}

OperatorPair assemble_matrices(const SurfaceMesh& mesh, MassKind kind, double min_angle) {
  const std::size_t n = mesh.vertex_count();
  std::vector<Eigen::Triplet<double>> k, m;
  k.reserve(9 * mesh.triangles.size());
  m.reserve(9 * mesh.triangles.size());
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const MeshTriangle& tr = mesh.triangles[t];
    const double area = triangle_area(tr);
    if (!(area > 0)) throw DegenerateElement(t, 0.0);
    for (int i = 0; i < 3; ++i) {
      const double angle = corner_angle(tr, i);
      if (angle < min_angle) throw DegenerateElement(t, angle);
    }
    const auto& L = tr.len;
    for (int i = 0; i < 3; ++i) {
      // cot of the angle at corner i, from the law of cosines.
      const double a = L[i], b = L[(i + 1) % 3], c = L[(i + 2) % 3];
      const double w = (b * b + c * c - a * a) / (4 * area) / 2;
      const auto p = tr.v[(i + 1) % 3], q = tr.v[(i + 2) % 3];
      k.emplace_back(p, q, -w);
      k.emplace_back(q, p, -w);
      k.emplace_back(p, p, w);
      k.emplace_back(q, q, w);
    }
    for (int i = 0; i < 3; ++i) {
      if (kind == MassKind::lumped) {
        m.emplace_back(tr.v[i], tr.v[i], area / 3);
        continue;
      }
      for (int j = 0; j < 3; ++j) m.emplace_back(tr.v[i], tr.v[j], i == j ? area / 6 : area / 12);
    }
  }
  OperatorPair ops;
  ops.n = n;
  ops.mass_kind = kind;
  ops.stiffness.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  ops.mass.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  ops.stiffness.setFromTriplets(k.begin(), k.end());
  ops.mass.setFromTriplets(m.begin(), m.end());
  return ops;
}

void write_matrix_market(const SparseMatrix& a, std::ostream& os) {
  os << "%%MatrixMarket matrix coordinate real general\n"
     << a.rows() << ' ' << a.cols() << ' ' << a.nonZeros() << '\n';
  char buf[64];
  for (Eigen::Index c = 0; c < a.outerSize(); ++c)
    for (SparseMatrix::InnerIterator it(a, c); it; ++it) {
      std::snprintf(buf, sizeof buf, "%.17g", it.value());
      os << it.row() + 1 << ' ' << it.col() + 1 << ' ' << buf << '\n';
    }
}

}  // namespace fractal_spectra
