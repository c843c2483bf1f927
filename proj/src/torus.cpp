#include "fractal_spectra/torus.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace fractal_spectra {

SurfaceMesh flat_torus(double side, int cells) {
  if (cells < 3) throw std::invalid_argument("torus needs at least 3 cells per side");
  if (!(side > 0)) throw std::invalid_argument("torus side must be positive");
  SurfaceMesh m;
  m.normalization.target = side;
  const auto n = static_cast<std::uint32_t>(cells);
  auto corner = [n](std::uint32_t i, std::uint32_t j) { return (i % n) * n + (j % n); };
  auto centre = [n](std::uint32_t i, std::uint32_t j) { return n * n + i * n + j; };
  for (int kind = 0; kind < 2; ++kind)
    for (std::uint32_t i = 0; i < n; ++i)
      for (std::uint32_t j = 0; j < n; ++j) {
        VertexKey k;
        k.kind = VertexKey::Kind::grid;
        k.lattice = {static_cast<int>(i), static_cast<int>(j), kind};
        m.keys.push_back(k);
        m.roles.push_back(kind == 0 ? VertexRole::cone : VertexRole::steiner);
      }
  const double h = side / cells, d = h / std::sqrt(2.0);
  for (std::uint32_t i = 0; i < n; ++i)
    for (std::uint32_t j = 0; j < n; ++j) {
      const std::array<std::uint32_t, 4> ring = {corner(i, j), corner(i + 1, j),
                                                 corner(i + 1, j + 1), corner(i, j + 1)};
      const std::array<Vec2, 4> at = {Vec2{double(i), double(j)}, Vec2{i + 1.0, double(j)},
                                      Vec2{i + 1.0, j + 1.0}, Vec2{double(i), j + 1.0}};
      const Vec2 c{i + 0.5, j + 0.5};
      for (int e = 0; e < 4; ++e) {
        m.triangles.push_back({{ring[e], ring[(e + 1) % 4], centre(i, j)}, {d, d, h}});
        m.net.push_back({at[e], at[(e + 1) % 4], c});
        m.face.push_back(-1);
      }
    }
  return m;
}

std::vector<double> torus_eigenvalues(double side, std::size_t count) {
  std::vector<double> out;
  const double c = 4 * std::numbers::pi * std::numbers::pi / (side * side);
  for (int r = 1;; r *= 2) {
    out.clear();
    for (int p = -r; p <= r; ++p)
      for (int q = -r; q <= r; ++q) out.push_back(c * (p * p + q * q));
    std::sort(out.begin(), out.end());
    // Every value below c (r+1)^2 has been enumerated.
    if (out.size() >= count && out[count - 1] < c * (r + 1) * (r + 1)) break;
  }
  out.resize(count);
  return out;
}

}  // namespace fractal_spectra
