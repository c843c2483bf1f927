#include "fractal_spectra/geometry.hpp"

#include <algorithm>

namespace fractal_spectra {

Lattice corner_lattice(const Word& u, int j, int level) {
  Lattice p{0, 0, 0};
  const int r = u.length();
  for (int t = 0; t < r; ++t) p[u[t]] += 1 << (level - t - 1);
  p[j] += 1 << (level - r);
  return p;
}

Lattice downward_corner_lattice(const Word& u, int j, int level) {
  Lattice p{0, 0, 0};
  const int r = u.length();
  for (int t = 0; t < r; ++t) p[u[t]] += 1 << (level - t - 1);
  const int half = 1 << (level - r - 1);
  for (int i = 0; i < 3; ++i)
    if (i != j) p[i] += half;
  return p;
}

double area_from_lengths(double a, double b, double c) {
  if (a < b) std::swap(a, b);
  if (a < c) std::swap(a, c);
  if (b < c) std::swap(b, c);
  const double q = (a + (b + c)) * (c - (a - b)) * (c + (a - b)) * (a + (b - c));
  if (c - (a - b) < 0.0 || q < 0.0) return -1.0;
  return 0.25 * std::sqrt(q);
}

double angle_from_lengths(double a, double b, double c) {
  const double area = std::max(area_from_lengths(a, b, c), 0.0);
  return std::atan2(4.0 * area, b * b + c * c - a * a);
}

}  // namespace fractal_spectra
