#pragma once

#include <array>
#include <cmath>

#include "fractal_spectra/word.hpp"

namespace fractal_spectra {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }

// Integer barycentric position on the level-m lattice of a face: the
// coordinates are nonnegative and sum to 2^m. Corners of upward triangles,
// chain points and downward-triangle corners all land on this lattice.
using Lattice = std::array<int, 3>;

// Corner j of the cluster T_u (|u| <= m) on the level-m lattice.
Lattice corner_lattice(const Word& u, int j, int level);

// Corner c_j of the downward triangle D_u, the midpoint of T_u's side
// opposite corner j.
Lattice downward_corner_lattice(const Word& u, int j, int level);

// Area from three side lengths (Kahan's stable form of Heron's formula).
// Returns a negative value when the lengths violate the triangle inequality.
double area_from_lengths(double a, double b, double c);

// Interior angle opposite side a in the triangle with sides a, b, c.
double angle_from_lengths(double a, double b, double c);

// Area of a triangle from two sides and the included angle.
inline double area_sas(double a, double b, double included) {
  return 0.5 * a * b * std::sin(included);
}

}  // namespace fractal_spectra
