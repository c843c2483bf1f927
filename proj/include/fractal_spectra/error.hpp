#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fractal_spectra {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// b-table failed one of its structural conditions.
class ConditionViolation : public Error {
 public:
  using Error::Error;
};

class GeometryError : public Error {
 public:
  using Error::Error;
};

// Two identified edge copies disagree, or an edge is left open.
class GluingError : public Error {
 public:
  using Error::Error;
};

class DegenerateElement : public Error {
 public:
  DegenerateElement(std::size_t triangle, double angle)
      : Error("degenerate element " + std::to_string(triangle) +
              " (min angle " + std::to_string(angle) + " rad)"),
        triangle_(triangle), angle_(angle) {}
  std::size_t triangle() const { return triangle_; }
  double angle() const { return angle_; }

 private:
  std::size_t triangle_;
  double angle_;
};

class SolverError : public Error {
 public:
  SolverError(const std::string& what, int iterations, double worst_residual)
      : Error(what), iterations_(iterations), worst_residual_(worst_residual) {}
  int iterations() const { return iterations_; }
  double worst_residual() const { return worst_residual_; }

 private:
  int iterations_;
  double worst_residual_;
};

class FactorizationError : public Error {
 public:
  using Error::Error;
};

}  // namespace fractal_spectra
